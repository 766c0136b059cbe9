#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mixt/basis.hpp"

namespace mixt {

/// Integer multi-index k; component j lies in Z for exp dimensions and in N0 otherwise.
using FrequencyIndex = std::vector<int>;
/// Even, non-negative bandwidth per dimension. Zero pins a dimension to frequency 0.
using Bandwidths = std::vector<int>;
/// Sorted, 0-based set of coordinate indices (an ANOVA term label).
using Subset = std::vector<int>;

/// Flat, row-major list of multi-indices of a fixed dimension.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? count_ : data_.size() / dim_; }
  bool empty() const noexcept { return size() == 0; }
  std::span<const int> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  void push_back(std::span<const int> k);

 private:
  std::size_t dim_ = 0;
  std::size_t count_ = 0;  // only used when dim_ == 0
  std::vector<int> data_;
};

/// Support of k: dimensions with a non-zero component.
Subset support(std::span<const int> k);

/// Full hypercube I_N: [-N/2, N/2) for exp, [0, N/2) otherwise; last dimension fastest.
IndexSet hypercube_set(const BasisVector& basis, std::span<const int> N);
std::int64_t hypercube_cardinality(const BasisVector& basis, std::span<const int> N);

/// Reduced set: {0} where N_j = 0, the hypercube range without 0 elsewhere.
IndexSet reduced_set(const BasisVector& basis, std::span<const int> N);
std::int64_t reduced_cardinality(const BasisVector& basis, std::span<const int> N);

/// Upper bound d_s (d N_max)^d_s on the size of a grouped set over U_{d_s}; requires d >= 2 d_s.
std::int64_t cardinality_bound(int d, int ds, int n_max);

/// One ANOVA term of a truncation family together with its bandwidth vector.
struct FamilyTerm {
  Subset u;
  Bandwidths N;  // length d, N[j] != 0 exactly for j in u
  friend bool operator==(const FamilyTerm&, const FamilyTerm&) = default;
};

/// Set of ANOVA terms with per-term bandwidths. Terms are kept sorted by |u| and
/// then lexicographically, which fixes the coefficient layout of every model.
class SubsetFamily {
 public:
  SubsetFamily() = default;
  SubsetFamily(std::size_t dim, std::vector<FamilyTerm> terms);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return terms_.size(); }
  const FamilyTerm& operator[](std::size_t i) const { return terms_[i]; }
  std::span<const FamilyTerm> terms() const noexcept { return terms_; }
  const FamilyTerm* find(const Subset& u) const;
  bool contains(const Subset& u) const { return find(u) != nullptr; }

  /// Text form, one line per term: `u=1,3 N=10,0,8,0` (1-based dimensions, `u=`
  /// alone for the empty set). Lines starting with '#' are comments.
  std::string to_text() const;
  static SubsetFamily parse(const std::string& text);

  friend bool operator==(const SubsetFamily&, const SubsetFamily&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<FamilyTerm> terms_;
};

bool subset_less(const Subset& a, const Subset& b);
std::string format_subset(const Subset& u);  // 1-based, e.g. "{1,3}"

/// All u with |u| <= ds; order_params[o-1] is placed on the support of every
/// term of order o (the empty set gets the zero vector).
SubsetFamily superposition_family(int d, int ds, std::span<const int> order_params);

/// How an experiment bandwidth parameter is turned into index-set bandwidths.
///   kIndexRange     - used verbatim: non-periodic dims keep frequencies [0, N/2).
///   kFrequencyCount - non-periodic dims keep frequencies [0, N) (entries doubled),
///                     periodic dims keep [-N/2, N/2).
enum class BandwidthConvention { kIndexRange, kFrequencyCount };

SubsetFamily apply_convention(const SubsetFamily& family, const BasisVector& basis, BandwidthConvention convention);

/// One reduced block of a grouped index set.
struct GroupedBlock {
  Subset u;
  Bandwidths N;            // full length-d bandwidths
  BasisVector sub_basis;   // basis restricted to u (empty for u = {})
  Bandwidths sub_N;        // non-zero entries of N
  std::int64_t offset = 0; // position of the block in the coefficient vector
  std::int64_t size = 0;   // reduced cardinality
};

/// Union of reduced blocks, one per family term, laid out in family order.
class GroupedIndexSet {
 public:
  GroupedIndexSet(BasisVector basis, SubsetFamily family);

  const BasisVector& basis() const noexcept { return basis_; }
  const SubsetFamily& family() const noexcept { return family_; }
  std::span<const GroupedBlock> blocks() const noexcept { return blocks_; }
  std::int64_t size() const noexcept { return total_; }

  /// Enumerates every frequency in coefficient order (length-d indices).
  IndexSet frequencies() const;

 private:
  BasisVector basis_;
  SubsetFamily family_;
  std::vector<GroupedBlock> blocks_;
  std::int64_t total_ = 0;
};

/// Throws kInvalidFamily if some term violates the support/evenness constraints.
void validate_family(const BasisVector& basis, const SubsetFamily& family);

}  // namespace mixt
