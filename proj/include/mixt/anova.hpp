#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixt/data_io.hpp"
#include "mixt/grouped.hpp"
#include "mixt/index_sets.hpp"
#include "mixt/lsqr.hpp"

namespace mixt {

struct FitOptions {
  LsqrOptions solver;
  GroupedOptions transform;
};

struct FitMeta {
  std::size_t num_nodes = 0;
  int iterations = 0;
  double residual_norm = 0.0;
  std::string stop_reason;
  double train_mse = 0.0;
  std::vector<ColumnRange> normalization;  // feature extremes applied before fitting; empty if none
};

struct GsiEntry {
  Subset u;
  double rho = 0.0;
};

/// Fitted approximant f(x) = sum_{k in I(U)} c_k phi_k(x).
class MixedModel {
 public:
  MixedModel(GroupedIndexSet set, std::vector<Complex> coeffs, FitMeta meta = {});

  const GroupedIndexSet& index_set() const noexcept { return set_; }
  const BasisVector& basis() const noexcept { return set_.basis(); }
  const SubsetFamily& family() const noexcept { return set_.family(); }
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }
  const FitMeta& meta() const noexcept { return meta_; }
  void set_normalization(std::vector<ColumnRange> ranges) { meta_.normalization = std::move(ranges); }

  std::vector<Complex> predict(std::span<const double> nodes, const GroupedOptions& options = {}) const;
  /// Real parts of predict(); imaginary parts are discarded.
  std::vector<double> predict_real(std::span<const double> nodes, const GroupedOptions& options = {}) const;

  /// sigma^2(f) = sum over k != 0 of |c_k|^2.
  double variance() const;
  /// Energy of the block with support exactly u (0 if u is not in the family).
  double term_variance(const Subset& u) const;
  /// rho(u) for every non-empty term, in family order. Throws kDegenerateModel if the variance is 0.
  std::vector<GsiEntry> gsi() const;
  /// Terms with rho(u) > theta plus the empty set, bandwidths carried over.
  SubsetFamily truncate(double theta) const;

  std::string to_text() const;
  static MixedModel from_text(const std::string& text);
  void save(const std::string& path) const;
  static MixedModel load(const std::string& path);

 private:
  GroupedIndexSet set_;
  std::vector<Complex> coeffs_;
  FitMeta meta_;
};

MixedModel fit(const BasisVector& basis, const SubsetFamily& family, std::span<const double> nodes, std::span<const Complex> targets,
               const FitOptions& options = {});
MixedModel fit(const BasisVector& basis, const SubsetFamily& family, const NodeSet& data, const FitOptions& options = {});

double mse(std::span<const Complex> truth, std::span<const Complex> pred);
double mse(std::span<const double> truth, std::span<const double> pred);

/// Validation MSE of a fit of `family` (in `convention` units) on `train`,
/// evaluated on `valid`; +inf when the fit fails.
double validation_mse(const BasisVector& basis, const SubsetFamily& family, BandwidthConvention convention, const NodeSet& train,
                      const NodeSet& valid, const FitOptions& options);

struct GridCell {
  int n1 = 0;
  int n2 = 0;
  double mse = std::numeric_limits<double>::infinity();
};

struct GridSearchResult {
  int best_n1 = 0;
  int best_n2 = 0;
  double best_mse = std::numeric_limits<double>::infinity();
  std::vector<GridCell> table;  // N2-major, both ascending
};

/// Superposition family U_ds (ds in {1, 2}) for every (N1, N2) cell. Ties go to
/// smaller (N2, N1). For ds = 1 the N2 list is ignored. `threads` runs cells concurrently.
GridSearchResult grid_search_bandwidths(const BasisVector& basis, int ds, std::span<const int> n1_values, std::span<const int> n2_values,
                                        const NodeSet& train, const NodeSet& valid, BandwidthConvention convention,
                                        const FitOptions& options, int threads = 1);

struct RefineStep {
  int pass = 1;      // 1: one parameter per term, 2: one per non-zero entry
  Subset u;
  int dim = -1;      // entry changed in pass 2, -1 in pass 1
  int value = 0;
  double mse = 0.0;
  bool accepted = false;
};

struct RefineOptions {
  bool per_entry_pass = false;
  int step = 2;
  int min_value = 2;
  int max_value = 1 << 16;
};

struct RefineResult {
  SubsetFamily family;
  double mse = 0.0;
  std::vector<RefineStep> trace;  // the first entry is the starting point
};

using FamilyObjective = std::function<double(const SubsetFamily&)>;

/// Coordinate-wise descent on the per-term bandwidth parameters, visiting terms
/// in reverse family order (highest order first), skipping the empty set. Each
/// parameter is first increased while the objective strictly improves; if the
/// first increase does not improve, it is decreased instead.
RefineResult coordinate_refine(const SubsetFamily& start, const FamilyObjective& objective, const RefineOptions& options = {});

RefineResult coordinate_refine_bandwidths(const BasisVector& basis, const SubsetFamily& start, const NodeSet& train, const NodeSet& valid,
                                          BandwidthConvention convention, const FitOptions& options,
                                          const RefineOptions& refine = {});

}  // namespace mixt
