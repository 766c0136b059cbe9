#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mixt/index_sets.hpp"
#include "mixt/nfmt.hpp"

namespace mixt {

struct GroupedOptions {
  NfftOptions nfft;
  int threads = 1;  // blocks computed in parallel; reduction stays in block order
};

/// Phi(X, I(U)) and its transposes, one lower-dimensional mixed transform per
/// family term. Coefficients follow GroupedIndexSet order.
class GroupedTransform {
 public:
  GroupedTransform(GroupedIndexSet set, std::span<const double> nodes, GroupedOptions options = {});

  const GroupedIndexSet& index_set() const noexcept { return set_; }
  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_coeffs() const noexcept { return static_cast<std::size_t>(set_.size()); }

  void forward(std::span<const Complex> coeffs, std::span<Complex> values) const;
  void transpose(std::span<const Complex> values, std::span<Complex> coeffs) const;
  void adjoint(std::span<const Complex> values, std::span<Complex> coeffs) const;

  std::vector<Complex> forward(std::span<const Complex> coeffs) const;
  std::vector<Complex> adjoint(std::span<const Complex> values) const;

 private:
  struct Block {
    std::optional<MixedTransform> plan;   // empty for u = {} or an empty block
    std::vector<std::int64_t> positions;  // reduced index -> position in the |u|-variate hypercube
  };

  template <class F>
  void for_each_block(F&& f) const;

  GroupedIndexSet set_;
  std::size_t num_nodes_ = 0;
  int threads_ = 1;
  std::vector<Block> blocks_;
};

/// Direct evaluation of sum_{k in I(U)} c_k phi_k(x); the oracle for tests and small models.
std::vector<Complex> grouped_direct(const GroupedIndexSet& set, std::span<const double> nodes, std::span<const Complex> coeffs);

}  // namespace mixt
