#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mixt/basis.hpp"
#include "mixt/index_sets.hpp"
#include "mixt/nfft.hpp"

namespace mixt {

/// Maps coefficients on hypercube_set(basis, N) to coefficients on the exp
/// hypercube of the same N: entries are copied from the folded index s(k)
/// (|k_j| in non-exp dims) and scaled by 1, sqrt(2)/2 or 0 per dimension.
std::vector<Complex> expand_coefficients(const BasisVector& basis, std::span<const int> N, std::span<const Complex> coeffs);

/// Evaluation of mixed polynomials on I_N^d at scattered nodes via one NFFT on
/// the exp hypercube at transformed nodes. Nodes are M x d, row-major, in the
/// mixed domain (exp coordinates are wrapped, others must lie in [0,1]).
class MixedTransform {
 public:
  MixedTransform(BasisVector basis, std::vector<int> N, std::span<const double> nodes, NfftOptions options = {});

  const BasisVector& basis() const noexcept { return basis_; }
  std::span<const int> bandwidths() const noexcept { return N_; }
  std::size_t num_nodes() const noexcept { return plan_.num_nodes(); }
  std::size_t num_coeffs() const noexcept { return num_coeffs_; }
  const NfftPlan& plan() const noexcept { return plan_; }

  /// values_x = sum_k c_k phi_k(x)
  void forward(std::span<const Complex> coeffs, std::span<Complex> values) const;
  /// h_k = sum_x g_x phi_k(x)   (unconjugated transpose)
  void transpose(std::span<const Complex> values, std::span<Complex> coeffs) const;
  /// h_k = sum_x g_x conj(phi_k(x))
  void adjoint(std::span<const Complex> values, std::span<Complex> coeffs) const;

  std::vector<Complex> forward(std::span<const Complex> coeffs) const;
  std::vector<Complex> transpose(std::span<const Complex> values) const;
  std::vector<Complex> adjoint(std::span<const Complex> values) const;

 private:
  BasisVector basis_;
  std::vector<int> N_;
  std::size_t num_coeffs_ = 0;
  // For every exp-hypercube index l: source index s(l) in I_N^d and its weight.
  std::vector<std::int64_t> source_;
  std::vector<double> weight_;
  NfftPlan plan_;
};

/// Dense factors of Phi(X, I_N^d) = A * D * P^T * Pi^T, all row-major.
///   A    : M x |I^exp|,  exp(2 pi i <l, t(x)>)
///   D    : diagonal over I^exp (stored as a vector), expansion weights
///   Pt   : |I^exp| x |I^exp|, (P^T v)_l = v_{s(l)}
///   PiT  : |I^exp| x |I^d|, embedding of I_N^d into I_N^exp
struct MixedFactors {
  std::size_t rows = 0;
  std::size_t exp_size = 0;
  std::size_t mixed_size = 0;
  std::vector<Complex> A;
  std::vector<double> D;
  std::vector<double> Pt;
  std::vector<double> PiT;
};

MixedFactors mixed_factors(const BasisVector& basis, std::span<const int> N, std::span<const double> nodes);

/// Transformed nodes t(x) for an M x d node array.
std::vector<double> transform_nodes(const BasisVector& basis, std::span<const double> nodes);

/// Real parts of `values`; throws kNumeric if the imaginary parts exceed
/// rel_tol * max|values| (used when all bases are real and inputs are real).
std::vector<double> checked_real(std::span<const Complex> values, double rel_tol = 1e-9);

}  // namespace mixt
