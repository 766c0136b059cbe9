#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "mixt/basis.hpp"

namespace mixt {

/// Matrix-free operator: `forward` applies A (cols -> rows), `adjoint` applies A^H.
struct LinearOperator {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::function<void(std::span<const Complex>, std::span<Complex>)> forward;
  std::function<void(std::span<const Complex>, std::span<Complex>)> adjoint;
};

struct LsqrOptions {
  int max_iter = 50;
  double atol = 1e-8;
  double btol = 1e-8;
  double damping = 0.0;
  bool self_test = true;           // randomized <Ax, y> = <x, A^H y> check before iterating
  double self_test_tol = 1e-8;
  std::uint64_t self_test_seed = 20240611;
};

enum class StopReason { kZeroRhs, kAtol, kBtol, kIterationCap, kStagnation };
std::string_view to_string(StopReason reason) noexcept;

struct SolveReport {
  std::vector<Complex> solution;
  int iterations = 0;
  double residual_norm = 0.0;         // true ||b - A x||, recomputed at exit
  double normal_residual_norm = 0.0;  // LSQR estimate of ||A^H r - damping^2 x||
  StopReason stop = StopReason::kIterationCap;
  std::vector<double> residual_history;  // recurrence estimates, one per iteration (plus the initial ||b||)
};

/// Throws kAdjointMismatch when |<Ax, y> - <x, A^H y>| > tol * ||Ax|| ||y|| for random x, y.
void check_adjoint(const LinearOperator& op, std::uint64_t seed, double tol = 1e-8);

/// Complex LSQR (Golub-Kahan bidiagonalization) for min ||b - A x||^2 + damping^2 ||x||^2.
SolveReport lsqr(const LinearOperator& op, std::span<const Complex> rhs, const LsqrOptions& options = {});

}  // namespace mixt
