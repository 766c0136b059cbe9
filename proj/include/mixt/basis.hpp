#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mixt {

using Complex = std::complex<double>;

/// One-dimensional basis family. `exp` lives on the torus with frequencies in Z,
/// `cos` (half-period cosine) and `alg` (Chebyshev) live on [0,1] with
/// frequencies in N0.
enum class BasisKind { kExp, kCos, kAlg };

std::string_view to_string(BasisKind kind) noexcept;
BasisKind parse_basis_kind(std::string_view token);

inline bool is_periodic(BasisKind kind) noexcept { return kind == BasisKind::kExp; }

/// Per-dimension basis tags. Immutable after construction.
class BasisVector {
 public:
  BasisVector() = default;
  explicit BasisVector(std::vector<BasisKind> kinds);

  /// Parses a comma separated list such as "exp,alg,cos,alg".
  static BasisVector parse(std::string_view text);
  static BasisVector uniform(BasisKind kind, std::size_t dim);

  std::size_t dim() const noexcept { return kinds_.size(); }
  BasisKind operator[](std::size_t j) const { return kinds_[j]; }
  std::span<const BasisKind> kinds() const noexcept { return kinds_; }
  bool all_exp() const noexcept;
  bool any_exp() const noexcept;

  /// Sub-vector restricted to the given (sorted, 0-based) dimensions.
  BasisVector project(std::span<const int> dims) const;

  std::string to_string() const;
  friend bool operator==(const BasisVector&, const BasisVector&) = default;

 private:
  std::vector<BasisKind> kinds_;
};

/// phi_k(x) for a single dimension. Negative k is rejected for cos/alg.
Complex eval_basis_1d(BasisKind kind, int k, double x);

/// Tensor product of eval_basis_1d over all dimensions.
Complex eval_basis(const BasisVector& basis, std::span<const int> k, std::span<const double> x);

/// Product of the Chebyshev densities 1/(pi sqrt(x - x^2)) over alg dimensions.
/// Throws a singularity error when an alg coordinate sits on 0 or 1.
double eval_weight(const BasisVector& basis, std::span<const double> x);

/// Maps a node of the mixed domain to the torus so that the mixed polynomial
/// becomes an ordinary trigonometric polynomial: identity for exp, x/2 for cos,
/// arccos(2x-1)/(2pi) for alg.
double node_transform_1d(BasisKind kind, double x) noexcept;
std::vector<double> node_transform(const BasisVector& basis, std::span<const double> x);

/// Validates one coordinate for its basis kind: exp coordinates are reduced
/// into [0,1), others must lie in [0,1]. Returns the stored value.
double canonical_coordinate(BasisKind kind, double x);

}  // namespace mixt
