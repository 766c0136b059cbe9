#include "mixt/basis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mixt/error.hpp"

namespace mixt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

void check_unit_interval(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    fail(ErrorCode::kDomain, "coordinate " + std::to_string(x) + " outside [0,1]");
  }
}

// arccos(2x-1) with the argument clamped; x = 0 or 1 may round just outside [-1,1].
double chebyshev_angle(double x) { return std::acos(std::clamp(2.0 * x - 1.0, -1.0, 1.0)); }

}  // namespace

std::string_view to_string(BasisKind kind) noexcept {
  switch (kind) {
    case BasisKind::kExp: return "exp";
    case BasisKind::kCos: return "cos";
    case BasisKind::kAlg: return "alg";
  }
  return "?";
}

BasisKind parse_basis_kind(std::string_view token) {
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) token.remove_prefix(1);
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.remove_suffix(1);
  if (token == "exp") return BasisKind::kExp;
  if (token == "cos") return BasisKind::kCos;
  if (token == "alg" || token == "cheb") return BasisKind::kAlg;
  fail(ErrorCode::kParse, "unknown basis kind '" + std::string(token) + "' (expected exp, cos or alg)");
}

BasisVector::BasisVector(std::vector<BasisKind> kinds) : kinds_(std::move(kinds)) {
  if (kinds_.empty()) fail(ErrorCode::kShape, "basis vector must have at least one dimension");
}

BasisVector BasisVector::parse(std::string_view text) {
  std::vector<BasisKind> kinds;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    kinds.push_back(parse_basis_kind(text.substr(start, comma - start)));
    start = comma + 1;
  }
  return BasisVector(std::move(kinds));
}

BasisVector BasisVector::uniform(BasisKind kind, std::size_t dim) {
  return BasisVector(std::vector<BasisKind>(dim, kind));
}

bool BasisVector::all_exp() const noexcept {
  return std::all_of(kinds_.begin(), kinds_.end(), is_periodic);
}

bool BasisVector::any_exp() const noexcept {
  return std::any_of(kinds_.begin(), kinds_.end(), is_periodic);
}

BasisVector BasisVector::project(std::span<const int> dims) const {
  std::vector<BasisKind> sub;
  sub.reserve(dims.size());
  for (int j : dims) sub.push_back(kinds_.at(static_cast<std::size_t>(j)));
  BasisVector out;
  out.kinds_ = std::move(sub);
  return out;
}

std::string BasisVector::to_string() const {
  std::ostringstream os;
  for (std::size_t j = 0; j < kinds_.size(); ++j) {
    if (j) os << ',';
    os << mixt::to_string(kinds_[j]);
  }
  return os.str();
}

Complex eval_basis_1d(BasisKind kind, int k, double x) {
  if (kind != BasisKind::kExp) {
    if (k < 0) fail(ErrorCode::kDomain, "negative frequency for a non-periodic basis");
    check_unit_interval(x);
  }
  if (k == 0) return {1.0, 0.0};
  switch (kind) {
    case BasisKind::kExp: {
      const double arg = 2.0 * kPi * static_cast<double>(k) * x;
      return {std::cos(arg), std::sin(arg)};
    }
    case BasisKind::kCos:
      return {kSqrt2 * std::cos(kPi * static_cast<double>(k) * x), 0.0};
    case BasisKind::kAlg:
      return {kSqrt2 * std::cos(static_cast<double>(k) * chebyshev_angle(x)), 0.0};
  }
  return {};
}

Complex eval_basis(const BasisVector& basis, std::span<const int> k, std::span<const double> x) {
  if (k.size() != basis.dim() || x.size() != basis.dim()) {
    fail(ErrorCode::kShape, "eval_basis: dimension mismatch between basis, frequency and node");
  }
  Complex value{1.0, 0.0};
  for (std::size_t j = 0; j < basis.dim(); ++j) value *= eval_basis_1d(basis[j], k[j], x[j]);
  return value;
}

double eval_weight(const BasisVector& basis, std::span<const double> x) {
  if (x.size() != basis.dim()) fail(ErrorCode::kShape, "eval_weight: dimension mismatch");
  double w = 1.0;
  for (std::size_t j = 0; j < basis.dim(); ++j) {
    if (basis[j] != BasisKind::kAlg) continue;
    check_unit_interval(x[j]);
    const double s = x[j] - x[j] * x[j];
    if (s <= 0.0) fail(ErrorCode::kSingularity, "Chebyshev weight diverges at the interval end points");
    w *= 1.0 / (kPi * std::sqrt(s));
  }
  return w;
}

double node_transform_1d(BasisKind kind, double x) noexcept {
  switch (kind) {
    case BasisKind::kExp: return x;
    case BasisKind::kCos: return 0.5 * x;
    case BasisKind::kAlg: return chebyshev_angle(x) / (2.0 * kPi);
  }
  return x;
}

std::vector<double> node_transform(const BasisVector& basis, std::span<const double> x) {
  if (x.size() != basis.dim()) fail(ErrorCode::kShape, "node_transform: dimension mismatch");
  std::vector<double> t(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) t[j] = node_transform_1d(basis[j], canonical_coordinate(basis[j], x[j]));
  return t;
}

double canonical_coordinate(BasisKind kind, double x) {
  if (!std::isfinite(x)) fail(ErrorCode::kDomain, "non-finite coordinate");
  if (kind == BasisKind::kExp) {
    double r = x - std::floor(x);
    if (r >= 1.0) r = 0.0;
    return r;
  }
  check_unit_interval(x);
  return x;
}

}  // namespace mixt
