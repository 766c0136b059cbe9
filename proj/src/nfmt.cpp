#include "mixt/nfmt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mixt/error.hpp"

namespace mixt {

namespace {

struct Folding {
  std::size_t exp_size = 0;
  std::size_t mixed_size = 0;
  std::vector<std::int64_t> source;  // index into I_N^d
  std::vector<std::int64_t> embed;   // I_N^exp position of source (for the dense factors)
  std::vector<double> weight;
};

void check_shape(const BasisVector& basis, std::span<const int> N) {
  if (N.size() != basis.dim()) fail(ErrorCode::kShape, "bandwidth length does not match the basis dimension");
  for (int n : N) {
    if (n <= 0 || n % 2 != 0) fail(ErrorCode::kInvalidBandwidth, "bandwidths must be even and positive");
  }
}

Folding build_folding(const BasisVector& basis, std::span<const int> N) {
  const std::size_t d = basis.dim();
  std::vector<std::int64_t> mixed_stride(d, 1), exp_stride(d, 1);
  for (std::size_t j = d; j-- > 1;) {
    const int mixed_len = is_periodic(basis[j]) ? N[j] : N[j] / 2;
    mixed_stride[j - 1] = mixed_stride[j] * mixed_len;
    exp_stride[j - 1] = exp_stride[j] * N[j];
  }
  Folding f;
  f.exp_size = static_cast<std::size_t>(exp_stride[0] * N[0]);
  f.mixed_size = static_cast<std::size_t>(mixed_stride[0] * (is_periodic(basis[0]) ? N[0] : N[0] / 2));
  f.source.resize(f.exp_size);
  f.embed.resize(f.exp_size);
  f.weight.resize(f.exp_size);

  const double half_sqrt2 = std::numbers::sqrt2 / 2.0;
  std::vector<int> a(d, 0);  // exp index offsets, k_j = a_j - N_j/2
  for (std::size_t l = 0; l < f.exp_size; ++l) {
    std::int64_t src = 0, emb = 0;
    double w = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      const int k = a[j] - N[j] / 2;
      int s = 0;
      if (is_periodic(basis[j])) {
        s = a[j];
        emb += static_cast<std::int64_t>(a[j]) * exp_stride[j];
      } else {
        if (k == -N[j] / 2) {
          w = 0.0;
          s = 0;
        } else {
          s = std::abs(k);
          if (k != 0) w *= half_sqrt2;
#ifdef MIXT_FAULT_EXPANSION_SIGN
          if (k < 0) w = -w;
#endif
        }
        emb += static_cast<std::int64_t>(s + N[j] / 2) * exp_stride[j];
      }
      src += static_cast<std::int64_t>(s) * mixed_stride[j];
    }
    f.source[l] = src;
    f.embed[l] = emb;
    f.weight[l] = w;
    for (std::size_t j = d; j-- > 0;) {
      if (++a[j] < N[j]) break;
      a[j] = 0;
    }
  }
  return f;
}

}  // namespace

std::vector<double> transform_nodes(const BasisVector& basis, std::span<const double> nodes) {
  const std::size_t d = basis.dim();
  if (d == 0 || nodes.size() % d != 0) fail(ErrorCode::kShape, "node array length is not a multiple of the dimension");
  std::vector<double> t(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const BasisKind kind = basis[i % d];
    t[i] = node_transform_1d(kind, canonical_coordinate(kind, nodes[i]));
  }
  return t;
}

std::vector<Complex> expand_coefficients(const BasisVector& basis, std::span<const int> N, std::span<const Complex> coeffs) {
  check_shape(basis, N);
  const Folding f = build_folding(basis, N);
  if (coeffs.size() != f.mixed_size) fail(ErrorCode::kShape, "expand_coefficients: coefficient length mismatch");
  std::vector<Complex> out(f.exp_size);
  for (std::size_t l = 0; l < f.exp_size; ++l) {
    if (f.weight[l] != 0.0) out[l] = f.weight[l] * coeffs[static_cast<std::size_t>(f.source[l])];
  }
  return out;
}

MixedTransform::MixedTransform(BasisVector basis, std::vector<int> N, std::span<const double> nodes, NfftOptions options)
    : basis_(std::move(basis)),
      N_(std::move(N)),
      plan_((check_shape(basis_, N_), N_), transform_nodes(basis_, nodes), options) {
  Folding f = build_folding(basis_, N_);
  num_coeffs_ = f.mixed_size;
  source_ = std::move(f.source);
  weight_ = std::move(f.weight);
}

void MixedTransform::forward(std::span<const Complex> coeffs, std::span<Complex> values) const {
  if (coeffs.size() != num_coeffs_ || values.size() != num_nodes()) fail(ErrorCode::kShape, "nfmt forward: shape mismatch");
  std::vector<Complex> expanded(source_.size());
  for (std::size_t l = 0; l < source_.size(); ++l) {
    if (weight_[l] != 0.0) expanded[l] = weight_[l] * coeffs[static_cast<std::size_t>(source_[l])];
  }
  plan_.forward(expanded, values);
}

void MixedTransform::transpose(std::span<const Complex> values, std::span<Complex> coeffs) const {
  if (coeffs.size() != num_coeffs_ || values.size() != num_nodes()) fail(ErrorCode::kShape, "nfmt transpose: shape mismatch");
  std::vector<Complex> expanded(source_.size());
  plan_.transpose(values, expanded);
  std::fill(coeffs.begin(), coeffs.end(), Complex{});
  for (std::size_t l = 0; l < source_.size(); ++l) {
    if (weight_[l] != 0.0) coeffs[static_cast<std::size_t>(source_[l])] += weight_[l] * expanded[l];
  }
}

void MixedTransform::adjoint(std::span<const Complex> values, std::span<Complex> coeffs) const {
  std::vector<Complex> conj_values(values.size());
  std::transform(values.begin(), values.end(), conj_values.begin(), [](Complex v) { return std::conj(v); });
  transpose(conj_values, coeffs);
  for (auto& c : coeffs) c = std::conj(c);
}

std::vector<Complex> MixedTransform::forward(std::span<const Complex> coeffs) const {
  std::vector<Complex> out(num_nodes());
  forward(coeffs, out);
  return out;
}

std::vector<Complex> MixedTransform::transpose(std::span<const Complex> values) const {
  std::vector<Complex> out(num_coeffs_);
  transpose(values, out);
  return out;
}

std::vector<Complex> MixedTransform::adjoint(std::span<const Complex> values) const {
  std::vector<Complex> out(num_coeffs_);
  adjoint(values, out);
  return out;
}

MixedFactors mixed_factors(const BasisVector& basis, std::span<const int> N, std::span<const double> nodes) {
  check_shape(basis, N);
  const std::size_t d = basis.dim();
  const std::vector<double> t = transform_nodes(basis, nodes);
  const Folding f = build_folding(basis, N);
  MixedFactors out;
  out.rows = nodes.size() / d;
  out.exp_size = f.exp_size;
  out.mixed_size = f.mixed_size;

  const IndexSet exp_set = hypercube_set(BasisVector::uniform(BasisKind::kExp, d), N);
  out.A.resize(out.rows * out.exp_size);
  for (std::size_t i = 0; i < out.rows; ++i) {
    for (std::size_t l = 0; l < out.exp_size; ++l) {
      const auto k = exp_set[l];
      double arg = 0.0;
      for (std::size_t j = 0; j < d; ++j) arg += k[j] * t[i * d + j];
      arg *= 2.0 * std::numbers::pi;
      out.A[i * out.exp_size + l] = {std::cos(arg), std::sin(arg)};
    }
  }
  out.D = f.weight;
  out.Pt.assign(out.exp_size * out.exp_size, 0.0);
  for (std::size_t l = 0; l < out.exp_size; ++l) out.Pt[l * out.exp_size + static_cast<std::size_t>(f.embed[l])] = 1.0;

  // Pi^T: the mixed index k sits at the exp position with the same k.
  const IndexSet mixed_set = hypercube_set(basis, N);
  std::vector<std::int64_t> exp_stride(d, 1);
  for (std::size_t j = d; j-- > 1;) exp_stride[j - 1] = exp_stride[j] * N[j];
  out.PiT.assign(out.exp_size * out.mixed_size, 0.0);
  for (std::size_t c = 0; c < out.mixed_size; ++c) {
    const auto k = mixed_set[c];
    std::int64_t pos = 0;
    for (std::size_t j = 0; j < d; ++j) pos += static_cast<std::int64_t>(k[j] + N[j] / 2) * exp_stride[j];
    out.PiT[static_cast<std::size_t>(pos) * out.mixed_size + c] = 1.0;
  }
  return out;
}

std::vector<double> checked_real(std::span<const Complex> values, double rel_tol) {
  double scale = 0.0, worst = 0.0;
  for (const auto& v : values) {
    scale = std::max(scale, std::abs(v));
    worst = std::max(worst, std::abs(v.imag()));
  }
  if (worst > rel_tol * scale) {
    fail(ErrorCode::kNumeric, "imaginary part " + std::to_string(worst) + " exceeds tolerance for a real-valued transform");
  }
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [](Complex v) { return v.real(); });
  return out;
}

}  // namespace mixt
