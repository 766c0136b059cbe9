#include "mixt/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "mixt/grouped.hpp"
#include "mixt/lsqr.hpp"
#include "mixt/nfmt.hpp"

namespace mixt {

namespace {

struct Instance {
  BasisVector basis;
  std::vector<int> N;
  std::vector<double> nodes;
  std::size_t M = 0;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  Complex normal() {
    std::normal_distribution<double> g;
    return {g(gen_), g(gen_)};
  }
  std::vector<Complex> normal(std::size_t n) {
    std::vector<Complex> v(n);
    for (auto& z : v) z = normal();
    return v;
  }

 private:
  std::mt19937_64 gen_;
};

Instance random_instance(Rng& rng, int max_dim, int max_log_n, int max_nodes) {
  static constexpr BasisKind kinds[3] = {BasisKind::kExp, BasisKind::kCos, BasisKind::kAlg};
  Instance in;
  const int d = rng.pick(1, max_dim);
  std::vector<BasisKind> b;
  for (int j = 0; j < d; ++j) {
    b.push_back(kinds[rng.pick(0, 2)]);
    in.N.push_back(1 << rng.pick(1, max_log_n));
  }
  in.basis = BasisVector(std::move(b));
  in.M = static_cast<std::size_t>(rng.pick(1, max_nodes));
  in.nodes.resize(in.M * static_cast<std::size_t>(d));
  for (auto& x : in.nodes) x = rng.uniform();
  return in;
}

// Dense Phi(X, I_N^d), M x |I| row-major.
std::vector<Complex> dense_matrix(const BasisVector& basis, std::span<const int> N, std::span<const double> nodes, std::size_t M) {
  const IndexSet I = hypercube_set(basis, N);
  const std::size_t d = basis.dim();
  std::vector<Complex> phi(M * I.size());
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t c = 0; c < I.size(); ++c) phi[i * I.size() + c] = eval_basis(basis, I[c], nodes.subspan(i * d, d));
  }
  return phi;
}

double max_abs(std::span<const Complex> v) {
  double m = 0.0;
  for (auto z : v) m = std::max(m, std::abs(z));
  return m;
}

double rel_inf(std::span<const Complex> got, std::span<const Complex> want) {
  double e = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) e = std::max(e, std::abs(got[i] - want[i]));
  const double s = max_abs(want);
  return s > 0.0 ? e / s : e;
}

Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double norm(std::span<const Complex> a) { return std::sqrt(std::real(dot(a, a))); }

NfftOptions instance_options(const SelftestOptions& o, int i) {
  NfftOptions n = o.nfft;
  if (i % 2 == 1) n.direct_threshold = 0;
  return n;
}

}  // namespace

std::vector<SuiteResult> run_selftest(const SelftestOptions& o) {
  std::vector<SuiteResult> out;
  SuiteResult fwd{"nfmt forward vs direct", 0, 0.0, 1e-8, true};
  SuiteResult adj{"nfmt adjoint vs direct", 0, 0.0, 1e-8, true};
  SuiteResult pair{"adjoint pairing", 0, 0.0, 1e-10, true};
  SuiteResult fac{"factorization A D P^T Pi^T", 0, 0.0, 1e-12, true};
  SuiteResult grp{"grouped vs direct", 0, 0.0, 1e-9, true};
  SuiteResult ls{"lsqr consistent systems", 0, 0.0, 1e-6, true};

  Rng rng(o.seed);
  for (int i = 0; i < o.instances; ++i) {
    const Instance in = random_instance(rng, 4, 4, 100);
    const MixedTransform T(in.basis, in.N, in.nodes, instance_options(o, i));
    const std::size_t n = T.num_coeffs();
    const auto phi = dense_matrix(in.basis, in.N, in.nodes, in.M);
    const auto c = rng.normal(n);
    const auto g = rng.normal(in.M);

    std::vector<Complex> want(in.M, 0.0), want_adj(n, 0.0);
    for (std::size_t r = 0; r < in.M; ++r) {
      for (std::size_t k = 0; k < n; ++k) {
        want[r] += phi[r * n + k] * c[k];
        want_adj[k] += std::conj(phi[r * n + k]) * g[r];
      }
    }
    const auto got = T.forward(c);
    const auto got_adj = T.adjoint(g);
    fwd.max_error = std::max(fwd.max_error, rel_inf(got, want));
    adj.max_error = std::max(adj.max_error, rel_inf(got_adj, want_adj));
    const double gap = std::abs(dot(got, g) - dot(c, got_adj)) / (norm(got) * norm(g) + 1e-300);
    pair.max_error = std::max(pair.max_error, gap);
    ++fwd.cases, ++adj.cases, ++pair.cases;
  }

  for (int i = 0; i < o.instances; ++i) {
    const Instance in = random_instance(rng, 3, 3, 50);
    const MixedFactors f = mixed_factors(in.basis, in.N, in.nodes);
    const auto phi = dense_matrix(in.basis, in.N, in.nodes, in.M);
    // B = D * P^T * Pi^T  (exp_size x mixed_size), then A * B.
    std::vector<Complex> prod(f.rows * f.mixed_size, 0.0);
    std::vector<double> B(f.exp_size * f.mixed_size, 0.0);
    for (std::size_t l = 0; l < f.exp_size; ++l) {
      for (std::size_t q = 0; q < f.exp_size; ++q) {
        const double p = f.Pt[l * f.exp_size + q];
        if (p == 0.0) continue;
        for (std::size_t k = 0; k < f.mixed_size; ++k) B[l * f.mixed_size + k] += f.D[l] * p * f.PiT[q * f.mixed_size + k];
      }
    }
    for (std::size_t r = 0; r < f.rows; ++r) {
      for (std::size_t l = 0; l < f.exp_size; ++l) {
        const Complex a = f.A[r * f.exp_size + l];
        for (std::size_t k = 0; k < f.mixed_size; ++k) prod[r * f.mixed_size + k] += a * B[l * f.mixed_size + k];
      }
    }
    double e = 0.0;
    for (std::size_t q = 0; q < prod.size(); ++q) e = std::max(e, std::abs(prod[q] - phi[q]));
    fac.max_error = std::max(fac.max_error, e);
    ++fac.cases;
  }

  for (int i = 0; i < std::max(1, o.instances / 2); ++i) {
    const Instance in = random_instance(rng, 4, 3, 80);
    const int d = static_cast<int>(in.basis.dim());
    const int params[2] = {2 * rng.pick(1, 4), 2 * rng.pick(1, 2)};
    const SubsetFamily fam = apply_convention(
        superposition_family(d, std::min(d, 2), std::span<const int>(params, static_cast<std::size_t>(std::min(d, 2)))), in.basis,
        BandwidthConvention::kFrequencyCount);
    const GroupedIndexSet set(in.basis, fam);
    GroupedOptions go;
    go.nfft = instance_options(o, i);
    const GroupedTransform G(set, in.nodes, go);
    const auto c = rng.normal(G.num_coeffs());
    grp.max_error = std::max(grp.max_error, rel_inf(G.forward(c), grouped_direct(set, in.nodes, c)));
    ++grp.cases;
  }

  for (int i = 0; i < std::max(1, o.instances / 2); ++i) {
    const std::size_t cols = static_cast<std::size_t>(rng.pick(1, 32));
    const std::size_t rows = cols + static_cast<std::size_t>(rng.pick(0, 32));
    const auto A = rng.normal(rows * cols);
    const auto x0 = rng.normal(cols);
    std::vector<Complex> b(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t k = 0; k < cols; ++k) b[r] += A[r * cols + k] * x0[k];
    }
    LinearOperator op{rows, cols,
                      [&](std::span<const Complex> x, std::span<Complex> y) {
                        for (std::size_t r = 0; r < rows; ++r) {
                          Complex s = 0.0;
                          for (std::size_t k = 0; k < cols; ++k) s += A[r * cols + k] * x[k];
                          y[r] = s;
                        }
                      },
                      [&](std::span<const Complex> y, std::span<Complex> x) {
                        for (std::size_t k = 0; k < cols; ++k) {
                          Complex s = 0.0;
                          for (std::size_t r = 0; r < rows; ++r) s += std::conj(A[r * cols + k]) * y[r];
                          x[k] = s;
                        }
                      }};
    LsqrOptions lo;
    lo.max_iter = static_cast<int>(20 * cols + 50);
    lo.atol = lo.btol = 1e-14;
    const auto rep = lsqr(op, b, lo);
    std::vector<Complex> diff(cols);
    for (std::size_t k = 0; k < cols; ++k) diff[k] = rep.solution[k] - x0[k];
    ls.max_error = std::max(ls.max_error, norm(diff) / norm(x0));
    ++ls.cases;
  }

  for (SuiteResult* s : {&fwd, &adj, &pair, &fac, &grp, &ls}) {
    s->pass = std::isfinite(s->max_error) && s->max_error <= s->tolerance;
    out.push_back(*s);
  }
  return out;
}

}  // namespace mixt
