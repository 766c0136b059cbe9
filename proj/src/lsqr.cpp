#include "mixt/lsqr.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "mixt/error.hpp"

namespace mixt {

namespace {

double norm2(std::span<const Complex> v) {
  // Scaled accumulation keeps this safe for very large or small entries.
  double scale = 0.0, ssq = 1.0;
  for (const auto& z : v) {
    for (double a : {std::abs(z.real()), std::abs(z.imag())}) {
      if (a == 0.0) continue;
      if (scale < a) {
        ssq = 1.0 + ssq * (scale / a) * (scale / a);
        scale = a;
      } else {
        ssq += (a / scale) * (a / scale);
      }
    }
  }
  return scale * std::sqrt(ssq);
}

Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s;
}

void scale(std::span<Complex> v, double s) {
  for (auto& z : v) z *= s;
}

void check_finite(std::span<const Complex> v, const char* what) {
  for (const auto& z : v) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail(ErrorCode::kNumeric, std::string("lsqr: non-finite ") + what);
  }
}

}  // namespace

std::string_view to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::kZeroRhs: return "zero-rhs";
    case StopReason::kAtol: return "atol";
    case StopReason::kBtol: return "btol";
    case StopReason::kIterationCap: return "iteration-cap";
    case StopReason::kStagnation: return "stagnation";
  }
  return "?";
}

void check_adjoint(const LinearOperator& op, std::uint64_t seed, double tol) {
  if (!op.forward || !op.adjoint) fail(ErrorCode::kPrecondition, "operator is missing forward or adjoint");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Complex> x(op.cols), y(op.rows), ax(op.rows), ahy(op.cols);
  for (auto& z : x) z = {normal(rng), normal(rng)};
  for (auto& z : y) z = {normal(rng), normal(rng)};
  op.forward(x, ax);
  op.adjoint(y, ahy);
  const Complex lhs = dot(ax, y);
  const Complex rhs = dot(x, ahy);
  const double ref = std::max(norm2(ax) * norm2(y), norm2(x) * norm2(ahy));
  if (std::abs(lhs - rhs) > tol * ref) {
    fail(ErrorCode::kAdjointMismatch, "operator adjoint check failed: |<Ax,y> - <x,A^H y>| = " + std::to_string(std::abs(lhs - rhs)) +
                                          " relative " + std::to_string(std::abs(lhs - rhs) / ref));
  }
}

SolveReport lsqr(const LinearOperator& op, std::span<const Complex> rhs, const LsqrOptions& options) {
  if (rhs.size() != op.rows) fail(ErrorCode::kShape, "lsqr: right-hand side length differs from operator rows");
  if (options.max_iter < 0 || options.damping < 0.0) fail(ErrorCode::kDomain, "lsqr: invalid options");
  check_finite(rhs, "right-hand side");
  if (options.self_test && op.rows > 0 && op.cols > 0) check_adjoint(op, options.self_test_seed, options.self_test_tol);

  const std::size_t m = op.rows, n = op.cols;
  SolveReport report;
  report.solution.assign(n, Complex{});
  std::vector<Complex>& x = report.solution;
  std::vector<Complex> u(rhs.begin(), rhs.end()), v(n), w(n), tmp_m(m), tmp_n(n);

  double beta = norm2(u);
  const double bnorm = beta;
  report.residual_history.push_back(beta);
  if (beta == 0.0) {
    report.stop = StopReason::kZeroRhs;
    return report;
  }
  scale(u, 1.0 / beta);
  op.adjoint(u, v);
  double alpha = norm2(v);
  if (alpha == 0.0) {
    // A^H b = 0: x = 0 already solves the least-squares problem.
    report.stop = StopReason::kAtol;
    report.residual_norm = bnorm;
    return report;
  }
  scale(v, 1.0 / alpha);
  w = v;

  const double damp = options.damping, dampsq = damp * damp;
  const double eps = std::numeric_limits<double>::epsilon();
  double anorm = 0.0, ddnorm = 0.0, xxnorm = 0.0, res2 = 0.0, z = 0.0;
  double cs2 = -1.0, sn2 = 0.0;
  double rhobar = alpha, phibar = beta;
  double rnorm = beta, arnorm = alpha * beta, xnorm = 0.0;

  report.stop = StopReason::kIterationCap;
  for (int itn = 1; itn <= options.max_iter; ++itn) {
    report.iterations = itn;
    op.forward(v, tmp_m);
    for (std::size_t i = 0; i < m; ++i) u[i] = tmp_m[i] - alpha * u[i];
    beta = norm2(u);
    if (beta > 0.0) {
      scale(u, 1.0 / beta);
      anorm = std::sqrt(anorm * anorm + alpha * alpha + beta * beta + dampsq);
      op.adjoint(u, tmp_n);
      for (std::size_t k = 0; k < n; ++k) v[k] = tmp_n[k] - beta * v[k];
      alpha = norm2(v);
      if (alpha > 0.0) scale(v, 1.0 / alpha);
    } else {
      anorm = std::sqrt(anorm * anorm + alpha * alpha + dampsq);
    }
    check_finite(v, "iterate");

    double rhobar1 = rhobar, psi = 0.0;
    if (damp > 0.0) {
      rhobar1 = std::hypot(rhobar, damp);
      const double cs1 = rhobar / rhobar1, sn1 = damp / rhobar1;
      psi = sn1 * phibar;
      phibar = cs1 * phibar;
    }
    const double rho = std::hypot(rhobar1, beta);
    const double cs = rhobar1 / rho, sn = beta / rho;
    const double theta = sn * alpha;
    rhobar = -cs * alpha;
    const double phi = cs * phibar;
    phibar = sn * phibar;
    const double tau = sn * phi;

    const double t1 = phi / rho, t2 = -theta / rho;
    double dk2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const Complex dk = w[k] / rho;
      dk2 += std::norm(dk);
      x[k] += t1 * w[k];
      w[k] = v[k] + t2 * w[k];
    }
    ddnorm += dk2;

    const double delta = sn2 * rho, gambar = -cs2 * rho;
    const double rhs_z = phi - delta * z;
    const double zbar = rhs_z / gambar;
    xnorm = std::sqrt(xxnorm + zbar * zbar);
    const double gamma = std::hypot(gambar, theta);
    cs2 = gambar / gamma;
    sn2 = theta / gamma;
    z = rhs_z / gamma;
    xxnorm += z * z;

    const double acond = anorm * std::sqrt(ddnorm);
    res2 += psi * psi;
    rnorm = std::sqrt(phibar * phibar + res2);
    arnorm = alpha * std::abs(tau);
    report.residual_history.push_back(rnorm);

    const double test1 = rnorm / bnorm;
    const double test2 = arnorm / (anorm * rnorm + eps);
    const double test3 = 1.0 / (acond + eps);
    const double t1n = test1 / (1.0 + anorm * xnorm / bnorm);
    const double rtol = options.btol + options.atol * anorm * xnorm / bnorm;

    if (1.0 + test3 <= 1.0 || 1.0 + test2 <= 1.0 || 1.0 + t1n <= 1.0) {
      report.stop = StopReason::kStagnation;
      break;
    }
    if (test2 <= options.atol) {
      report.stop = StopReason::kAtol;
      break;
    }
    if (test1 <= rtol) {
      report.stop = StopReason::kBtol;
      break;
    }
    if (beta == 0.0 && alpha == 0.0) {
      report.stop = StopReason::kStagnation;
      break;
    }
  }

  report.normal_residual_norm = arnorm;
  op.forward(x, tmp_m);
  for (std::size_t i = 0; i < m; ++i) tmp_m[i] = rhs[i] - tmp_m[i];
  report.residual_norm = norm2(tmp_m);
  check_finite(x, "solution");
  return report;
}

}  // namespace mixt
