#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mixt/basis.hpp"
#include "mixt/error.hpp"
#include "oracles.hpp"

using mixt::BasisKind;
using mixt::BasisVector;
using mixt::Complex;

TEST(Basis, OneDimensionalValues) {
  EXPECT_NEAR(std::abs(mixt::eval_basis_1d(BasisKind::kCos, 0, 0.37) - Complex(1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(mixt::eval_basis_1d(BasisKind::kExp, 1, 0.25) - Complex(0.0, 1.0)), 0.0, 1e-15);
  EXPECT_NEAR(mixt::eval_basis_1d(BasisKind::kAlg, 1, 0.0).real(), -std::numbers::sqrt2, 1e-15);
}

TEST(Basis, OneDimensionalMatchesRecurrence) {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto kind : {BasisKind::kExp, BasisKind::kCos, BasisKind::kAlg}) {
    for (int k = 0; k < 40; ++k) {
      const int kk = kind == BasisKind::kExp ? k - 20 : k;
      const double x = u(g);
      EXPECT_NEAR(std::abs(mixt::eval_basis_1d(kind, kk, x) - oracle::phi1(kind, kk, x)), 0.0, 1e-12) << int(kind) << " k=" << kk;
    }
  }
}

TEST(Basis, NegativeFrequencyRejectedForNonPeriodic) {
  EXPECT_THROW(mixt::eval_basis_1d(BasisKind::kCos, -1, 0.2), mixt::Error);
  EXPECT_THROW(mixt::eval_basis_1d(BasisKind::kAlg, 1, 1.5), mixt::Error);
}

TEST(Basis, TensorProduct) {
  const BasisVector ec = BasisVector::parse("exp,cos");
  const double x0[2] = {0.31, 0.77};
  const int k0[2] = {0, 0};
  EXPECT_NEAR(std::abs(mixt::eval_basis(ec, k0, x0) - Complex(1.0)), 0.0, 1e-15);
  const double x1[2] = {0.25, 0.0};
  const int k1[2] = {1, 1};
  EXPECT_NEAR(std::abs(mixt::eval_basis(ec, k1, x1) - Complex(0.0, std::numbers::sqrt2)), 0.0, 1e-14);

  const BasisVector eac = BasisVector::parse("exp,alg,cos");
  std::mt19937_64 g(5);
  std::uniform_int_distribution<int> kd(0, 9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const int k[3] = {kd(g) - 5, kd(g), kd(g)};
    const double x[3] = {u(g), u(g), u(g)};
    const Complex want = mixt::eval_basis_1d(BasisKind::kExp, k[0], x[0]) * mixt::eval_basis_1d(BasisKind::kAlg, k[1], x[1]) *
                         mixt::eval_basis_1d(BasisKind::kCos, k[2], x[2]);
    EXPECT_NEAR(std::abs(mixt::eval_basis(eac, k, x) - want), 0.0, 1e-13);
  }
}

TEST(Basis, Weight) {
  const double x[2] = {0.5, 0.5};
  EXPECT_DOUBLE_EQ(mixt::eval_weight(BasisVector::parse("exp,cos"), x), 1.0);
  EXPECT_NEAR(mixt::eval_weight(BasisVector::parse("alg"), std::span<const double>(x, 1)), 2.0 / std::numbers::pi, 1e-15);
  EXPECT_NEAR(mixt::eval_weight(BasisVector::parse("alg,alg"), x), 4.0 / (std::numbers::pi * std::numbers::pi), 1e-15);
}

TEST(Basis, NodeTransform) {
  EXPECT_DOUBLE_EQ(mixt::node_transform_1d(BasisKind::kCos, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(mixt::node_transform_1d(BasisKind::kAlg, 1.0), 0.0);
  EXPECT_NEAR(mixt::node_transform_1d(BasisKind::kAlg, 0.5), 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(mixt::node_transform_1d(BasisKind::kExp, 0.3), 0.3);
}

// sqrt(2) cos(pi k x) and sqrt(2) T_k(2x-1) are both sqrt(2)/2 (e^{2 pi i k t} + e^{-2 pi i k t}) at t = t(x).
TEST(Basis, TransformedNodesTurnRealBasesIntoExponentials) {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto kind : {BasisKind::kCos, BasisKind::kAlg}) {
    for (int t = 0; t < 100; ++t) {
      const double x = u(g);
      const int k = 1 + t % 17;
      const double s = mixt::node_transform_1d(kind, x);
      const Complex viaexp = std::numbers::sqrt2 / 2.0 * (std::polar(1.0, 2 * std::numbers::pi * k * s) + std::polar(1.0, -2 * std::numbers::pi * k * s));
      EXPECT_NEAR(std::abs(mixt::eval_basis_1d(kind, k, x) - viaexp), 0.0, 1e-12);
    }
  }
}

// Orthonormality with exact quadrature rules: midpoint rule for exp/cos, Gauss-Chebyshev for alg.
TEST(Basis, Orthonormality) {
  const int K = 64;
  for (auto kind : {BasisKind::kExp, BasisKind::kCos, BasisKind::kAlg}) {
    std::vector<double> x(K);
    for (int i = 0; i < K; ++i) {
      x[i] = kind == BasisKind::kAlg ? (1.0 + std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * K))) / 2.0 : (i + 0.5) / K;
    }
    const int lo = kind == BasisKind::kExp ? -8 : 0;
    for (int k = lo; k < 8; ++k) {
      for (int l = lo; l < 8; ++l) {
        Complex s = 0.0;
        for (double xi : x) s += mixt::eval_basis_1d(kind, k, xi) * std::conj(mixt::eval_basis_1d(kind, l, xi));
        s /= K;
        EXPECT_NEAR(std::abs(s - Complex(k == l ? 1.0 : 0.0)), 0.0, 1e-12) << int(kind) << " " << k << " " << l;
      }
    }
  }
}

TEST(Basis, ParseAndFormat) {
  const BasisVector b = BasisVector::parse(" exp, alg ,cos");
  ASSERT_EQ(b.dim(), 3u);
  EXPECT_EQ(b[1], BasisKind::kAlg);
  EXPECT_EQ(b.to_string(), "exp,alg,cos");
  EXPECT_THROW(BasisVector::parse("exp,sin"), mixt::Error);
  EXPECT_THROW(BasisVector::parse(""), mixt::Error);
  const int dims[2] = {0, 2};
  EXPECT_EQ(b.project(dims).to_string(), "exp,cos");
}
