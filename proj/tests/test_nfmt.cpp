#include <gtest/gtest.h>

#include <random>

#include "mixt/error.hpp"
#include "mixt/index_sets.hpp"
#include "mixt/nfmt.hpp"
#include "oracles.hpp"

using mixt::BasisKind;
using mixt::BasisVector;
using mixt::Complex;
using mixt::MixedTransform;

namespace {

struct Instance {
  BasisVector basis;
  std::vector<mixt::BasisKind> kinds;
  std::vector<int> N;
  std::vector<double> x;
  std::size_t M;
};

Instance random_instance(std::mt19937_64& g, std::size_t d, int max_n, std::size_t M) {
  std::uniform_int_distribution<int> kind(0, 2), logn(1, max_n);
  Instance in;
  for (std::size_t j = 0; j < d; ++j) {
    in.kinds.push_back(static_cast<BasisKind>(kind(g)));
    in.N.push_back(1 << logn(g));
  }
  in.basis = BasisVector(in.kinds);
  in.M = M;
  in.x = oracle::random_unit(d * M, g);
  return in;
}

std::vector<std::vector<int>> layout(const Instance& in) {
  const auto s = mixt::hypercube_set(in.basis, in.N);
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < s.size(); ++i) out.emplace_back(s[i].begin(), s[i].end());
  return out;
}

}  // namespace

TEST(Expand, CosineExample) {
  const Complex a(1.5, 0.25), b(-0.75, 2.0);
  const std::vector<int> N{4};
  const auto e = mixt::expand_coefficients(BasisVector::parse("cos"), N, std::vector<Complex>{a, b});
  const double h = std::sqrt(2.0) / 2.0;
  ASSERT_EQ(e.size(), 4u);
  EXPECT_EQ(e[0], Complex(0.0));
  EXPECT_NEAR(std::abs(e[1] - h * b), 0.0, 1e-15);
  EXPECT_EQ(e[2], a);
  EXPECT_NEAR(std::abs(e[3] - h * b), 0.0, 1e-15);
}

TEST(Expand, DeltaAtZero) {
  const BasisVector b = BasisVector::parse("exp,alg,cos");
  const std::vector<int> N{4, 6, 8};
  const auto I = mixt::hypercube_set(b, N);
  std::vector<Complex> c(I.size(), 0.0);
  std::size_t zero = 0;
  for (std::size_t i = 0; i < I.size(); ++i) {
    if (I[i][0] == 0 && I[i][1] == 0 && I[i][2] == 0) zero = i;
  }
  c[zero] = 1.0;
  const auto e = mixt::expand_coefficients(b, N, c);
  const std::size_t center = (2 * 6 + 3) * 8 + 4;
  for (std::size_t l = 0; l < e.size(); ++l) EXPECT_EQ(e[l], Complex(l == center ? 1.0 : 0.0));
}

TEST(Expand, MirrorSymmetry) {
  std::mt19937_64 g(3);
  const BasisVector b = BasisVector::parse("exp,alg");
  const std::vector<int> N{6, 8};
  const auto c = oracle::random_complex(static_cast<std::size_t>(6 * 4), g);
  const auto e = mixt::expand_coefficients(b, N, c);
  for (int k1 = -3; k1 < 3; ++k1) {
    for (int k2 = 1; k2 < 4; ++k2) {
      const auto at = [&](int a, int bb) { return e[static_cast<std::size_t>((a + 3) * 8 + (bb + 4))]; };
      EXPECT_EQ(at(k1, k2), at(k1, -k2));
    }
    EXPECT_EQ(e[static_cast<std::size_t>((k1 + 3) * 8)], Complex(0.0));  // k2 = -N/2 carries nothing
  }
}

TEST(MixedTransform, DeltaAndSingleMode) {
  std::mt19937_64 g(4);
  const BasisVector b = BasisVector::parse("exp,cos,alg");
  const std::vector<int> N{4, 4, 4};
  const auto x = oracle::random_unit(3 * 9, g);
  MixedTransform T(b, N, x);
  std::vector<Complex> c(T.num_coeffs(), 0.0);
  const auto I = mixt::hypercube_set(b, N);
  for (std::size_t i = 0; i < I.size(); ++i) {
    if (I[i][0] == 0 && I[i][1] == 0 && I[i][2] == 0) c[i] = 1.0;
  }
  for (auto v : T.forward(c)) EXPECT_NEAR(std::abs(v - Complex(1.0)), 0.0, 1e-12);

  const std::vector<int> N6{6};
  const std::vector<double> one{1.0};
  MixedTransform A(BasisVector::parse("alg"), N6, one);
  const std::vector<Complex> delta2{0.0, 0.0, 1.0};
  EXPECT_NEAR(std::abs(A.forward(delta2)[0] - Complex(std::sqrt(2.0))), 0.0, 1e-12);
}

TEST(MixedTransform, ForwardMatchesDirect) {
  std::mt19937_64 g(5);
  for (int t = 0; t < 30; ++t) {
    const auto in = random_instance(g, 3, 3, 50);
    const auto A = oracle::design(in.kinds, layout(in), in.x);
    mixt::NfftOptions o;
    o.direct_threshold = t % 2 ? 0 : o.direct_threshold;
    MixedTransform T(in.basis, in.N, in.x, o);
    const auto c = oracle::random_complex(T.num_coeffs(), g);
    EXPECT_LT(oracle::rel_inf(T.forward(c), A * oracle::as_eigen(c)), 1e-9) << in.basis.to_string();
  }
}

TEST(MixedTransform, TransposeAndAdjointMatchDirect) {
  std::mt19937_64 g(6);
  for (int t = 0; t < 30; ++t) {
    const auto in = random_instance(g, 3, 3, 40);
    const auto A = oracle::design(in.kinds, layout(in), in.x);
    mixt::NfftOptions o;
    o.direct_threshold = t % 2 ? 0 : o.direct_threshold;
    MixedTransform T(in.basis, in.N, in.x, o);
    const auto y = oracle::random_complex(in.M, g);
    EXPECT_LT(oracle::rel_inf(T.transpose(y), A.transpose() * oracle::as_eigen(y)), 1e-9);
    EXPECT_LT(oracle::rel_inf(T.adjoint(y), A.adjoint() * oracle::as_eigen(y)), 1e-9);
  }
}

TEST(MixedTransform, TransposeSmallCases) {
  const std::vector<int> N{4, 4};
  const std::vector<double> x{0.2, 0.7};
  MixedTransform T(BasisVector::parse("cos,exp"), N, x);
  const auto h = T.transpose(std::vector<Complex>{1.0});
  const auto I = mixt::hypercube_set(BasisVector::parse("cos,exp"), N);
  for (std::size_t i = 0; i < I.size(); ++i) {
    if (I[i][0] == 0 && I[i][1] == 0) EXPECT_NEAR(std::abs(h[i] - Complex(1.0)), 0.0, 1e-12);
  }
  for (auto v : T.transpose(std::vector<Complex>{0.0})) EXPECT_EQ(v, Complex(0.0));
}

TEST(MixedTransform, WrongLengthsRejected) {
  const std::vector<int> N{4};
  const std::vector<double> x{0.2, 0.7};
  MixedTransform T(BasisVector::parse("cos"), N, x);
  std::vector<Complex> c(3), f(2);
  EXPECT_THROW(T.forward(c, f), mixt::Error);
  const std::vector<double> bad{1.5};
  EXPECT_THROW(MixedTransform(BasisVector::parse("alg"), N, bad), mixt::Error);
}

TEST(Factorization, DenseProductEqualsDesignMatrix) {
  std::mt19937_64 g(7);
  for (int t = 0; t < 20; ++t) {
    const auto in = random_instance(g, 1 + t % 3, 3, 30);
    const auto f = mixt::mixed_factors(in.basis, in.N, in.x);
    using Mat = Eigen::MatrixXcd;
    const auto r = static_cast<Eigen::Index>(f.rows), e = static_cast<Eigen::Index>(f.exp_size), m = static_cast<Eigen::Index>(f.mixed_size);
    const Mat A = Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(f.A.data(), r, e);
    const Eigen::MatrixXd Pt = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(f.Pt.data(), e, e);
    const Eigen::MatrixXd PiT = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(f.PiT.data(), e, m);
    const Eigen::VectorXd D = Eigen::Map<const Eigen::VectorXd>(f.D.data(), e);
    const Mat prod = A * (D.asDiagonal() * Pt * PiT).cast<Complex>();
    const Mat want = oracle::design(in.kinds, layout(in), in.x);
    EXPECT_LT((prod - want).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(CheckedReal, RejectsComplexValues) {
  const std::vector<Complex> ok{{1.0, 1e-14}, {2.0, 0.0}};
  EXPECT_EQ(mixt::checked_real(ok), (std::vector<double>{1.0, 2.0}));
  const std::vector<Complex> bad{{1.0, 0.5}};
  EXPECT_THROW(mixt::checked_real(bad), mixt::Error);
}
