#include <gtest/gtest.h>

#include <random>

#include "mixt/error.hpp"
#include "mixt/grouped.hpp"
#include "oracles.hpp"

using mixt::BasisVector;
using mixt::Complex;
using mixt::GroupedIndexSet;
using mixt::GroupedTransform;
using mixt::SubsetFamily;

namespace {

std::vector<std::vector<int>> frequencies(const GroupedIndexSet& s) {
  const auto f = s.frequencies();
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < f.size(); ++i) out.emplace_back(f[i].begin(), f[i].end());
  return out;
}

std::vector<mixt::BasisKind> kinds(const BasisVector& b) { return {b.kinds().begin(), b.kinds().end()}; }

// Random family with up to `blocks` terms of order <= 2 (plus the empty set).
SubsetFamily random_family(std::mt19937_64& g, std::size_t d, int blocks) {
  std::uniform_int_distribution<int> dim(0, static_cast<int>(d) - 1), order(1, d > 1 ? 2 : 1), bw(1, 4);
  std::vector<mixt::FamilyTerm> terms{{{}, mixt::Bandwidths(d, 0)}};
  for (int b = 0; b < blocks; ++b) {
    mixt::Subset u{dim(g)};
    if (order(g) == 2) {
      int v = dim(g);
      while (v == u[0]) v = dim(g);
      u.push_back(v);
      std::sort(u.begin(), u.end());
    }
    bool dup = false;
    for (const auto& t : terms) dup = dup || t.u == u;
    if (dup) continue;
    mixt::FamilyTerm t{u, mixt::Bandwidths(d, 0)};
    for (int j : u) t.N[static_cast<std::size_t>(j)] = 2 * bw(g);
    terms.push_back(t);
  }
  return SubsetFamily(d, terms);
}

}  // namespace

TEST(Grouped, ConstantOnly) {
  const GroupedIndexSet set(BasisVector::parse("exp,alg"), SubsetFamily::parse("u= N=0,0\n"));
  std::mt19937_64 g(1);
  const auto x = oracle::random_unit(2 * 10, g);
  GroupedTransform T(set, x);
  const Complex c0(2.5, -1.0);
  for (auto v : T.forward(std::vector<Complex>{c0})) EXPECT_EQ(v, c0);
  const auto h = T.adjoint(std::vector<Complex>(10, Complex(1.0)));
  EXPECT_NEAR(std::abs(h[0] - Complex(10.0)), 0.0, 1e-12);
}

TEST(Grouped, ThreeTermFamilyMatchesDirect) {
  const BasisVector b = BasisVector::parse("exp,alg,cos");
  const SubsetFamily fam = SubsetFamily::parse("u= N=0,0,0\nu=1 N=18,0,0\nu=2 N=0,16,0\nu=3 N=0,0,10\nu=1,2 N=10,8,0\nu=2,3 N=0,6,8\n");
  const GroupedIndexSet set(b, fam);
  std::mt19937_64 g(2);
  const auto x = oracle::random_unit(3 * 40, g);
  const auto c = oracle::random_complex(static_cast<std::size_t>(set.size()), g);
  const auto A = oracle::design(kinds(b), frequencies(set), x);
  mixt::GroupedOptions o;
  o.nfft.direct_threshold = 0;
  GroupedTransform T(set, x, o);
  EXPECT_LT(oracle::rel_inf(T.forward(c), A * oracle::as_eigen(c)), 1e-9);
  EXPECT_LT(oracle::rel_inf(mixt::grouped_direct(set, x, c), A * oracle::as_eigen(c)), 1e-12);
}

TEST(Grouped, SingletonBlocksAddUp) {
  const BasisVector b = BasisVector::parse("cos,exp");
  const GroupedIndexSet set(b, SubsetFamily::parse("u=1 N=8,0\nu=2 N=0,6\n"));
  std::mt19937_64 g(3);
  const auto x = oracle::random_unit(2 * 25, g);
  const auto c = oracle::random_complex(static_cast<std::size_t>(set.size()), g);
  const auto f = GroupedTransform(set, x).forward(c);
  // sum of two independent one-dimensional sums
  for (std::size_t i = 0; i < 25; ++i) {
    Complex s = 0.0;
    for (int k = 1; k < 4; ++k) s += c[static_cast<std::size_t>(k - 1)] * oracle::phi1(mixt::BasisKind::kCos, k, x[2 * i]);
    std::size_t p = 3;
    for (int k = -3; k < 3; ++k) {
      if (k != 0) s += c[p++] * oracle::phi1(mixt::BasisKind::kExp, k, x[2 * i + 1]);
    }
    EXPECT_NEAR(std::abs(f[i] - s), 0.0, 1e-12);
  }
}

TEST(Grouped, RandomFamiliesAgainstDenseProducts) {
  std::mt19937_64 g(4);
  std::uniform_int_distribution<int> kind(0, 2), dim(1, 4), nodes(1, 60);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = static_cast<std::size_t>(dim(g));
    std::vector<mixt::BasisKind> ks;
    for (std::size_t j = 0; j < d; ++j) ks.push_back(static_cast<mixt::BasisKind>(kind(g)));
    const BasisVector b(ks);
    const GroupedIndexSet set(b, random_family(g, d, 6));
    const std::size_t M = static_cast<std::size_t>(nodes(g));
    const auto x = oracle::random_unit(d * M, g);
    const auto A = oracle::design(ks, frequencies(set), x);
    mixt::GroupedOptions o;
    o.nfft.direct_threshold = t % 2 ? 0 : o.nfft.direct_threshold;
    GroupedTransform T(set, x, o);
    const auto c = oracle::random_complex(T.num_coeffs(), g);
    const auto y = oracle::random_complex(M, g);
    EXPECT_LT(oracle::rel_inf(T.forward(c), A * oracle::as_eigen(c)), 1e-9);
    EXPECT_LT(oracle::rel_inf(T.adjoint(y), A.adjoint() * oracle::as_eigen(y)), 1e-9);
    std::vector<Complex> h(T.num_coeffs());
    T.transpose(y, h);
    EXPECT_LT(oracle::rel_inf(h, A.transpose() * oracle::as_eigen(y)), 1e-9);
  }
}

TEST(Grouped, ZeroInputs) {
  const BasisVector b = BasisVector::parse("exp,cos,alg");
  const int p[2] = {6, 4};
  const GroupedIndexSet set(b, mixt::apply_convention(mixt::superposition_family(3, 2, p), b, mixt::BandwidthConvention::kFrequencyCount));
  std::mt19937_64 g(5);
  const auto x = oracle::random_unit(3 * 12, g);
  GroupedTransform T(set, x);
  for (auto v : T.adjoint(std::vector<Complex>(12, 0.0))) EXPECT_EQ(v, Complex(0.0));
}

TEST(Grouped, ThreadedResultsMatchSerial) {
  const BasisVector b = BasisVector::parse("exp,alg,cos,alg");
  const int p[2] = {16, 8};
  const GroupedIndexSet set(b, mixt::apply_convention(mixt::superposition_family(4, 2, p), b, mixt::BandwidthConvention::kFrequencyCount));
  std::mt19937_64 g(6);
  const auto x = oracle::random_unit(4 * 300, g);
  const auto c = oracle::random_complex(static_cast<std::size_t>(set.size()), g);
  const auto y = oracle::random_complex(300, g);
  mixt::GroupedOptions serial, threaded;
  threaded.threads = 4;
  GroupedTransform A(set, x, serial), B(set, x, threaded);
  EXPECT_EQ(A.forward(c), B.forward(c));
  EXPECT_EQ(A.adjoint(y), B.adjoint(y));
}

TEST(Grouped, DimensionMismatchRejected) {
  const GroupedIndexSet set(BasisVector::parse("exp,cos"), SubsetFamily::parse("u=1 N=4,0\n"));
  const std::vector<double> x{0.1, 0.2, 0.3};
  EXPECT_THROW(GroupedTransform(set, x), mixt::Error);
}
