#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <map>
#include <random>

#include "mixt/anova.hpp"
#include "mixt/error.hpp"
#include "oracles.hpp"

using mixt::BasisVector;
using mixt::Complex;
using mixt::MixedModel;
using mixt::NodeSet;
using mixt::SubsetFamily;

namespace {

NodeSet sampled(const BasisVector& b, std::size_t M, std::uint64_t seed, mixt::TestFunction f) {
  NodeSet s = mixt::sample_nodes(b, M, seed);
  mixt::fill_targets(s, f);
  return s;
}

MixedModel model_with(const BasisVector& b, const SubsetFamily& fam, const std::map<std::vector<int>, Complex>& entries) {
  mixt::GroupedIndexSet set(b, fam);
  const auto freqs = set.frequencies();
  std::vector<Complex> c(static_cast<std::size_t>(set.size()), 0.0);
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const std::vector<int> k(freqs[i].begin(), freqs[i].end());
    if (auto it = entries.find(k); it != entries.end()) c[i] = it->second;
  }
  return MixedModel(std::move(set), std::move(c));
}

}  // namespace

TEST(Fit, ConstantFunction) {
  const BasisVector b = BasisVector::parse("exp,alg");
  NodeSet s = mixt::sample_nodes(b, 50, 1);
  s.targets.assign(50, 3.0);
  const MixedModel m = mixt::fit(b, SubsetFamily::parse("u= N=0,0\n"), s);
  ASSERT_EQ(m.coefficients().size(), 1u);
  EXPECT_NEAR(std::abs(m.coefficients()[0] - Complex(3.0)), 0.0, 1e-10);
  for (double v : m.predict_real(mixt::sample_nodes(b, 20, 2).coords)) EXPECT_NEAR(v, 3.0, 1e-10);
}

TEST(Fit, SingleModeRecovery) {
  const BasisVector b = BasisVector::parse("exp,cos,alg");
  const int p[2] = {6, 4};
  const SubsetFamily fam = mixt::superposition_family(3, 2, p);
  const std::vector<int> k{0, 1, 1};  // in the {2,3} block
  NodeSet s = mixt::sample_nodes(b, 2000, 3);
  std::vector<Complex> y(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) y[i] = oracle::phi({b[0], b[1], b[2]}, k, &s.coords[3 * i]);
  const MixedModel m = mixt::fit(b, fam, s.coords, y);
  const auto freqs = m.index_set().frequencies();
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const bool hit = std::equal(freqs[i].begin(), freqs[i].end(), k.begin());
    EXPECT_NEAR(std::abs(m.coefficients()[i] - Complex(hit ? 1.0 : 0.0)), 0.0, 1e-6);
  }
}

TEST(Fit, F1WithFinalBandwidths) {
  const BasisVector b = BasisVector::parse("exp,alg,cos,alg");
  const SubsetFamily fam = mixt::apply_convention(
      SubsetFamily::parse("u= N=0,0,0,0\nu=1 N=16,0,0,0\nu=2 N=0,8,0,0\nu=3 N=0,0,2,0\nu=4 N=0,0,0,10\n"
                          "u=1,2 N=16,8,0,0\nu=2,4 N=0,8,0,8\nu=3,4 N=0,0,2,4\n"),
      b, mixt::BandwidthConvention::kFrequencyCount);
  const MixedModel m = mixt::fit(b, fam, sampled(b, 1000, 11, mixt::TestFunction::kF1));
  const NodeSet test = sampled(b, 10000, 12, mixt::TestFunction::kF1);
  EXPECT_LT(mixt::mse(test.targets, m.predict_real(test.coords)), 1e-11);
  EXPECT_EQ(m.meta().num_nodes, 1000u);
}

TEST(Fit, RejectsBadInput) {
  const BasisVector b = BasisVector::parse("exp,cos");
  NodeSet s = mixt::sample_nodes(b, 10, 1);
  EXPECT_THROW(mixt::fit(b, SubsetFamily::parse("u=1 N=4,0\n"), s), mixt::Error);  // no targets
  s.targets.assign(10, 1.0);
  s.targets[3] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(mixt::fit(b, SubsetFamily::parse("u=1 N=4,0\n"), s), mixt::Error);
  EXPECT_THROW(mixt::fit(BasisVector::parse("exp"), SubsetFamily::parse("u=1 N=4\n"), s), mixt::Error);
}

TEST(Predict, MatchesDirectSum) {
  const BasisVector b = BasisVector::parse("alg,exp,cos");
  const int p[2] = {8, 4};
  const mixt::GroupedIndexSet set(b, mixt::superposition_family(3, 2, p));
  std::mt19937_64 g(5);
  const auto c = oracle::random_complex(static_cast<std::size_t>(set.size()), g);
  const MixedModel m(set, c);
  const auto x = oracle::random_unit(3 * 30, g);
  const auto freqs = set.frequencies();
  std::vector<std::vector<int>> fl;
  for (std::size_t i = 0; i < freqs.size(); ++i) fl.emplace_back(freqs[i].begin(), freqs[i].end());
  EXPECT_LT(oracle::rel_inf(m.predict(x), oracle::design({b[0], b[1], b[2]}, fl, x) * oracle::as_eigen(c)), 1e-9);
}

TEST(Predict, InterpolatingFitReproducesTrainingData) {
  const BasisVector b = BasisVector::parse("cos");
  const SubsetFamily fam = SubsetFamily::parse("u= N=0\nu=1 N=10\n");  // 5 functions
  NodeSet s = mixt::sample_nodes(b, 5, 7);
  std::mt19937_64 g(7);
  s.targets = oracle::random_unit(5, g);
  mixt::FitOptions o;
  o.solver.max_iter = 200;
  o.solver.atol = o.solver.btol = 1e-14;
  mixt::set_warnings_enabled(false);
  const MixedModel m = mixt::fit(b, fam, s, o);
  mixt::set_warnings_enabled(true);
  const auto pred = m.predict_real(s.coords);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(pred[i], s.targets[i], 1e-8);
}

TEST(Variance, SimpleModels) {
  const BasisVector b = BasisVector::parse("exp,cos");
  const SubsetFamily fam = SubsetFamily::parse("u= N=0,0\nu=1 N=4,0\nu=2 N=0,6\nu=1,2 N=4,6\n");
  EXPECT_EQ(model_with(b, fam, {{{0, 0}, 5.0}}).variance(), 0.0);
  const MixedModel one = model_with(b, fam, {{{0, 0}, 5.0}, {{-1, 2}, Complex(0.6, 0.8)}});
  EXPECT_NEAR(one.variance(), 1.0, 1e-15);
  EXPECT_NEAR(one.term_variance({0, 1}), 1.0, 1e-15);
  EXPECT_EQ(one.term_variance({0}), 0.0);
  const auto gsi = one.gsi();
  ASSERT_EQ(gsi.size(), 3u);
  for (const auto& e : gsi) EXPECT_DOUBLE_EQ(e.rho, (e.u == mixt::Subset{0, 1}) ? 1.0 : 0.0);
}

TEST(Gsi, ConstantModelIsDegenerate) {
  const BasisVector b = BasisVector::parse("exp,cos");
  const MixedModel m = model_with(b, SubsetFamily::parse("u= N=0,0\nu=1 N=4,0\n"), {{{0, 0}, 2.0}});
  try {
    (void)m.gsi();
    FAIL();
  } catch (const mixt::Error& e) {
    EXPECT_EQ(e.code(), mixt::ErrorCode::kDegenerateModel);
  }
}

TEST(Truncate, Thresholds) {
  const BasisVector b = BasisVector::parse("exp,cos");
  const SubsetFamily fam = SubsetFamily::parse("u= N=0,0\nu=1 N=4,0\nu=2 N=0,6\nu=1,2 N=4,6\n");
  const MixedModel m = model_with(b, fam, {{{1, 0}, 2.0}, {{0, 1}, 1.0}});
  EXPECT_EQ(m.truncate(0.9).size(), 1u);
  EXPECT_TRUE(m.truncate(0.9).contains({}));
  EXPECT_EQ(m.truncate(0.5).size(), 2u);  // rho({1}) = 0.8, rho({2}) = 0.2
  EXPECT_THROW(m.truncate(0.0), mixt::Error);
  EXPECT_THROW(m.truncate(1.0), mixt::Error);
  const SubsetFamily t = m.truncate(1e-300);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_TRUE(t.contains({0}));
  EXPECT_TRUE(t.contains({1}));
  EXPECT_FALSE(t.contains({0, 1}));
  EXPECT_EQ(t.find({1})->N, (mixt::Bandwidths{0, 6}));
}

TEST(Mse, Values) {
  const std::vector<double> a{1.0, 2.0}, z{0.0}, two{2.0};
  EXPECT_EQ(mixt::mse(a, a), 0.0);
  EXPECT_EQ(mixt::mse(z, two), 4.0);
  const std::vector<Complex> i{Complex(0.0, 1.0)}, zero{Complex(0.0)};
  EXPECT_EQ(mixt::mse(i, zero), 1.0);
  EXPECT_THROW(mixt::mse(a, z), mixt::Error);
}

TEST(ModelText, RoundTrip) {
  const BasisVector b = BasisVector::parse("exp,alg");
  std::mt19937_64 g(9);
  const int p[2] = {6, 4};
  const mixt::GroupedIndexSet set(b, mixt::superposition_family(2, 2, p));
  MixedModel m(set, oracle::random_complex(static_cast<std::size_t>(set.size()), g), {100, 7, 0.5, "atol", 1e-3, {}});
  m.set_normalization({{0.0, 2.0}, {-1.0, 1.0}});
  const MixedModel r = MixedModel::from_text(m.to_text());
  EXPECT_EQ(r.basis(), m.basis());
  EXPECT_EQ(r.family(), m.family());
  EXPECT_TRUE(std::equal(r.coefficients().begin(), r.coefficients().end(), m.coefficients().begin()));
  EXPECT_EQ(r.meta().iterations, 7);
  EXPECT_EQ(r.meta().stop_reason, "atol");
  ASSERT_EQ(r.meta().normalization.size(), 2u);
  EXPECT_EQ(r.meta().normalization[1].min, -1.0);

  const std::string path = ::testing::TempDir() + "model_roundtrip.txt";
  m.save(path);
  EXPECT_EQ(MixedModel::load(path).to_text(), m.to_text());
  std::remove(path.c_str());
  EXPECT_THROW(MixedModel::from_text("[basis]\nexp\n[family]\nu=1 N=4\n[coefficients]\n1 0\n"), mixt::Error);  // 3 coefficients expected
  EXPECT_THROW(MixedModel::from_text("[bogus]\n"), mixt::Error);
}

TEST(GridSearch, SingleCellAndArgmin) {
  const BasisVector b = BasisVector::parse("exp,cos");
  const NodeSet train = sampled(BasisVector::parse("exp,cos,exp,cos"), 300, 1, mixt::TestFunction::kF2);
  const NodeSet valid = sampled(BasisVector::parse("exp,cos,exp,cos"), 300, 2, mixt::TestFunction::kF2);
  const BasisVector b4 = BasisVector::parse("exp,exp,cos,cos");
  const auto conv = mixt::BandwidthConvention::kFrequencyCount;
  const std::vector<int> one{4}, two{2};
  const auto single = mixt::grid_search_bandwidths(b4, 2, one, two, train, valid, conv, {});
  ASSERT_EQ(single.table.size(), 1u);
  EXPECT_EQ(single.best_n1, 4);
  EXPECT_EQ(single.best_n2, 2);

  const std::vector<int> n1{2, 4, 6}, n2{2, 4};
  const auto r = mixt::grid_search_bandwidths(b4, 2, n1, n2, train, valid, conv, {}, 2);
  ASSERT_EQ(r.table.size(), 6u);
  for (const auto& c : r.table) EXPECT_LE(r.best_mse, c.mse);
  EXPECT_EQ(r.table[1].n1, 4);
  EXPECT_EQ(r.table[1].n2, 2);
  (void)b;
}

TEST(Refine, LocalOptimumUnchanged) {
  const SubsetFamily start = SubsetFamily::parse("u= N=0,0\nu=1 N=8,0\nu=2 N=0,6\n");
  const auto r = mixt::coordinate_refine(start, [](const SubsetFamily& f) {
    const double a = f[1].N[0] - 8.0, c = f[2].N[1] - 6.0;
    return 1.0 + a * a + c * c;
  });
  EXPECT_EQ(r.family, start);
  EXPECT_EQ(r.mse, 1.0);
}

TEST(Refine, QuadraticDescent) {
  const SubsetFamily start = SubsetFamily::parse("u=1 N=12\n");
  const auto r = mixt::coordinate_refine(start, [](const SubsetFamily& f) {
    const double a = f[0].N[0] - 8.0;
    return a * a;
  });
  EXPECT_EQ(r.family[0].N[0], 8);
  EXPECT_EQ(r.mse, 0.0);
}

// Replays a tabulated refinement run: the objective only knows the tabulated
// settings, so the visiting order must reproduce every row and the final choice.
TEST(Refine, ReplaysTabulatedPath) {
  using Row = std::array<int, 7>;  // N{1} N{2} N{3} N{4} N{1,2} N{2,4} N{3,4}
  const std::vector<std::pair<Row, double>> table{
      {{12, 12, 12, 12, 10, 10, 10}, 1.31369e-8},  {{12, 12, 12, 12, 10, 10, 12}, 1.36285e-8},
      {{12, 12, 12, 12, 10, 10, 8}, 1.25704e-8},   {{12, 12, 12, 12, 10, 10, 6}, 1.2035e-8},
      {{12, 12, 12, 12, 10, 10, 4}, 3.97122e-8},   {{12, 12, 12, 12, 10, 12, 6}, 1.24734e-8},
      {{12, 12, 12, 12, 10, 8, 6}, 1.15079e-8},    {{12, 12, 12, 12, 10, 6, 6}, 1.13142e-8},
      {{12, 12, 12, 12, 10, 4, 6}, 1.10034e-8},    {{12, 12, 12, 12, 10, 2, 6}, 4.68726e-3},
      {{12, 12, 12, 12, 12, 4, 6}, 1.20275e-10},   {{12, 12, 12, 12, 14, 4, 6}, 4.27822e-11},
      {{12, 12, 12, 12, 16, 4, 6}, 5.42373e-11},   {{12, 12, 12, 14, 14, 4, 6}, 4.28631e-11},
      {{12, 12, 12, 10, 14, 4, 6}, 4.2808e-11},    {{12, 12, 14, 12, 14, 4, 6}, 4.29279e-11},
      {{12, 12, 10, 12, 14, 4, 6}, 4.26967e-11},   {{12, 12, 8, 12, 14, 4, 6}, 4.25943e-11},
      {{12, 12, 6, 12, 14, 4, 6}, 4.24758e-11},    {{12, 12, 4, 12, 14, 4, 6}, 4.25071e-11},
      {{12, 14, 6, 12, 14, 4, 6}, 4.24995e-11},    {{12, 10, 6, 12, 14, 4, 6}, 4.23524e-11},
      {{12, 8, 6, 12, 14, 4, 6}, 4.17446e-11},     {{12, 6, 6, 12, 14, 4, 6}, 4.35334e-11},
      {{14, 8, 6, 12, 14, 4, 6}, 6.80995e-12},     {{16, 8, 6, 12, 14, 4, 6}, 6.58355e-12},
      {{18, 8, 6, 12, 14, 4, 6}, 6.5848e-12},
  };
  auto row_of = [](const SubsetFamily& f) {
    return Row{f.find({0})->N[0], f.find({1})->N[1], f.find({2})->N[2], f.find({3})->N[3],
               f.find({0, 1})->N[0], f.find({1, 3})->N[1], f.find({2, 3})->N[2]};
  };
  std::vector<Row> visited;
  const auto objective = [&](const SubsetFamily& f) {
    const Row r = row_of(f);
    visited.push_back(r);
    for (const auto& [row, mse] : table) {
      if (row == r) return mse;
    }
    ADD_FAILURE() << "setting outside the tabulated settings";
    return 1.0;
  };
  const int p[2] = {12, 10};
  std::vector<mixt::FamilyTerm> terms;
  const SubsetFamily full = mixt::superposition_family(4, 2, p);
  for (const auto& t : full.terms()) {
    if (t.u.size() < 2 || t.u == mixt::Subset{0, 1} || t.u == mixt::Subset{1, 3} || t.u == mixt::Subset{2, 3}) terms.push_back(t);
  }
  const auto r = mixt::coordinate_refine(SubsetFamily(4, terms), objective);
  ASSERT_EQ(visited.size(), table.size());
  for (std::size_t i = 0; i < table.size(); ++i) EXPECT_EQ(visited[i], table[i].first) << "step " << i + 1;
  EXPECT_EQ(row_of(r.family), (Row{16, 8, 6, 12, 14, 4, 6}));
  EXPECT_DOUBLE_EQ(r.mse, 6.58355e-12);
}

TEST(Refine, PerEntryPassMovesSingleEntries) {
  const SubsetFamily start = SubsetFamily::parse("u=1,2 N=8,8\n");
  const auto r = mixt::coordinate_refine(
      start,
      [](const SubsetFamily& f) {
        const double a = f[0].N[0] - 12.0, c = f[0].N[1] - 4.0;
        return a * a + c * c;
      },
      {true, 2, 2, 1 << 16});
  EXPECT_EQ(r.family[0].N, (mixt::Bandwidths{12, 4}));
}
