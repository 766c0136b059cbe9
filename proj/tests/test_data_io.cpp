#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "mixt/data_io.hpp"
#include "mixt/error.hpp"

using mixt::BasisVector;
using mixt::Dataset;

namespace {

std::vector<double> column(const mixt::NodeSet& s, std::size_t j) {
  std::vector<double> v;
  for (std::size_t i = 0; i < s.size(); ++i) v.push_back(s.coords[i * s.dim + j]);
  return v;
}

// Kolmogorov-Smirnov statistic against U(0,1).
double ks_uniform(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) d = std::max({d, (i + 1) / n - v[i], v[i] - i / n});
  return d;
}

std::string airfoil_like(std::size_t rows) {
  std::ostringstream os;
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t r = 0; r < rows; ++r) os << 200 + 19800 * u(g) << '\t' << 22 * u(g) << '\t' << 0.3 * u(g) << '\t' << 71.3 << '\t' << 0.05 * u(g) << '\t' << 110 + 30 * u(g) << '\n';
  return os.str();
}

}  // namespace

TEST(Sampling, ArcsineDensityInAlgebraicDimensions) {
  const auto s = mixt::sample_nodes(BasisVector::parse("alg"), 100000, 1);
  const auto x = column(s, 0);
  const double below_half = static_cast<double>(std::count_if(x.begin(), x.end(), [](double v) { return v <= 0.5; })) / x.size();
  EXPECT_NEAR(below_half, 0.5, 0.01);
  // (1 - cos(pi/4)) / 2 is the first quartile of the arcsine law
  const double q = (1.0 - std::cos(std::numbers::pi / 4.0)) / 2.0;
  const double below_q = static_cast<double>(std::count_if(x.begin(), x.end(), [q](double v) { return v <= q; })) / x.size();
  EXPECT_NEAR(below_q, 0.25, 0.01);
  for (double v : x) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Sampling, UniformInPeriodicAndCosineDimensions) {
  const auto s = mixt::sample_nodes(BasisVector::parse("exp,cos"), 10000, 2);
  // critical value of the one-sample KS test at alpha = 0.01
  const double crit = 1.628 / std::sqrt(10000.0);
  EXPECT_LT(ks_uniform(column(s, 0)), crit);
  EXPECT_LT(ks_uniform(column(s, 1)), crit);
}

TEST(Sampling, Reproducible) {
  const auto a = mixt::sample_nodes(BasisVector::parse("exp,alg"), 100, 42);
  const auto b = mixt::sample_nodes(BasisVector::parse("exp,alg"), 100, 42);
  const auto c = mixt::sample_nodes(BasisVector::parse("exp,alg"), 100, 43);
  EXPECT_EQ(a.coords, b.coords);
  EXPECT_NE(a.coords, c.coords);
}

TEST(TestFunctions, KnownValues) {
  const double z[4] = {0, 0, 0, 0};
  EXPECT_DOUBLE_EQ(mixt::eval_f1(z), 6.0);
  const double p[4] = {0.25, 0.5, 0.0, 0.0};
  EXPECT_NEAR(mixt::eval_f2(p), 1.0, 1e-15);
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    double a[4] = {0.0, u(g), u(g), u(g)};
    double b[4] = {1.0, a[1], a[2], a[3]};
    EXPECT_NEAR(mixt::eval_f2(a), mixt::eval_f2(b), 1e-12);
  }
}

TEST(Csv, CommaWithHeader) {
  const Dataset d = mixt::parse_csv("a,b,y\n1,2,3\n4,5,6\n");
  EXPECT_EQ(d.rows, 2u);
  EXPECT_EQ(d.feature_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(d.target_name, "y");
  EXPECT_EQ(d.features, (std::vector<double>{1, 2, 4, 5}));
  EXPECT_EQ(d.target, (std::vector<double>{3, 6}));
  const Dataset byname = mixt::parse_csv("a,b,y\n1,2,3\n4,5,6\n", "a");
  EXPECT_EQ(byname.target, (std::vector<double>{1, 4}));
  const Dataset byindex = mixt::parse_csv("a,b,y\n1,2,3\n4,5,6\n", "2");
  EXPECT_EQ(byindex.target, (std::vector<double>{2, 5}));
}

TEST(Csv, WhitespaceWithoutHeader) {
  const Dataset d = mixt::parse_csv(airfoil_like(10), "", mixt::CsvDialect::kWhitespace);
  EXPECT_EQ(d.rows, 10u);
  EXPECT_EQ(d.cols(), 5u);
}

TEST(Csv, Errors) {
  EXPECT_THROW(mixt::parse_csv("a,b\n1,x\n"), mixt::Error);
  EXPECT_THROW(mixt::parse_csv("a,b\n1,2,3\n"), mixt::Error);
  EXPECT_THROW(mixt::parse_csv("a,b\n1,2\n", "zz"), mixt::Error);
  EXPECT_THROW(mixt::load_csv("/nonexistent/file.csv"), mixt::Error);
}

TEST(Csv, WriteAndReadBack) {
  const std::string path = ::testing::TempDir() + "io_roundtrip.csv";
  mixt::write_csv(path, {"x", "y"}, {{0.1, 1e-300}, {-2.5, 3.0}});
  const Dataset d = mixt::load_csv(path);
  EXPECT_EQ(d.features, (std::vector<double>{0.1, -2.5}));
  EXPECT_EQ(d.target, (std::vector<double>{1e-300, 3.0}));
  std::remove(path.c_str());
}

TEST(Normalize, ConstantColumnAndRoundTrip) {
  const Dataset raw = mixt::parse_csv(airfoil_like(50), "", mixt::CsvDialect::kWhitespace);
  mixt::set_warnings_enabled(false);
  const Dataset n = mixt::minmax_normalize(raw);
  mixt::set_warnings_enabled(true);
  for (std::size_t r = 0; r < n.rows; ++r) {
    EXPECT_EQ(n.features[r * 5 + 3], 0.0);  // constant column
    for (std::size_t c = 0; c < 5; ++c) {
      EXPECT_GE(n.features[r * 5 + c], 0.0);
      EXPECT_LE(n.features[r * 5 + c], 1.0);
    }
  }
  const Dataset back = mixt::denormalize(n);
  for (std::size_t i = 0; i < raw.features.size(); ++i) EXPECT_NEAR(back.features[i], raw.features[i], 1e-12 * std::max(1.0, std::abs(raw.features[i])));
  EXPECT_EQ(back.target, raw.target);
}

TEST(Normalize, ExternalExtremesClamp) {
  const Dataset d = mixt::parse_csv("a,y\n-1,0\n0.5,0\n3,0\n");
  const std::vector<mixt::ColumnRange> ext{{0.0, 2.0}};
  mixt::set_warnings_enabled(false);
  const Dataset n = mixt::minmax_normalize(d, ext);
  mixt::set_warnings_enabled(true);
  EXPECT_EQ(n.features, (std::vector<double>{0.0, 0.25, 1.0}));
}

TEST(Split, FloorRuleAndDisjointness) {
  const auto [train, test] = mixt::split_indices(1503, 0.8, 7);
  EXPECT_EQ(train.size(), 1202u);
  EXPECT_EQ(test.size(), 301u);
  std::set<std::size_t> all(train.begin(), train.end());
  all.insert(test.begin(), test.end());
  EXPECT_EQ(all.size(), 1503u);
  EXPECT_EQ(*all.rbegin(), 1502u);
  const auto again = mixt::split_indices(1503, 0.8, 7);
  EXPECT_EQ(again.first, train);
  EXPECT_NE(mixt::split_indices(1503, 0.8, 8).first, train);
}

TEST(Split, DatasetRows) {
  const Dataset d = mixt::parse_csv(airfoil_like(20), "", mixt::CsvDialect::kWhitespace);
  const auto [a, b] = mixt::split(d, 0.75, 1);
  EXPECT_EQ(a.rows, 15u);
  EXPECT_EQ(b.rows, 5u);
  const auto ns = mixt::to_node_set(a);
  EXPECT_EQ(ns.dim, 5u);
  EXPECT_EQ(ns.size(), 15u);
  EXPECT_EQ(ns.targets.size(), 15u);
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) EXPECT_EQ(std::stod(mixt::format_double(v)), v);
  EXPECT_EQ(mixt::format_double(0.5), "0.5");
}
