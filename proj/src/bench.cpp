#include "mixt/bench.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "mixt/error.hpp"

namespace mixt {

namespace {

using Row = std::vector<std::string>;

std::string num(double v) { return format_double(v); }
std::string num(int v) { return std::to_string(v); }
std::string num(std::size_t v) { return std::to_string(v); }

std::string output_path(const BenchOptions& o, const std::string& name) {
  std::filesystem::create_directories(o.out_dir);
  return (std::filesystem::path(o.out_dir) / name).string();
}

void write_table(const std::string& path, const Row& header, const std::vector<Row>& rows) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  auto emit = [&](const Row& r) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      const bool quote = r[c].find(',') != std::string::npos;
      out << (c ? "," : "") << (quote ? "\"" + r[c] + "\"" : r[c]);
    }
    out << '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
  if (!out) fail(ErrorCode::kIo, "write to '" + path + "' failed");
}

std::string family_summary(const SubsetFamily& fam) {
  std::ostringstream os;
  bool first = true;
  for (const auto& t : fam.terms()) {
    if (t.u.empty()) continue;
    os << (first ? "" : " ") << format_subset(t.u) << ":";
    for (std::size_t a = 0; a < t.u.size(); ++a) os << (a ? "x" : "") << t.N[static_cast<std::size_t>(t.u[a])];
    first = false;
  }
  return os.str();
}

SubsetFamily family_from_terms(std::size_t d, const std::vector<Subset>& terms, int n1, int n2) {
  std::vector<FamilyTerm> out;
  out.push_back({{}, Bandwidths(d, 0)});
  for (const auto& u : terms) {
    FamilyTerm t{u, Bandwidths(d, 0)};
    for (int j : u) t.N[static_cast<std::size_t>(j)] = u.size() == 1 ? n1 : n2;
    out.push_back(std::move(t));
  }
  return SubsetFamily(d, std::move(out));
}

std::vector<int> even_range(int lo, int hi) {
  std::vector<int> v;
  for (int n = lo; n <= hi; n += 2) v.push_back(n);
  return v;
}

NodeSet f_nodes(const BasisVector& basis, std::size_t M, std::uint64_t seed, TestFunction f) {
  NodeSet s = sample_nodes(basis, M, seed);
  fill_targets(s, f);
  return s;
}

std::size_t coefficient_count(const BasisVector& basis, const SubsetFamily& fam) {
  return static_cast<std::size_t>(GroupedIndexSet(basis, apply_convention(fam, basis, BandwidthConvention::kFrequencyCount)).size());
}

}  // namespace

BasisVector f1_basis() { return BasisVector::parse("exp,alg,cos,alg"); }
BasisVector f2_basis() { return BasisVector::parse("exp,exp,cos,cos"); }
BasisVector airfoil_basis() { return BasisVector::parse("exp,exp,alg,alg,cos"); }

SubsetFamily f1_final_family() {
  return SubsetFamily::parse(
      "u= N=0,0,0,0\n"
      "u=1 N=16,0,0,0\n"
      "u=2 N=0,8,0,0\n"
      "u=3 N=0,0,2,0\n"
      "u=4 N=0,0,0,10\n"
      "u=1,2 N=16,8,0,0\n"
      "u=2,4 N=0,8,0,8\n"
      "u=3,4 N=0,0,2,4\n");
}

std::span<const F2BandwidthRow> f2_bandwidth_table() {
  static constexpr std::array<F2BandwidthRow, 10> rows{{
      {50, 4, 2, 4, 2, 4, 2},
      {100, 4, 4, 4, 4, 4, 4},
      {200, 6, 4, 6, 4, 14, 4},
      {500, 12, 8, 10, 8, 32, 6},
      {1000, 18, 10, 14, 10, 76, 6},
      {2000, 28, 14, 24, 14, 150, 10},
      {5000, 56, 22, 40, 22, 300, 14},
      {10000, 70, 32, 60, 32, 720, 18},
      {20000, 170, 46, 110, 46, 1962, 26},
      {50000, 382, 76, 224, 76, 6548, 40},
  }};
  return rows;
}

const F2BandwidthRow& f2_bandwidths(int M) {
  for (const auto& r : f2_bandwidth_table()) {
    if (r.M == M) return r;
  }
  fail(ErrorCode::kDomain, "no tabulated f2 bandwidths for M = " + std::to_string(M));
}

std::vector<GsiEntry> f2_analytic_gsi() {
  const double e = std::numbers::e;
  const double a = 59.0 + 600.0 * e - 180.0 * e * e;
  const double b = 177.0 + 1800.0 * e - 540.0 * e * e;
  return {
      {{0}, 133.0 / a},
      {{2}, (-530.0 + 1800.0 * e - 540.0 * e * e) / b},
      {{0, 1}, 100.0 / a},
      {{0, 2}, 8.0 / b},
  };
}

double f2_gsi_deviation(std::span<const GsiEntry> gsi) {
  const auto exact = f2_analytic_gsi();
  auto lookup = [](std::span<const GsiEntry> table, const Subset& u) {
    for (const auto& g : table) {
      if (g.u == u) return g.rho;
    }
    return 0.0;
  };
  double s = 0.0;
  const int params[2] = {2, 2};
  const SubsetFamily all = superposition_family(4, 2, params);
  for (const auto& t : all.terms()) {
    if (t.u.empty()) continue;
    const double diff = lookup(gsi, t.u) - lookup(exact, t.u);
    s += diff * diff;
  }
  return std::sqrt(s);
}

SubsetFamily airfoil_family(int n1, int n2) {
  const std::vector<Subset> terms = {{0}, {1}, {2}, {3}, {4}, {0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
  return family_from_terms(5, terms, n1, n2);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::kShape, "loglog_slope needs at least two paired values");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double median(std::vector<double> v) {
  if (v.empty()) fail(ErrorCode::kShape, "median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

BenchSummary run_f1_bench(const BenchOptions& o) {
  BenchSummary summary;
  const BasisVector basis = f1_basis();
  const auto conv = BandwidthConvention::kFrequencyCount;
  const NodeSet train = f_nodes(basis, 1000, o.seed, TestFunction::kF1);
  const NodeSet test = f_nodes(basis, 10000, o.seed + 1000003, TestFunction::kF1);

  const std::vector<int> n1 = o.full ? even_range(2, 50) : even_range(8, 16);
  const std::vector<int> n2 = o.full ? even_range(2, 12) : even_range(6, 12);
  const GridSearchResult grid = grid_search_bandwidths(basis, 2, n1, n2, train, test, conv, o.fit, o.threads);
  std::vector<Row> rows;
  for (const auto& c : grid.table) rows.push_back({num(c.n1), num(c.n2), num(c.mse)});
  summary.files.push_back(output_path(o, "f1_grid.csv"));
  write_table(summary.files.back(), {"n1", "n2", "mse"}, rows);
  summary.values.push_back({"grid minimizer (N1,N2)", "(" + num(grid.best_n1) + "," + num(grid.best_n2) + ")"});
  summary.values.push_back({"grid minimum MSE", num(grid.best_mse)});

  const int params[2] = {grid.best_n1, grid.best_n2};
  const SubsetFamily pilot_family = superposition_family(4, 2, params);
  const MixedModel pilot = fit(basis, apply_convention(pilot_family, basis, conv), train, o.fit);
  const auto gsi = pilot.gsi();
  rows.clear();
  for (const auto& g : gsi) rows.push_back({format_subset(g.u), num(g.rho), g.rho > o.theta ? "1" : "0"});
  summary.files.push_back(output_path(o, "f1_gsi.csv"));
  write_table(summary.files.back(), {"term", "gsi", "active"}, rows);

  // Truncate in experiment units: keep the pilot parameters on the surviving terms.
  std::vector<FamilyTerm> kept;
  for (const auto& t : pilot_family.terms()) {
    if (t.u.empty()) {
      kept.push_back(t);
      continue;
    }
    for (const auto& g : gsi) {
      if (g.u == t.u && g.rho > o.theta) kept.push_back(t);
    }
  }
  const SubsetFamily truncated(4, std::move(kept));
  summary.values.push_back({"truncation set", family_summary(truncated)});

  RefineOptions ropt;
  ropt.per_entry_pass = true;
  const RefineResult refined = coordinate_refine_bandwidths(basis, truncated, train, test, conv, o.fit, ropt);
  rows.clear();
  for (std::size_t s = 0; s < refined.trace.size(); ++s) {
    const auto& st = refined.trace[s];
    rows.push_back({num(s), num(st.pass), st.u.empty() ? "start" : format_subset(st.u), num(st.dim < 0 ? 0 : st.dim + 1), num(st.value),
                    num(st.mse), st.accepted ? "1" : "0"});
  }
  summary.files.push_back(output_path(o, "f1_refine.csv"));
  write_table(summary.files.back(), {"step", "pass", "term", "dim", "value", "mse", "accepted"}, rows);
  summary.files.push_back(output_path(o, "f1_family.txt"));
  {
    std::ofstream f(summary.files.back());
    f << refined.family.to_text();
  }
  summary.values.push_back({"refined bandwidths", family_summary(refined.family)});
  summary.values.push_back({"refined MSE", num(refined.mse)});
  summary.values.push_back({"refined coefficient count", num(coefficient_count(basis, refined.family))});

  const int reps = o.repetitions > 0 ? o.repetitions : (o.full ? 100 : 10);
  const BasisVector cos_basis = BasisVector::uniform(BasisKind::kCos, 4);
  std::vector<double> mixed_mse, cos_mse;
  rows.clear();
  for (int r = 0; r < reps; ++r) {
    const std::uint64_t s = o.seed + 7919u * static_cast<std::uint64_t>(r + 1);
    const double em = validation_mse(basis, refined.family, conv, f_nodes(basis, 1000, s, TestFunction::kF1),
                                     f_nodes(basis, 10000, s + 1, TestFunction::kF1), o.fit);
    const double ec = validation_mse(cos_basis, refined.family, conv, f_nodes(cos_basis, 1000, s, TestFunction::kF1),
                                     f_nodes(cos_basis, 10000, s + 1, TestFunction::kF1), o.fit);
    mixed_mse.push_back(em);
    cos_mse.push_back(ec);
    rows.push_back({num(r), num(em), num(ec)});
  }
  summary.files.push_back(output_path(o, "f1_repeats.csv"));
  write_table(summary.files.back(), {"run", "mse_mixed", "mse_cos"}, rows);
  summary.values.push_back({"median MSE mixed (" + num(reps) + " runs)", num(median(mixed_mse))});
  summary.values.push_back({"median MSE cos (" + num(reps) + " runs)", num(median(cos_mse))});
  return summary;
}

BenchSummary run_f2_bench(const BenchOptions& o) {
  BenchSummary summary;
  const auto conv = BandwidthConvention::kFrequencyCount;
  struct Variant {
    const char* name;
    BasisVector basis;
  };
  const std::vector<Variant> variants = {
      {"cos", BasisVector::uniform(BasisKind::kCos, 4)},
      {"mixed", f2_basis()},
      {"exp", BasisVector::uniform(BasisKind::kExp, 4)},
  };
  std::vector<int> Ms;
  for (const auto& r : f2_bandwidth_table()) {
    if (o.full || (r.M >= 500 && r.M <= 10000)) Ms.push_back(r.M);
  }
  // Uniform nodes in every variant, so one test set serves all three bases.
  const NodeSet test = f_nodes(BasisVector::uniform(BasisKind::kCos, 4), 10000, o.seed + 104729, TestFunction::kF2);
  const auto exact = f2_analytic_gsi();

  std::vector<Row> conv_rows, gsi_rows;
  std::vector<std::vector<double>> mse_by_variant(variants.size());
  for (int M : Ms) {
    const F2BandwidthRow& row = f2_bandwidths(M);
    const NodeSet train = f_nodes(BasisVector::uniform(BasisKind::kCos, 4), static_cast<std::size_t>(M), o.seed + static_cast<std::uint64_t>(M),
                                  TestFunction::kF2);
    for (std::size_t v = 0; v < variants.size(); ++v) {
      const int n1 = v == 0 ? row.cos_n1 : v == 1 ? row.mixed_n1 : row.exp_n1;
      const int n2 = v == 0 ? row.cos_n2 : v == 1 ? row.mixed_n2 : row.exp_n2;
      const int params[2] = {n1, n2};
      const BasisVector& basis = variants[v].basis;
      const SubsetFamily fam = apply_convention(superposition_family(4, 2, params), basis, conv);
      double e = std::numeric_limits<double>::infinity(), dev = std::numeric_limits<double>::infinity();
      std::size_t ncoef = 0;
      try {
        const MixedModel model = fit(basis, fam, train, o.fit);
        ncoef = model.coefficients().size();
        e = mse(test.targets, model.predict_real(test.coords, o.fit.transform));
        const auto gsi = model.gsi();
        dev = f2_gsi_deviation(gsi);
        for (const auto& g : gsi) {
          double ref = 0.0;
          for (const auto& x : exact) {
            if (x.u == g.u) ref = x.rho;
          }
          gsi_rows.push_back({num(M), variants[v].name, format_subset(g.u), num(g.rho), num(ref)});
        }
      } catch (const Error& err) {
        warn(std::string("f2 bench: ") + variants[v].name + " fit at M=" + num(M) + " failed: " + err.what());
      }
      mse_by_variant[v].push_back(e);
      conv_rows.push_back({num(M), variants[v].name, num(n1), num(n2), num(ncoef), num(e), num(dev)});
    }
  }
  summary.files.push_back(output_path(o, "f2_convergence.csv"));
  write_table(summary.files.back(), {"M", "basis", "n1", "n2", "coefficients", "mse", "gsi_deviation"}, conv_rows);
  summary.files.push_back(output_path(o, "f2_gsi.csv"));
  write_table(summary.files.back(), {"M", "basis", "term", "gsi", "analytic"}, gsi_rows);

  std::vector<double> xs, idx;
  for (std::size_t i = 0; i < Ms.size(); ++i) {
    if (Ms[i] >= 500 && Ms[i] <= 10000) idx.push_back(static_cast<double>(i));
  }
  for (std::size_t v = 0; v < variants.size(); ++v) {
    std::vector<double> x, y;
    for (double i : idx) {
      x.push_back(Ms[static_cast<std::size_t>(i)]);
      y.push_back(mse_by_variant[v][static_cast<std::size_t>(i)]);
    }
    if (x.size() >= 2) summary.values.push_back({std::string("MSE slope ") + variants[v].name + " (M 500..10000)", num(loglog_slope(x, y))});
  }
  return summary;
}

BenchSummary run_airfoil_bench(const BenchOptions& o) {
  if (o.data_path.empty()) fail(ErrorCode::kPrecondition, "the airfoil bench needs --data <path to the airfoil self-noise table>");
  BenchSummary summary;
  const auto conv = BandwidthConvention::kFrequencyCount;
  const Dataset raw = load_csv(o.data_path, {}, o.dialect);
  if (raw.cols() != 5) fail(ErrorCode::kShape, "airfoil data must have 5 feature columns and a target column");
  const Dataset data = minmax_normalize(raw);
  summary.values.push_back({"rows", num(data.rows)});

  struct Variant {
    const char* name;
    BasisVector basis;
    SubsetFamily family;
  };
  std::vector<Variant> variants = {{"mixed", airfoil_basis(), {}}, {"cos", BasisVector::uniform(BasisKind::kCos, 5), {}}};

  // Bandwidths are tuned once on the training part of split 0.
  const auto [train0, test0] = split_indices(data.rows, 0.8, o.seed);
  const Dataset tune = select_rows(data, train0);
  const auto [inner_tr, inner_va] = split(tune, 0.8, o.seed + 1);
  const NodeSet tr = to_node_set(inner_tr), va = to_node_set(inner_va);
  std::vector<Row> tuning_rows;
  for (auto& v : variants) {
    double best = std::numeric_limits<double>::infinity();
    SubsetFamily best_family = airfoil_family(4, 2);
    for (int n2 : {2, 4, 6}) {
      for (int n1 : {4, 6, 8, 10, 12}) {
        const SubsetFamily fam = airfoil_family(n1, n2);
        const double e = validation_mse(v.basis, fam, conv, tr, va, o.fit);
        tuning_rows.push_back({v.name, "grid", "(" + num(n1) + "," + num(n2) + ")", num(e), "0"});
        if (e < best) {
          best = e;
          best_family = fam;
        }
      }
    }
    const RefineResult refined = coordinate_refine_bandwidths(v.basis, best_family, tr, va, conv, o.fit);
    for (const auto& st : refined.trace) {
      tuning_rows.push_back({v.name, "refine", st.u.empty() ? "start" : format_subset(st.u) + "=" + num(st.value), num(st.mse),
                             st.accepted ? "1" : "0"});
    }
    v.family = refined.family;
    summary.values.push_back({std::string("bandwidths ") + v.name, family_summary(v.family)});
  }
  summary.files.push_back(output_path(o, "airfoil_tuning.csv"));
  write_table(summary.files.back(), {"basis", "stage", "setting", "mse", "accepted"}, tuning_rows);

  const int reps = o.repetitions > 0 ? o.repetitions : 100;
  std::vector<Row> rows;
  std::vector<std::vector<double>> mse_v(variants.size()), rel_v(variants.size()), rmse_v(variants.size());
  for (int s = 0; s < reps; ++s) {
    const auto [train, test] = split(data, 0.8, o.seed + static_cast<std::uint64_t>(s));
    const NodeSet trn = to_node_set(train), tst = to_node_set(test);
    Row row{num(s)};
    for (std::size_t v = 0; v < variants.size(); ++v) {
      double e = std::numeric_limits<double>::infinity(), rel = e;
      try {
        const MixedModel model = fit(variants[v].basis, apply_convention(variants[v].family, variants[v].basis, conv), trn, o.fit);
        const auto pred = model.predict_real(tst.coords, o.fit.transform);
        e = mse(tst.targets, pred);
        double num2 = 0.0, den2 = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
          num2 += (tst.targets[i] - pred[i]) * (tst.targets[i] - pred[i]);
          den2 += tst.targets[i] * tst.targets[i];
        }
        rel = 100.0 * std::sqrt(num2 / den2);
      } catch (const Error& err) {
        warn(std::string("airfoil split ") + num(s) + " " + variants[v].name + ": " + err.what());
      }
      mse_v[v].push_back(e);
      rel_v[v].push_back(rel);
      rmse_v[v].push_back(std::sqrt(e));
      row.push_back(num(e));
      row.push_back(num(rel));
      row.push_back(num(std::sqrt(e)));
    }
    rows.push_back(std::move(row));
  }
  summary.files.push_back(output_path(o, "airfoil_splits.csv"));
  write_table(summary.files.back(),
              {"split", "mse_mixed", "relerr_pct_mixed", "rmse_mixed", "mse_cos", "relerr_pct_cos", "rmse_cos"}, rows);
  for (std::size_t v = 0; v < variants.size(); ++v) {
    summary.values.push_back({std::string("median MSE ") + variants[v].name, num(median(mse_v[v]))});
    summary.values.push_back({std::string("median 100*|y-f|/|y| ") + variants[v].name, num(median(rel_v[v]))});
    summary.values.push_back({std::string("median RMSE ") + variants[v].name, num(median(rmse_v[v]))});
  }
  summary.values.push_back({"note", "the reference 'relative error' is undefined; MSE, percentage l2 error and RMSE are all reported"});
  return summary;
}

}  // namespace mixt
