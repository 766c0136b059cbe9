// anova-mixt: command-line driver over the libmixt C interface.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "mixt/mixt.h"

namespace {

struct CliFailure {
  int exit_code;
  std::string message;
};

void check(mixt_status s, const std::string& context) {
  if (s != MIXT_OK) throw CliFailure{2, context + ": " + mixt_status_name(s) + ": " + mixt_last_error()};
}

struct DataDeleter {
  void operator()(mixt_data* p) const { mixt_data_free(p); }
};
struct FamilyDeleter {
  void operator()(mixt_family* p) const { mixt_family_free(p); }
};
struct ModelDeleter {
  void operator()(mixt_model* p) const { mixt_model_free(p); }
};
using DataPtr = std::unique_ptr<mixt_data, DataDeleter>;
using FamilyPtr = std::unique_ptr<mixt_family, FamilyDeleter>;
using ModelPtr = std::unique_ptr<mixt_model, ModelDeleter>;

std::string family_text(const mixt_family* f) {
  size_t need = 0;
  check(mixt_family_text(f, nullptr, 0, &need), "family");
  std::string s(need, '\0');
  check(mixt_family_text(f, s.data(), s.size(), &need), "family");
  s.pop_back();
  return s;
}

std::vector<int> parse_list(const std::string& text, const char* flag) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto colon = tok.find(':');
    try {
      if (colon == std::string::npos) {
        out.push_back(std::stoi(tok));
      } else {
        // lo:hi or lo:hi:step
        const auto c2 = tok.find(':', colon + 1);
        const int lo = std::stoi(tok.substr(0, colon));
        const int hi = std::stoi(tok.substr(colon + 1, c2 == std::string::npos ? std::string::npos : c2 - colon - 1));
        const int step = c2 == std::string::npos ? 2 : std::stoi(tok.substr(c2 + 1));
        if (step <= 0) throw std::invalid_argument("step");
        for (int v = lo; v <= hi; v += step) out.push_back(v);
      }
    } catch (const std::exception&) {
      throw CliFailure{1, std::string(flag) + ": cannot parse '" + tok + "' (expected integers, 'a,b,c' or 'lo:hi[:step]')"};
    }
  }
  if (out.empty()) throw CliFailure{1, std::string(flag) + ": empty list"};
  return out;
}

struct Common {
  std::uint64_t seed = 1;
  int threads = 1;
  bool quiet = false;
};

struct DataArgs {
  std::string path;
  std::string target;
  std::string dialect = "comma";
  std::string synthetic;  // f1 | f2
  std::size_t nodes = 1000;
  bool normalize = false;
};

void add_data_flags(CLI::App* app, DataArgs& d) {
  app->add_option("--data", d.path, "Input table (header row; last column is the target unless --target)");
  app->add_option("--target", d.target, "Target column name or 1-based index");
  app->add_option("--dialect", d.dialect, "Table dialect")->check(CLI::IsMember({"comma", "whitespace"}));
  app->add_option("--synthetic", d.synthetic, "Sample a test function instead of reading --data")->check(CLI::IsMember({"f1", "f2"}));
  app->add_option("--nodes", d.nodes, "Number of synthetic nodes");
  app->add_flag("--normalize", d.normalize, "Min-max scale features to [0,1] (extremes are stored in the model)");
}

DataPtr load_data(const DataArgs& d, const std::string& basis, std::uint64_t seed) {
  mixt_data* raw = nullptr;
  if (!d.synthetic.empty()) {
    if (basis.empty()) throw CliFailure{1, "--synthetic needs --basis"};
    check(mixt_data_sample(basis.c_str(), d.nodes, seed, d.synthetic == "f1" ? MIXT_TARGET_F1 : MIXT_TARGET_F2, &raw), "sampling");
  } else {
    if (d.path.empty()) throw CliFailure{1, "--data or --synthetic is required"};
    check(mixt_data_load(d.path.c_str(), d.target.c_str(), d.dialect == "whitespace" ? MIXT_CSV_WHITESPACE : MIXT_CSV_COMMA, &raw),
          "reading '" + d.path + "'");
  }
  DataPtr data(raw);
  if (d.normalize) check(mixt_data_normalize(data.get()), "normalizing");
  return data;
}

struct FitArgs {
  std::string basis;
  int superposition = 2;
  std::string family_path;
  std::string n1 = "12";
  std::string n2 = "10";
  std::string convention = "count";
  int max_iter = 50;
  double atol = 1e-8;
  double damping = 0.0;
  int nfft_m = 0;
  double fraction = 0.8;
  bool refine = false;
  std::string model_path = "model.txt";
  std::string family_out;
};

mixt_fit_options fit_options(const FitArgs& a, const Common& c) {
  mixt_fit_options o;
  mixt_fit_options_default(&o);
  o.max_iter = a.max_iter;
  o.atol = o.btol = a.atol;
  o.damping = a.damping;
  o.threads = c.threads;
  if (a.nfft_m > 0) o.nfft_m = a.nfft_m;
  o.convention = a.convention == "range" ? MIXT_BANDWIDTH_RANGE : MIXT_BANDWIDTH_COUNT;
  return o;
}

int cmd_selftest(const Common& c, int instances, int nfft_m) {
  std::vector<mixt_suite_result> suites(16);
  size_t n = 0;
  check(mixt_selftest(c.seed, instances, nfft_m, suites.data(), suites.size(), &n), "selftest");
  bool ok = true;
  std::printf("%-30s %6s %12s %10s  %s\n", "suite", "cases", "max_error", "tol", "result");
  for (size_t i = 0; i < n; ++i) {
    const auto& s = suites[i];
    std::printf("%-30s %6d %12.3e %10.1e  %s\n", s.name, s.cases, s.max_error, s.tolerance, s.pass ? "PASS" : "FAIL");
    ok = ok && s.pass;
  }
  return ok ? 0 : 1;
}

int cmd_fit(const Common& c, const FitArgs& a, const DataArgs& d) {
  if (a.basis.empty()) throw CliFailure{1, "--basis is required (e.g. exp,alg,cos,alg)"};
  DataPtr data = load_data(d, a.basis, c.seed);
  const mixt_fit_options opts = fit_options(a, c);
  size_t rows = 0, dim = 0;
  check(mixt_data_shape(data.get(), &rows, &dim), "data");

  FamilyPtr family;
  if (!a.family_path.empty()) {
    mixt_family* f = nullptr;
    check(mixt_family_load(a.family_path.c_str(), &f), "family '" + a.family_path + "'");
    family.reset(f);
  } else {
    const auto n1 = parse_list(a.n1, "--n1");
    const auto n2 = parse_list(a.n2, "--n2");
    int best[2] = {n1.front(), n2.front()};
    if (n1.size() > 1 || n2.size() > 1) {
      mixt_data *tr = nullptr, *va = nullptr;
      check(mixt_data_split(data.get(), a.fraction, c.seed + 1, &tr, &va), "validation split");
      DataPtr train(tr), valid(va);
      std::vector<double> cells(n1.size() * n2.size());
      mixt_grid_result g{};
      check(mixt_grid_search(a.basis.c_str(), a.superposition, n1.data(), n1.size(), n2.data(), n2.size(), train.get(), valid.get(), &opts,
                             &g, cells.data()),
            "grid search");
      if (!c.quiet) {
        std::printf("grid search over %zu cells: best (n1, n2) = (%d, %d), validation MSE %.6g\n", cells.size(), g.best_n1, g.best_n2,
                    g.best_mse);
      }
      best[0] = g.best_n1;
      best[1] = g.best_n2;
    }
    mixt_family* f = nullptr;
    check(mixt_family_superposition(dim, a.superposition, best, &f), "superposition family");
    family.reset(f);
  }

  if (a.refine) {
    mixt_data *tr = nullptr, *va = nullptr;
    check(mixt_data_split(data.get(), a.fraction, c.seed + 1, &tr, &va), "validation split");
    DataPtr train(tr), valid(va);
    mixt_family* f = nullptr;
    double e = 0.0;
    check(mixt_refine(a.basis.c_str(), family.get(), train.get(), valid.get(), &opts, 1, &f, &e), "bandwidth refinement");
    family.reset(f);
    if (!c.quiet) std::printf("refined bandwidths, validation MSE %.6g\n", e);
  }

  mixt_model* m = nullptr;
  check(mixt_fit(a.basis.c_str(), family.get(), data.get(), &opts, &m), "fit");
  ModelPtr model(m);
  check(mixt_model_save(model.get(), a.model_path.c_str()), "saving model");
  if (!a.family_out.empty()) {
    std::ofstream out(a.family_out);
    out << family_text(family.get());
    if (!out) throw CliFailure{2, "cannot write '" + a.family_out + "'"};
  }
  mixt_fit_info info{};
  size_t ncoef = 0;
  check(mixt_model_fit_info(model.get(), &info), "fit info");
  check(mixt_model_num_coeffs(model.get(), &ncoef), "fit info");
  std::printf("nodes %zu\ncoefficients %zu\niterations %d\nstop %s\nresidual_norm %.10g\ntrain_mse %.10g\nmodel %s\n", info.num_nodes,
              ncoef, info.iterations, info.stop_reason, info.residual_norm, info.train_mse, a.model_path.c_str());
  return 0;
}

int cmd_predict(const Common& c, const std::string& model_path, const DataArgs& d, const std::string& out_path) {
  mixt_model* m = nullptr;
  check(mixt_model_load(model_path.c_str(), &m), "loading model '" + model_path + "'");
  ModelPtr model(m);
  size_t need = 0;
  check(mixt_model_basis(model.get(), nullptr, 0, &need), "model");
  std::string basis(need, '\0');
  check(mixt_model_basis(model.get(), basis.data(), basis.size(), &need), "model");
  basis.pop_back();
  DataArgs dd = d;
  dd.normalize = false;  // the model applies its stored extremes
  DataPtr data = load_data(dd, basis, c.seed);
  size_t rows = 0, dim = 0;
  check(mixt_data_shape(data.get(), &rows, &dim), "data");
  std::vector<double> pred(rows);
  check(mixt_model_predict(model.get(), data.get(), pred.data(), pred.size()), "predict");
  int has_y = 0;
  check(mixt_data_has_targets(data.get(), &has_y), "data");
  std::vector<double> y(has_y ? rows : 0);
  if (has_y) check(mixt_data_targets(data.get(), y.data(), y.size()), "data");

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw CliFailure{2, "cannot write '" + out_path + "'"};
    out = &file;
  }
  *out << (has_y ? "row,prediction,target,squared_error\n" : "row,prediction\n");
  char buf[64];
  double sse = 0.0;
  for (size_t i = 0; i < rows; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", pred[i]);
    *out << i << ',' << buf;
    if (has_y) {
      const double e = (pred[i] - y[i]) * (pred[i] - y[i]);
      sse += e;
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g", y[i], e);
      *out << buf;
    }
    *out << '\n';
  }
  if (has_y && !out_path.empty()) std::printf("mse %.10g\n", rows ? sse / static_cast<double>(rows) : 0.0);
  return 0;
}

int cmd_gsi(const std::string& model_path, double theta, const std::string& out_path, const std::string& family_out) {
  mixt_model* m = nullptr;
  check(mixt_model_load(model_path.c_str(), &m), "loading model '" + model_path + "'");
  ModelPtr model(m);
  size_t n = 0;
  check(mixt_model_gsi(model.get(), nullptr, 0, &n), "gsi");
  std::vector<mixt_gsi_entry> gsi(n);
  check(mixt_model_gsi(model.get(), gsi.data(), gsi.size(), &n), "gsi");
  std::stable_sort(gsi.begin(), gsi.end(), [](const auto& a, const auto& b) { return a.rho > b.rho; });

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw CliFailure{2, "cannot write '" + out_path + "'"};
    out = &file;
  }
  *out << "term,gsi,above_theta\n";
  char buf[64];
  int active = 0;
  for (const auto& g : gsi) {
    std::snprintf(buf, sizeof buf, "%.10g", g.rho);
    const bool keep = g.rho > theta;
    active += keep;
    *out << '"' << g.term << "\"," << buf << ',' << (keep ? 1 : 0) << '\n';
  }
  if (!out_path.empty()) std::printf("%d of %zu terms above theta = %g\n", active, gsi.size(), theta);
  if (!family_out.empty()) {
    mixt_family* f = nullptr;
    check(mixt_model_truncate(model.get(), theta, &f), "truncate");
    FamilyPtr fam(f);
    std::ofstream fo(family_out);
    fo << family_text(fam.get());
    if (!fo) throw CliFailure{2, "cannot write '" + family_out + "'"};
  }
  return 0;
}

void print_report(const char* key, const char* value, void*) { std::printf("%-40s %s\n", key, value); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-basis ANOVA approximation: fits, sensitivity indices, self-tests and benchmarks"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from a TOML/INI file (command-line flags take precedence)");
  Common common;
  app.add_option("--seed", common.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", common.threads, "Worker threads (1 gives exact determinism)")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", common.quiet, "Suppress warnings and progress lines");

  auto* selftest = app.add_subcommand("selftest", "Run the transform, factorization and solver oracle suites");
  int instances = 40, st_m = 0;
  selftest->add_option("--instances", instances, "Random instances per suite")->check(CLI::PositiveNumber);
  selftest->add_option("--nfft-m", st_m, "Window half-width for the transform suites");

  FitArgs fa;
  DataArgs fd;
  auto* fitc = app.add_subcommand("fit", "Fit a model and write it to --model");
  fitc->add_option("--basis", fa.basis, "Per-dimension basis, e.g. exp,alg,cos,alg");
  fitc->add_option("--superposition", fa.superposition, "Superposition dimension d_s of the family")->check(CLI::Range(1, 8));
  fitc->add_option("--family", fa.family_path, "Explicit family file (lines 'u=1,2 N=8,8,0,0')");
  fitc->add_option("--n1", fa.n1, "Order-1 bandwidth, or a list/range (a,b or lo:hi[:step]) to grid-search");
  fitc->add_option("--n2", fa.n2, "Order-2 bandwidth, or a list/range to grid-search");
  fitc->add_option("--convention", fa.convention, "Bandwidth units: count (frequencies per dimension) or range (literal index range)")
      ->check(CLI::IsMember({"count", "range"}));
  fitc->add_option("--max-iter", fa.max_iter, "LSQR iteration cap")->check(CLI::PositiveNumber);
  fitc->add_option("--tol", fa.atol, "LSQR atol = btol");
  fitc->add_option("--damping", fa.damping, "Tikhonov damping");
  fitc->add_option("--nfft-m", fa.nfft_m, "Window half-width");
  fitc->add_option("--train-fraction", fa.fraction, "Training share when searching or refining on a validation split");
  fitc->add_flag("--refine", fa.refine, "Refine per-term bandwidths on a validation split before the final fit");
  fitc->add_option("--model", fa.model_path, "Output model file");
  fitc->add_option("--family-out", fa.family_out, "Also write the family used");
  add_data_flags(fitc, fd);

  std::string model_path, out_path, family_out;
  DataArgs pd;
  auto* predict = app.add_subcommand("predict", "Evaluate a model on a table");
  predict->add_option("--model", model_path, "Model file")->required();
  predict->add_option("--out", out_path, "Prediction CSV (stdout when omitted)");
  add_data_flags(predict, pd);

  double theta = 1e-2;
  auto* gsi = app.add_subcommand("gsi", "Global sensitivity indices of a model, sorted descending");
  gsi->add_option("--model", model_path, "Model file")->required();
  gsi->add_option("--theta", theta, "Truncation threshold")->capture_default_str();
  gsi->add_option("--out", out_path, "GSI CSV (stdout when omitted)");
  gsi->add_option("--family-out", family_out, "Write the truncated family (terms above theta)");

  std::string bench_name;
  mixt_bench_options bo;
  mixt_bench_options_default(&bo);
  std::string bench_out = "results", bench_data, bench_dialect = "whitespace";
  bool full = false;
  int reps = 0;
  auto* bench = app.add_subcommand("bench", "Reproduce the f1, f2 or airfoil experiments as CSV tables");
  bench->add_option("name", bench_name, "f1, f2 or airfoil")->required()->check(CLI::IsMember({"f1", "f2", "airfoil"}));
  bench->add_option("--out", bench_out, "Output directory")->capture_default_str();
  bench->add_option("--data", bench_data, "Airfoil self-noise table");
  bench->add_option("--dialect", bench_dialect, "Table dialect")->check(CLI::IsMember({"comma", "whitespace"}));
  bench->add_flag("--full", full, "Full-size grids and repetition counts");
  bench->add_option("--repetitions", reps, "Override the number of repeated runs");
  bench->add_option("--theta", theta, "Truncation threshold for the f1 pilot fit")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  if (common.quiet) mixt_set_warnings(0);

  try {
    if (*selftest) return cmd_selftest(common, instances, st_m);
    if (*fitc) return cmd_fit(common, fa, fd);
    if (*predict) return cmd_predict(common, model_path, pd, out_path);
    if (*gsi) return cmd_gsi(model_path, theta, out_path, family_out);
    if (*bench) {
      bo.out_dir = bench_out.c_str();
      bo.seed = common.seed;
      bo.threads = common.threads;
      bo.full = full;
      bo.repetitions = reps;
      bo.theta = theta;
      bo.data_path = bench_data.empty() ? nullptr : bench_data.c_str();
      bo.dialect = bench_dialect == "comma" ? MIXT_CSV_COMMA : MIXT_CSV_WHITESPACE;
      check(mixt_bench(bench_name.c_str(), &bo, print_report, nullptr), "bench " + bench_name);
      return 0;
    }
  } catch (const CliFailure& f) {
    std::fprintf(stderr, "anova-mixt: %s\n", f.message.c_str());
    return f.exit_code;
  }
  return 1;
}
