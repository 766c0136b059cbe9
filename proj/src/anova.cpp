#include "mixt/anova.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "mixt/error.hpp"

namespace mixt {

namespace {

std::string meta_line(const std::string& key, const std::string& value) { return key + "=" + value + "\n"; }

double parse_number(std::string_view s, const std::string& where) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) fail(ErrorCode::kParse, where + ": cannot parse number '" + std::string(s) + "'");
  return v;
}

}  // namespace

MixedModel::MixedModel(GroupedIndexSet set, std::vector<Complex> coeffs, FitMeta meta)
    : set_(std::move(set)), coeffs_(std::move(coeffs)), meta_(std::move(meta)) {
  if (coeffs_.size() != static_cast<std::size_t>(set_.size())) {
    fail(ErrorCode::kShape, "model has " + std::to_string(coeffs_.size()) + " coefficients but the index set has " + std::to_string(set_.size()));
  }
}

std::vector<Complex> MixedModel::predict(std::span<const double> nodes, const GroupedOptions& options) const {
  GroupedTransform op(set_, nodes, options);
  return op.forward(coeffs_);
}

std::vector<double> MixedModel::predict_real(std::span<const double> nodes, const GroupedOptions& options) const {
  const auto values = predict(nodes, options);
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [](Complex v) { return v.real(); });
  return out;
}

double MixedModel::variance() const {
  double s = 0.0;
  for (const auto& b : set_.blocks()) {
    if (b.u.empty()) continue;
    for (std::int64_t i = 0; i < b.size; ++i) s += std::norm(coeffs_[static_cast<std::size_t>(b.offset + i)]);
  }
  return s;
}

double MixedModel::term_variance(const Subset& u) const {
  if (u.empty()) return 0.0;
  for (const auto& b : set_.blocks()) {
    if (b.u != u) continue;
    double s = 0.0;
    for (std::int64_t i = 0; i < b.size; ++i) s += std::norm(coeffs_[static_cast<std::size_t>(b.offset + i)]);
    return s;
  }
  return 0.0;
}

std::vector<GsiEntry> MixedModel::gsi() const {
  const double var = variance();
  if (!(var > 0.0)) fail(ErrorCode::kDegenerateModel, "degenerate model: variance is zero, sensitivity indices are undefined");
  std::vector<GsiEntry> out;
  for (const auto& b : set_.blocks()) {
    if (b.u.empty()) continue;
    double s = 0.0;
    for (std::int64_t i = 0; i < b.size; ++i) s += std::norm(coeffs_[static_cast<std::size_t>(b.offset + i)]);
    out.push_back({b.u, s / var});
  }
  return out;
}

SubsetFamily MixedModel::truncate(double theta) const {
  if (!(theta > 0.0 && theta < 1.0)) fail(ErrorCode::kDomain, "truncation threshold must lie in (0,1)");
  const std::size_t d = basis().dim();
  std::vector<FamilyTerm> terms;
  terms.push_back({{}, Bandwidths(d, 0)});
  for (const auto& entry : gsi()) {
    if (entry.rho > theta) terms.push_back(*family().find(entry.u));
  }
  return SubsetFamily(d, std::move(terms));
}

std::string MixedModel::to_text() const {
  std::ostringstream os;
  os << "# anova-mixt model\n[basis]\n" << basis().to_string() << "\n[family]\n" << family().to_text() << "[coefficients]\n";
  for (const auto& c : coeffs_) os << format_double(c.real()) << ' ' << format_double(c.imag()) << '\n';
  os << "[meta]\n";
  os << meta_line("num_nodes", std::to_string(meta_.num_nodes));
  os << meta_line("iterations", std::to_string(meta_.iterations));
  os << meta_line("residual_norm", format_double(meta_.residual_norm));
  os << meta_line("stop_reason", meta_.stop_reason.empty() ? "none" : meta_.stop_reason);
  os << meta_line("train_mse", format_double(meta_.train_mse));
  if (!meta_.normalization.empty()) {
    os << "[normalization]\n";
    for (const auto& r : meta_.normalization) os << format_double(r.min) << ' ' << format_double(r.max) << '\n';
  }
  return os.str();
}

MixedModel MixedModel::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line, section;
  std::string basis_text, family_text;
  std::vector<Complex> coeffs;
  FitMeta meta;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    line = line.substr(first);
    const std::string where = "model line " + std::to_string(line_no);
    if (line.front() == '[') {
      section = line;
      if (section != "[basis]" && section != "[family]" && section != "[coefficients]" && section != "[meta]" &&
          section != "[normalization]") {
        fail(ErrorCode::kParse, where + ": unknown section " + section);
      }
      continue;
    }
    if (section == "[basis]") {
      basis_text = line;
    } else if (section == "[family]") {
      family_text += line + "\n";
    } else if (section == "[coefficients]") {
      std::istringstream ls(line);
      std::string re, im, extra;
      if (!(ls >> re >> im) || (ls >> extra)) fail(ErrorCode::kParse, where + ": expected '<re> <im>'");
      coeffs.emplace_back(parse_number(re, where), parse_number(im, where));
    } else if (section == "[meta]") {
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(ErrorCode::kParse, where + ": expected key=value");
      const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
      if (key == "num_nodes") meta.num_nodes = static_cast<std::size_t>(parse_number(value, where));
      else if (key == "iterations") meta.iterations = static_cast<int>(parse_number(value, where));
      else if (key == "residual_norm") meta.residual_norm = parse_number(value, where);
      else if (key == "stop_reason") meta.stop_reason = value == "none" ? "" : value;
      else if (key == "train_mse") meta.train_mse = parse_number(value, where);
    } else if (section == "[normalization]") {
      std::istringstream ls(line);
      std::string lo, hi, extra;
      if (!(ls >> lo >> hi) || (ls >> extra)) fail(ErrorCode::kParse, where + ": expected '<min> <max>'");
      meta.normalization.push_back({parse_number(lo, where), parse_number(hi, where)});
    } else {
      fail(ErrorCode::kParse, where + ": content outside a section");
    }
  }
  if (basis_text.empty()) fail(ErrorCode::kParse, "model: missing [basis] section");
  if (family_text.empty()) fail(ErrorCode::kParse, "model: missing [family] section");
  const BasisVector basis = BasisVector::parse(basis_text);
  SubsetFamily family = SubsetFamily::parse(family_text);
  return MixedModel(GroupedIndexSet(basis, std::move(family)), std::move(coeffs), std::move(meta));
}

void MixedModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write model '" + path + "'");
  out << to_text();
  if (!out) fail(ErrorCode::kIo, "write to '" + path + "' failed");
}

MixedModel MixedModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open model '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

MixedModel fit(const BasisVector& basis, const SubsetFamily& family, std::span<const double> nodes, std::span<const Complex> targets,
               const FitOptions& options) {
  if (family.size() == 0) fail(ErrorCode::kInvalidFamily, "cannot fit an empty family");
  GroupedIndexSet set(basis, family);
  if (set.size() == 0) fail(ErrorCode::kInvalidFamily, "index set is empty; every term has an empty frequency block");
  if (nodes.size() != targets.size() * basis.dim()) fail(ErrorCode::kShape, "fit: node and target counts differ");
  for (const auto& t : targets) {
    if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) fail(ErrorCode::kNumeric, "fit: non-finite target value");
  }
  if (static_cast<std::size_t>(set.size()) >= targets.size()) {
    warn("fit: " + std::to_string(set.size()) + " coefficients for " + std::to_string(targets.size()) + " nodes (no oversampling)");
  }
  GroupedTransform op(set, nodes, options.transform);
  LinearOperator lin;
  lin.rows = op.num_nodes();
  lin.cols = op.num_coeffs();
  lin.forward = [&op](std::span<const Complex> x, std::span<Complex> y) { op.forward(x, y); };
  lin.adjoint = [&op](std::span<const Complex> y, std::span<Complex> x) { op.adjoint(y, x); };
  SolveReport report = lsqr(lin, targets, options.solver);

  FitMeta meta;
  meta.num_nodes = targets.size();
  meta.iterations = report.iterations;
  meta.residual_norm = report.residual_norm;
  meta.stop_reason = std::string(to_string(report.stop));
  meta.train_mse = report.residual_norm * report.residual_norm / static_cast<double>(targets.size());
  return MixedModel(std::move(set), std::move(report.solution), std::move(meta));
}

MixedModel fit(const BasisVector& basis, const SubsetFamily& family, const NodeSet& data, const FitOptions& options) {
  if (data.dim != basis.dim()) fail(ErrorCode::kShape, "fit: data dimension differs from the basis dimension");
  if (!data.has_targets()) fail(ErrorCode::kPrecondition, "fit: node set has no targets");
  std::vector<Complex> y(data.targets.begin(), data.targets.end());
  MixedModel model = fit(basis, family, data.coords, y, options);
  // real targets: report the error of the real-part predictions, as predict does
  FitMeta meta = model.meta();
  meta.train_mse = mse(data.targets, model.predict_real(data.coords, options.transform));
  return MixedModel(model.index_set(), std::vector<Complex>(model.coefficients().begin(), model.coefficients().end()), std::move(meta));
}

double mse(std::span<const Complex> truth, std::span<const Complex> pred) {
  if (truth.size() != pred.size()) fail(ErrorCode::kShape, "mse: length mismatch");
  if (truth.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) s += std::norm(truth[i] - pred[i]);
  return s / static_cast<double>(truth.size());
}

double mse(std::span<const double> truth, std::span<const double> pred) {
  if (truth.size() != pred.size()) fail(ErrorCode::kShape, "mse: length mismatch");
  if (truth.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) s += (truth[i] - pred[i]) * (truth[i] - pred[i]);
  return s / static_cast<double>(truth.size());
}

double validation_mse(const BasisVector& basis, const SubsetFamily& family, BandwidthConvention convention, const NodeSet& train,
                      const NodeSet& valid, const FitOptions& options) {
  try {
    const MixedModel model = fit(basis, apply_convention(family, basis, convention), train, options);
    const double e = mse(valid.targets, model.predict_real(valid.coords, options.transform));
    return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

GridSearchResult grid_search_bandwidths(const BasisVector& basis, int ds, std::span<const int> n1_values, std::span<const int> n2_values,
                                        const NodeSet& train, const NodeSet& valid, BandwidthConvention convention,
                                        const FitOptions& options, int threads) {
  if (ds != 1 && ds != 2) fail(ErrorCode::kDomain, "grid search supports superposition dimension 1 or 2");
  if (ds > static_cast<int>(basis.dim())) fail(ErrorCode::kDomain, "superposition dimension exceeds the spatial dimension");
  std::vector<int> n1(n1_values.begin(), n1_values.end());
  std::vector<int> n2 = ds == 2 ? std::vector<int>(n2_values.begin(), n2_values.end()) : std::vector<int>{0};
  if (n1.empty() || n2.empty()) fail(ErrorCode::kDomain, "grid search needs at least one value per parameter");
  std::sort(n1.begin(), n1.end());
  std::sort(n2.begin(), n2.end());

  GridSearchResult result;
  for (int b : n2) {
    for (int a : n1) result.table.push_back({a, b, std::numeric_limits<double>::infinity()});
  }
  auto run_cell = [&](std::size_t c) {
    GridCell& cell = result.table[c];
    const int params[2] = {cell.n1, cell.n2};
    try {
      const SubsetFamily fam = superposition_family(static_cast<int>(basis.dim()), ds, params);
      cell.mse = validation_mse(basis, fam, convention, train, valid, options);
    } catch (const Error&) {
      cell.mse = std::numeric_limits<double>::infinity();
    }
  };
  const std::size_t cells = result.table.size();
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), cells);
  if (workers <= 1) {
    for (std::size_t c = 0; c < cells; ++c) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < cells; c = next++) run_cell(c);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& cell : result.table) {
    if (cell.mse < result.best_mse) {
      result.best_mse = cell.mse;
      result.best_n1 = cell.n1;
      result.best_n2 = cell.n2;
    }
  }
  if (!std::isfinite(result.best_mse)) {
    result.best_n1 = result.table.front().n1;
    result.best_n2 = result.table.front().n2;
  }
  return result;
}

namespace {

SubsetFamily with_term_value(const SubsetFamily& fam, std::size_t term, int dim, int value) {
  std::vector<FamilyTerm> terms(fam.terms().begin(), fam.terms().end());
  auto& t = terms[term];
  if (dim < 0) {
    for (int j : t.u) t.N[static_cast<std::size_t>(j)] = value;
  } else {
    t.N[static_cast<std::size_t>(dim)] = value;
  }
  return SubsetFamily(fam.dim(), std::move(terms));
}

int term_value(const SubsetFamily& fam, std::size_t term, int dim) {
  const auto& t = fam[term];
  if (dim >= 0) return t.N[static_cast<std::size_t>(dim)];
  int v = 0;
  for (int j : t.u) v = std::max(v, t.N[static_cast<std::size_t>(j)]);
  return v;
}

}  // namespace

RefineResult coordinate_refine(const SubsetFamily& start, const FamilyObjective& objective, const RefineOptions& options) {
  if (options.step <= 0 || options.min_value < 1) fail(ErrorCode::kDomain, "refine: invalid step or minimum");
  std::map<std::string, double> cache;
  auto eval = [&](const SubsetFamily& fam) {
    const std::string key = fam.to_text();
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    double v = objective(fam);
    if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
    cache.emplace(key, v);
    return v;
  };

  RefineResult res{start, eval(start), {}};
  res.trace.push_back({0, {}, -1, 0, res.mse, true});

  auto optimise = [&](int pass, std::size_t term, int dim) {
    const int startv = term_value(res.family, term, dim);
    const Subset& u = res.family[term].u;
    bool improved_up = false;
    for (int v = startv + options.step; v <= options.max_value; v += options.step) {
      SubsetFamily cand = with_term_value(res.family, term, dim, v);
      const double e = eval(cand);
      const bool better = e < res.mse;
      res.trace.push_back({pass, u, dim, v, e, better});
      if (!better) break;
      res.family = std::move(cand);
      res.mse = e;
      improved_up = true;
    }
    if (improved_up) return;
    for (int v = startv - options.step; v >= options.min_value; v -= options.step) {
      SubsetFamily cand = with_term_value(res.family, term, dim, v);
      const double e = eval(cand);
      const bool better = e < res.mse;
      res.trace.push_back({pass, u, dim, v, e, better});
      if (!better) break;
      res.family = std::move(cand);
      res.mse = e;
    }
  };

  for (std::size_t t = start.size(); t-- > 0;) {
    if (!start[t].u.empty()) optimise(1, t, -1);
  }
  if (options.per_entry_pass) {
    for (std::size_t t = start.size(); t-- > 0;) {
      if (start[t].u.size() < 2) continue;  // single-entry terms were handled in pass 1
      for (int j : start[t].u) optimise(2, t, j);
    }
  }
  return res;
}

RefineResult coordinate_refine_bandwidths(const BasisVector& basis, const SubsetFamily& start, const NodeSet& train, const NodeSet& valid,
                                          BandwidthConvention convention, const FitOptions& options, const RefineOptions& refine) {
  return coordinate_refine(
      start, [&](const SubsetFamily& fam) { return validation_mse(basis, fam, convention, train, valid, options); }, refine);
}

}  // namespace mixt
