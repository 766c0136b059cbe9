#include "mixt/mixt.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "mixt/anova.hpp"
#include "mixt/bench.hpp"
#include "mixt/data_io.hpp"
#include "mixt/error.hpp"
#include "mixt/selftest.hpp"

struct mixt_data {
  mixt::Dataset data;
};

struct mixt_family {
  mixt::SubsetFamily family;
};

struct mixt_model {
  mixt::MixedModel model;
};

namespace {

thread_local std::string g_last_error;

class ArgumentError : public std::exception {
 public:
  explicit ArgumentError(std::string what) : what_(std::move(what)) {}
  const char* what() const noexcept override { return what_.c_str(); }

 private:
  std::string what_;
};

template <class F>
mixt_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return MIXT_OK;
  } catch (const mixt::Error& e) {
    g_last_error = e.what();
    return static_cast<mixt_status>(static_cast<int>(e.code()));
  } catch (const ArgumentError& e) {
    g_last_error = e.what();
    return MIXT_E_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MIXT_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MIXT_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return MIXT_E_INTERNAL;
  }
}

template <class T>
void require(const T* p, const char* what) {
  if (p == nullptr) throw ArgumentError(std::string(what) + " is null");
}

void copy_string(const std::string& s, char* buffer, size_t capacity, size_t* needed) {
  if (needed != nullptr) *needed = s.size() + 1;
  if (buffer == nullptr) return;
  if (capacity < s.size() + 1) throw ArgumentError("buffer too small: need " + std::to_string(s.size() + 1) + " bytes");
  std::memcpy(buffer, s.c_str(), s.size() + 1);
}

template <std::size_t K>
void copy_fixed(const std::string& s, char (&dst)[K]) {
  const std::size_t n = std::min(s.size(), K - 1);
  std::memcpy(dst, s.data(), n);
  dst[n] = '\0';
}

mixt::FitOptions to_fit_options(const mixt_fit_options* o) {
  mixt_fit_options d;
  mixt_fit_options_default(&d);
  if (o == nullptr) o = &d;
  if (o->max_iter < 1) throw ArgumentError("max_iter must be positive");
  if (o->threads < 1) throw ArgumentError("threads must be positive");
  mixt::FitOptions f;
  f.solver.max_iter = o->max_iter;
  f.solver.atol = o->atol;
  f.solver.btol = o->btol;
  f.solver.damping = o->damping;
  f.transform.threads = o->threads;
  if (o->nfft_m > 0) f.transform.nfft.m = o->nfft_m;
  if (o->nfft_sigma > 1.0) f.transform.nfft.sigma = o->nfft_sigma;
  return f;
}

mixt::BandwidthConvention to_convention(const mixt_fit_options* o) {
  return o != nullptr && o->convention == MIXT_BANDWIDTH_RANGE ? mixt::BandwidthConvention::kIndexRange
                                                                : mixt::BandwidthConvention::kFrequencyCount;
}

mixt::Dataset from_node_set(const mixt::NodeSet& s) {
  mixt::Dataset d;
  for (std::size_t j = 0; j < s.dim; ++j) d.feature_names.push_back("x" + std::to_string(j + 1));
  d.target_name = "y";
  d.rows = s.size();
  d.features = s.coords;
  d.target = s.targets;
  return d;
}

mixt::NodeSet nodes_of(const mixt_data* d, bool need_targets) {
  require(d, "data");
  if (need_targets && d->data.target.size() != d->data.rows) throw ArgumentError("data set has no targets");
  return mixt::to_node_set(d->data);
}

}  // namespace

extern "C" {

const char* mixt_last_error(void) { return g_last_error.c_str(); }

const char* mixt_status_name(mixt_status status) {
  switch (status) {
    case MIXT_OK: return "ok";
    case MIXT_E_ARGUMENT: return "invalid argument";
    case MIXT_E_INTERNAL: return "internal error";
    default: break;
  }
  const int code = static_cast<int>(status);
  if (code >= 1 && code <= static_cast<int>(mixt::ErrorCode::kPrecondition)) {
    return mixt::error_code_name(static_cast<mixt::ErrorCode>(code));
  }
  return "unknown status";
}

const char* mixt_version(void) { return "1.0.0"; }

void mixt_set_warnings(int enabled) { mixt::set_warnings_enabled(enabled != 0); }

mixt_status mixt_data_sample(const char* basis, size_t M, uint64_t seed, mixt_test_function target, mixt_data** out) {
  return guard([&] {
    require(basis, "basis");
    require(out, "out");
    mixt::NodeSet s = mixt::sample_nodes(mixt::BasisVector::parse(basis), M, seed);
    if (target == MIXT_TARGET_F1) mixt::fill_targets(s, mixt::TestFunction::kF1);
    if (target == MIXT_TARGET_F2) mixt::fill_targets(s, mixt::TestFunction::kF2);
    *out = new mixt_data{from_node_set(s)};
  });
}

mixt_status mixt_data_load(const char* path, const char* target_column, mixt_dialect dialect, mixt_data** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    const auto dl = dialect == MIXT_CSV_WHITESPACE ? mixt::CsvDialect::kWhitespace : mixt::CsvDialect::kComma;
    *out = new mixt_data{mixt::load_csv(path, target_column ? target_column : "", dl)};
  });
}

mixt_status mixt_data_from_arrays(size_t rows, size_t dim, const double* features, const double* targets, mixt_data** out) {
  return guard([&] {
    require(out, "out");
    if (rows > 0 && dim > 0) require(features, "features");
    mixt::NodeSet s;
    s.dim = dim;
    s.coords.assign(features, features + rows * dim);
    if (targets != nullptr) s.targets.assign(targets, targets + rows);
    *out = new mixt_data{from_node_set(s)};
  });
}

void mixt_data_free(mixt_data* data) { delete data; }

mixt_status mixt_data_shape(const mixt_data* data, size_t* rows, size_t* dim) {
  return guard([&] {
    require(data, "data");
    if (rows) *rows = data->data.rows;
    if (dim) *dim = data->data.cols();
  });
}

mixt_status mixt_data_has_targets(const mixt_data* data, int* has_targets) {
  return guard([&] {
    require(data, "data");
    require(has_targets, "has_targets");
    *has_targets = data->data.rows > 0 && data->data.target.size() == data->data.rows;
  });
}

mixt_status mixt_data_features(const mixt_data* data, double* out, size_t capacity) {
  return guard([&] {
    require(data, "data");
    require(out, "out");
    const auto& f = data->data.features;
    if (capacity < f.size()) throw ArgumentError("feature buffer too small");
    std::copy(f.begin(), f.end(), out);
  });
}

mixt_status mixt_data_targets(const mixt_data* data, double* out, size_t capacity) {
  return guard([&] {
    require(data, "data");
    require(out, "out");
    const auto& t = data->data.target;
    if (t.size() != data->data.rows) throw ArgumentError("data set has no targets");
    if (capacity < t.size()) throw ArgumentError("target buffer too small");
    std::copy(t.begin(), t.end(), out);
  });
}

mixt_status mixt_data_normalize(mixt_data* data) {
  return guard([&] {
    require(data, "data");
    data->data = mixt::minmax_normalize(mixt::denormalize(data->data));
  });
}

mixt_status mixt_data_split(const mixt_data* data, double fraction, uint64_t seed, mixt_data** train, mixt_data** test) {
  return guard([&] {
    require(data, "data");
    require(train, "train");
    require(test, "test");
    auto [a, b] = mixt::split(data->data, fraction, seed);
    auto* ta = new mixt_data{std::move(a)};
    try {
      *test = new mixt_data{std::move(b)};
    } catch (...) {
      delete ta;
      throw;
    }
    *train = ta;
  });
}

mixt_status mixt_data_save(const mixt_data* data, const char* path) {
  return guard([&] {
    require(data, "data");
    require(path, "path");
    const auto& d = data->data;
    std::vector<std::string> header = d.feature_names;
    const bool targets = d.target.size() == d.rows && d.rows > 0;
    if (targets) header.push_back(d.target_name.empty() ? "y" : d.target_name);
    std::vector<std::vector<double>> rows(d.rows);
    for (std::size_t r = 0; r < d.rows; ++r) {
      rows[r].assign(d.features.begin() + static_cast<std::ptrdiff_t>(r * d.cols()),
                     d.features.begin() + static_cast<std::ptrdiff_t>((r + 1) * d.cols()));
      if (targets) rows[r].push_back(d.target[r]);
    }
    mixt::write_csv(path, header, rows);
  });
}

mixt_status mixt_family_superposition(size_t dim, int ds, const int* params, mixt_family** out) {
  return guard([&] {
    require(params, "params");
    require(out, "out");
    if (ds < 1) throw ArgumentError("superposition dimension must be positive");
    *out = new mixt_family{mixt::superposition_family(static_cast<int>(dim), ds, std::span<const int>(params, static_cast<std::size_t>(ds)))};
  });
}

mixt_status mixt_family_parse(const char* text, mixt_family** out) {
  return guard([&] {
    require(text, "text");
    require(out, "out");
    *out = new mixt_family{mixt::SubsetFamily::parse(text)};
  });
}

mixt_status mixt_family_load(const char* path, mixt_family** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    std::ifstream in(path);
    if (!in) throw mixt::Error(mixt::ErrorCode::kIo, std::string("cannot open family file '") + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    *out = new mixt_family{mixt::SubsetFamily::parse(ss.str())};
  });
}

void mixt_family_free(mixt_family* family) { delete family; }

mixt_status mixt_family_size(const mixt_family* family, size_t* terms) {
  return guard([&] {
    require(family, "family");
    require(terms, "terms");
    *terms = family->family.size();
  });
}

mixt_status mixt_family_text(const mixt_family* family, char* buffer, size_t capacity, size_t* needed) {
  return guard([&] {
    require(family, "family");
    copy_string(family->family.to_text(), buffer, capacity, needed);
  });
}

void mixt_fit_options_default(mixt_fit_options* options) {
  if (options == nullptr) return;
  const mixt::FitOptions f;
  options->max_iter = f.solver.max_iter;
  options->atol = f.solver.atol;
  options->btol = f.solver.btol;
  options->damping = f.solver.damping;
  options->threads = f.transform.threads;
  options->nfft_m = f.transform.nfft.m;
  options->nfft_sigma = f.transform.nfft.sigma;
  options->convention = MIXT_BANDWIDTH_COUNT;
}

mixt_status mixt_fit(const char* basis, const mixt_family* family, const mixt_data* train, const mixt_fit_options* options,
                     mixt_model** out) {
  return guard([&] {
    require(basis, "basis");
    require(family, "family");
    require(out, "out");
    const mixt::BasisVector b = mixt::BasisVector::parse(basis);
    const mixt::NodeSet nodes = nodes_of(train, true);
    mixt::MixedModel m = mixt::fit(b, mixt::apply_convention(family->family, b, to_convention(options)), nodes, to_fit_options(options));
    m.set_normalization(train->data.normalization);
    *out = new mixt_model{std::move(m)};
  });
}

mixt_status mixt_grid_search(const char* basis, int ds, const int* n1, size_t n_n1, const int* n2, size_t n_n2, const mixt_data* train,
                             const mixt_data* valid, const mixt_fit_options* options, mixt_grid_result* result, double* cells) {
  return guard([&] {
    require(basis, "basis");
    require(n1, "n1");
    require(result, "result");
    if (ds == 2) require(n2, "n2");
    const mixt::BasisVector b = mixt::BasisVector::parse(basis);
    const int threads = options ? options->threads : 1;
    const auto r = mixt::grid_search_bandwidths(b, ds, std::span<const int>(n1, n_n1), std::span<const int>(n2 ? n2 : n1, n2 ? n_n2 : 0),
                                                nodes_of(train, true), nodes_of(valid, true), to_convention(options),
                                                to_fit_options(options), threads);
    result->best_n1 = r.best_n1;
    result->best_n2 = r.best_n2;
    result->best_mse = r.best_mse;
    if (cells != nullptr) {
      for (std::size_t i = 0; i < r.table.size(); ++i) cells[i] = r.table[i].mse;
    }
  });
}

mixt_status mixt_refine(const char* basis, const mixt_family* start, const mixt_data* train, const mixt_data* valid,
                        const mixt_fit_options* options, int per_entry_pass, mixt_family** out, double* mse) {
  return guard([&] {
    require(basis, "basis");
    require(start, "start");
    require(out, "out");
    mixt::RefineOptions ro;
    ro.per_entry_pass = per_entry_pass != 0;
    auto fit_opts = to_fit_options(options);
    const auto r = mixt::coordinate_refine_bandwidths(mixt::BasisVector::parse(basis), start->family, nodes_of(train, true),
                                                      nodes_of(valid, true), to_convention(options), fit_opts, ro);
    if (mse) *mse = r.mse;
    *out = new mixt_family{r.family};
  });
}

void mixt_model_free(mixt_model* model) { delete model; }

mixt_status mixt_model_save(const mixt_model* model, const char* path) {
  return guard([&] {
    require(model, "model");
    require(path, "path");
    model->model.save(path);
  });
}

mixt_status mixt_model_load(const char* path, mixt_model** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new mixt_model{mixt::MixedModel::load(path)};
  });
}

mixt_status mixt_model_dim(const mixt_model* model, size_t* dim) {
  return guard([&] {
    require(model, "model");
    require(dim, "dim");
    *dim = model->model.basis().dim();
  });
}

mixt_status mixt_model_num_coeffs(const mixt_model* model, size_t* count) {
  return guard([&] {
    require(model, "model");
    require(count, "count");
    *count = model->model.coefficients().size();
  });
}

mixt_status mixt_model_basis(const mixt_model* model, char* buffer, size_t capacity, size_t* needed) {
  return guard([&] {
    require(model, "model");
    copy_string(model->model.basis().to_string(), buffer, capacity, needed);
  });
}

mixt_status mixt_model_family(const mixt_model* model, mixt_family** out) {
  return guard([&] {
    require(model, "model");
    require(out, "out");
    *out = new mixt_family{model->model.family()};
  });
}

mixt_status mixt_model_fit_info(const mixt_model* model, mixt_fit_info* info) {
  return guard([&] {
    require(model, "model");
    require(info, "info");
    const auto& m = model->model.meta();
    info->num_nodes = m.num_nodes;
    info->iterations = m.iterations;
    info->residual_norm = m.residual_norm;
    info->train_mse = m.train_mse;
    copy_fixed(m.stop_reason, info->stop_reason);
  });
}

mixt_status mixt_model_set_normalization(mixt_model* model, const mixt_data* reference) {
  return guard([&] {
    require(model, "model");
    require(reference, "reference");
    if (reference->data.cols() != model->model.basis().dim()) throw ArgumentError("reference data dimension differs from the model");
    model->model.set_normalization(reference->data.normalization.empty() ? mixt::feature_extremes(reference->data)
                                                                         : reference->data.normalization);
  });
}

mixt_status mixt_model_has_normalization(const mixt_model* model, int* has) {
  return guard([&] {
    require(model, "model");
    require(has, "has");
    *has = !model->model.meta().normalization.empty();
  });
}

mixt_status mixt_model_predict(const mixt_model* model, const mixt_data* data, double* out, size_t capacity) {
  return guard([&] {
    require(model, "model");
    require(data, "data");
    require(out, "out");
    if (data->data.cols() != model->model.basis().dim()) {
      throw mixt::Error(mixt::ErrorCode::kShape, "data has " + std::to_string(data->data.cols()) + " feature columns, model expects " +
                                                     std::to_string(model->model.basis().dim()));
    }
    if (capacity < data->data.rows) throw ArgumentError("prediction buffer too small");
    const auto& ext = model->model.meta().normalization;
    const mixt::Dataset prepared = ext.empty() ? data->data : mixt::minmax_normalize(mixt::denormalize(data->data), ext);
    const auto pred = model->model.predict_real(prepared.features);
    std::copy(pred.begin(), pred.end(), out);
  });
}

mixt_status mixt_model_variance(const mixt_model* model, double* variance) {
  return guard([&] {
    require(model, "model");
    require(variance, "variance");
    *variance = model->model.variance();
  });
}

mixt_status mixt_model_gsi(const mixt_model* model, mixt_gsi_entry* out, size_t capacity, size_t* count) {
  return guard([&] {
    require(model, "model");
    const auto gsi = model->model.gsi();
    if (count) *count = gsi.size();
    if (out == nullptr) return;
    if (capacity < gsi.size()) throw ArgumentError("gsi buffer too small: need " + std::to_string(gsi.size()) + " entries");
    for (std::size_t i = 0; i < gsi.size(); ++i) {
      copy_fixed(mixt::format_subset(gsi[i].u), out[i].term);
      out[i].rho = gsi[i].rho;
    }
  });
}

mixt_status mixt_model_truncate(const mixt_model* model, double theta, mixt_family** out) {
  return guard([&] {
    require(model, "model");
    require(out, "out");
    *out = new mixt_family{model->model.truncate(theta)};
  });
}

mixt_status mixt_selftest(uint64_t seed, int instances, int nfft_m, mixt_suite_result* out, size_t capacity, size_t* count) {
  return guard([&] {
    mixt::SelftestOptions o;
    o.seed = seed;
    if (instances > 0) o.instances = instances;
    if (nfft_m > 0) o.nfft.m = nfft_m;
    const auto suites = mixt::run_selftest(o);
    if (count) *count = suites.size();
    if (out == nullptr) return;
    if (capacity < suites.size()) throw ArgumentError("suite buffer too small");
    for (std::size_t i = 0; i < suites.size(); ++i) {
      copy_fixed(suites[i].name, out[i].name);
      out[i].cases = suites[i].cases;
      out[i].max_error = suites[i].max_error;
      out[i].tolerance = suites[i].tolerance;
      out[i].pass = suites[i].pass;
    }
  });
}

void mixt_bench_options_default(mixt_bench_options* options) {
  if (options == nullptr) return;
  const mixt::BenchOptions b;
  options->out_dir = ".";
  options->seed = b.seed;
  options->threads = b.threads;
  options->full = 0;
  options->repetitions = 0;
  options->theta = b.theta;
  options->data_path = nullptr;
  options->dialect = MIXT_CSV_WHITESPACE;
}

mixt_status mixt_bench(const char* name, const mixt_bench_options* options, mixt_report_fn report, void* user) {
  return guard([&] {
    require(name, "name");
    mixt_bench_options d;
    mixt_bench_options_default(&d);
    if (options == nullptr) options = &d;
    mixt::BenchOptions o;
    o.out_dir = options->out_dir ? options->out_dir : ".";
    o.seed = options->seed;
    o.threads = std::max(1, options->threads);
    o.full = options->full != 0;
    o.repetitions = options->repetitions;
    o.theta = options->theta;
    o.data_path = options->data_path ? options->data_path : "";
    o.dialect = options->dialect == MIXT_CSV_COMMA ? mixt::CsvDialect::kComma : mixt::CsvDialect::kWhitespace;
    const std::string which = name;
    mixt::BenchSummary s;
    if (which == "f1") s = mixt::run_f1_bench(o);
    else if (which == "f2") s = mixt::run_f2_bench(o);
    else if (which == "airfoil") s = mixt::run_airfoil_bench(o);
    else throw ArgumentError("unknown bench '" + which + "' (expected f1, f2 or airfoil)");
    if (report != nullptr) {
      for (const auto& [k, v] : s.values) report(k.c_str(), v.c_str(), user);
      for (const auto& f : s.files) report("file", f.c_str(), user);
    }
  });
}

}  // extern "C"
