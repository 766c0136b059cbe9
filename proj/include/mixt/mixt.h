#ifndef MIXT_MIXT_H
#define MIXT_MIXT_H

/*
 * C interface to the mixed-basis ANOVA approximation library.
 *
 * All objects are opaque handles released with the matching *_free call.
 * Every function returning mixt_status records a message retrievable with
 * mixt_last_error() (thread-local, valid until the next call on that thread).
 * Nodes and features are row-major, one row per sample.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(MIXT_BUILDING_LIBRARY)
#define MIXT_API __attribute__((visibility("default")))
#else
#define MIXT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mixt_status {
  MIXT_OK = 0,
  MIXT_E_DOMAIN = 1,
  MIXT_E_SHAPE = 2,
  MIXT_E_INVALID_BANDWIDTH = 3,
  MIXT_E_INVALID_FAMILY = 4,
  MIXT_E_SINGULARITY = 5,
  MIXT_E_ADJOINT_MISMATCH = 6,
  MIXT_E_NUMERIC = 7,
  MIXT_E_DEGENERATE_MODEL = 8,
  MIXT_E_PARSE = 9,
  MIXT_E_IO = 10,
  MIXT_E_PRECONDITION = 11,
  MIXT_E_ARGUMENT = 50, /* null handle or pointer, buffer too small */
  MIXT_E_INTERNAL = 99
} mixt_status;

typedef struct mixt_data mixt_data;
typedef struct mixt_family mixt_family;
typedef struct mixt_model mixt_model;

MIXT_API const char* mixt_last_error(void);
MIXT_API const char* mixt_status_name(mixt_status status);
MIXT_API const char* mixt_version(void);
MIXT_API void mixt_set_warnings(int enabled);

/* ---- data ---- */

typedef enum mixt_test_function { MIXT_TARGET_NONE = 0, MIXT_TARGET_F1 = 1, MIXT_TARGET_F2 = 2 } mixt_test_function;
typedef enum mixt_dialect { MIXT_CSV_COMMA = 0, MIXT_CSV_WHITESPACE = 1 } mixt_dialect;

/* M nodes drawn for `basis` (e.g. "exp,alg,cos,alg"); alg dimensions follow the arcsine density. */
MIXT_API mixt_status mixt_data_sample(const char* basis, size_t M, uint64_t seed, mixt_test_function target, mixt_data** out);
/* Table with a header row; `target_column` is a name or 1-based index, NULL or "" for the last column. */
MIXT_API mixt_status mixt_data_load(const char* path, const char* target_column, mixt_dialect dialect, mixt_data** out);
MIXT_API mixt_status mixt_data_from_arrays(size_t rows, size_t dim, const double* features, const double* targets, mixt_data** out);
MIXT_API void mixt_data_free(mixt_data* data);

MIXT_API mixt_status mixt_data_shape(const mixt_data* data, size_t* rows, size_t* dim);
MIXT_API mixt_status mixt_data_has_targets(const mixt_data* data, int* has_targets);
/* Copies rows*dim features / rows targets into caller buffers of the given capacity. */
MIXT_API mixt_status mixt_data_features(const mixt_data* data, double* out, size_t capacity);
MIXT_API mixt_status mixt_data_targets(const mixt_data* data, double* out, size_t capacity);
/* Min-max scaling to [0,1] using the extremes of all rows. */
MIXT_API mixt_status mixt_data_normalize(mixt_data* data);
/* Seeded 80/20-style split: the first floor(fraction*rows) permuted rows train. */
MIXT_API mixt_status mixt_data_split(const mixt_data* data, double fraction, uint64_t seed, mixt_data** train, mixt_data** test);
MIXT_API mixt_status mixt_data_save(const mixt_data* data, const char* path);

/* ---- families ---- */

typedef enum mixt_convention {
  MIXT_BANDWIDTH_COUNT = 0, /* non-exp entries count frequencies 0..N-1 */
  MIXT_BANDWIDTH_RANGE = 1  /* literal index range for every kind */
} mixt_convention;

/* U_ds with one bandwidth parameter per order: params[|u|-1]. */
MIXT_API mixt_status mixt_family_superposition(size_t dim, int ds, const int* params, mixt_family** out);
/* Lines "u=<dims> N=<bandwidths>", 1-based dims, '#' comments. */
MIXT_API mixt_status mixt_family_parse(const char* text, mixt_family** out);
MIXT_API mixt_status mixt_family_load(const char* path, mixt_family** out);
MIXT_API void mixt_family_free(mixt_family* family);
MIXT_API mixt_status mixt_family_size(const mixt_family* family, size_t* terms);
/* Writes the family text; *needed receives the length including the terminator. */
MIXT_API mixt_status mixt_family_text(const mixt_family* family, char* buffer, size_t capacity, size_t* needed);

/* ---- fitting ---- */

typedef struct mixt_fit_options {
  int max_iter;
  double atol;
  double btol;
  double damping;
  int threads;
  int nfft_m;
  double nfft_sigma;
  mixt_convention convention;
} mixt_fit_options;

MIXT_API void mixt_fit_options_default(mixt_fit_options* options);

/* options may be NULL for the defaults. */
MIXT_API mixt_status mixt_fit(const char* basis, const mixt_family* family, const mixt_data* train, const mixt_fit_options* options,
                              mixt_model** out);

typedef struct mixt_grid_result {
  int best_n1;
  int best_n2;
  double best_mse;
} mixt_grid_result;

/* Superposition grid search (ds in {1,2}) scored on `valid`; cells[i] receives the MSE of
 * (n1[i % n_n1], n2[i / n_n1]) when non-NULL (capacity n_n1 * n_n2). */
MIXT_API mixt_status mixt_grid_search(const char* basis, int ds, const int* n1, size_t n_n1, const int* n2, size_t n_n2,
                                      const mixt_data* train, const mixt_data* valid, const mixt_fit_options* options,
                                      mixt_grid_result* result, double* cells);

/* Coordinate descent on per-term bandwidth parameters starting from `start`. */
MIXT_API mixt_status mixt_refine(const char* basis, const mixt_family* start, const mixt_data* train, const mixt_data* valid,
                                 const mixt_fit_options* options, int per_entry_pass, mixt_family** out, double* mse);

/* ---- models ---- */

MIXT_API void mixt_model_free(mixt_model* model);
MIXT_API mixt_status mixt_model_save(const mixt_model* model, const char* path);
MIXT_API mixt_status mixt_model_load(const char* path, mixt_model** out);
MIXT_API mixt_status mixt_model_dim(const mixt_model* model, size_t* dim);
MIXT_API mixt_status mixt_model_num_coeffs(const mixt_model* model, size_t* count);
MIXT_API mixt_status mixt_model_basis(const mixt_model* model, char* buffer, size_t capacity, size_t* needed);
MIXT_API mixt_status mixt_model_family(const mixt_model* model, mixt_family** out);

typedef struct mixt_fit_info {
  size_t num_nodes;
  int iterations;
  double residual_norm;
  double train_mse;
  char stop_reason[32];
} mixt_fit_info;

MIXT_API mixt_status mixt_model_fit_info(const mixt_model* model, mixt_fit_info* info);

/* Stores feature extremes used to normalize the training data; predict applies them. */
MIXT_API mixt_status mixt_model_set_normalization(mixt_model* model, const mixt_data* reference);
MIXT_API mixt_status mixt_model_has_normalization(const mixt_model* model, int* has);

/* Real part of the approximant at every row of `data` (out has capacity >= rows). */
MIXT_API mixt_status mixt_model_predict(const mixt_model* model, const mixt_data* data, double* out, size_t capacity);
MIXT_API mixt_status mixt_model_variance(const mixt_model* model, double* variance);

typedef struct mixt_gsi_entry {
  char term[64]; /* e.g. "{1,3}" */
  double rho;
} mixt_gsi_entry;

/* Indices of all non-empty terms in family order; *count receives the number of terms. */
MIXT_API mixt_status mixt_model_gsi(const mixt_model* model, mixt_gsi_entry* out, size_t capacity, size_t* count);
/* Terms with rho > theta plus the empty set, bandwidths kept. */
MIXT_API mixt_status mixt_model_truncate(const mixt_model* model, double theta, mixt_family** out);

/* ---- self-test and benchmarks ---- */

typedef struct mixt_suite_result {
  char name[64];
  int cases;
  double max_error;
  double tolerance;
  int pass;
} mixt_suite_result;

/* nfft_m <= 0 keeps the default window width. */
MIXT_API mixt_status mixt_selftest(uint64_t seed, int instances, int nfft_m, mixt_suite_result* out, size_t capacity, size_t* count);

typedef struct mixt_bench_options {
  const char* out_dir;
  uint64_t seed;
  int threads;
  int full;
  int repetitions; /* 0: bench default */
  double theta;
  const char* data_path;
  mixt_dialect dialect;
} mixt_bench_options;

MIXT_API void mixt_bench_options_default(mixt_bench_options* options);

/* Called once per summary line ("key", "value") and per file written ("file", path). */
typedef void (*mixt_report_fn)(const char* key, const char* value, void* user);

/* name: "f1", "f2" or "airfoil". */
MIXT_API mixt_status mixt_bench(const char* name, const mixt_bench_options* options, mixt_report_fn report, void* user);

#ifdef __cplusplus
}
#endif

#endif
