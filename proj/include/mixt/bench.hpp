#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixt/anova.hpp"
#include "mixt/data_io.hpp"

namespace mixt {

// Fixed experiment settings. Bandwidths are in BandwidthConvention::kFrequencyCount units.

BasisVector f1_basis();  // exp,alg,cos,alg
BasisVector f2_basis();  // exp,exp,cos,cos
SubsetFamily f1_final_family();

struct F2BandwidthRow {
  int M;
  int cos_n1, cos_n2;
  int mixed_n1, mixed_n2;
  int exp_n1, exp_n2;
};
/// Bandwidths per training size for f2 (entries above M = 10000 are extrapolations).
std::span<const F2BandwidthRow> f2_bandwidth_table();
const F2BandwidthRow& f2_bandwidths(int M);

/// Closed-form sensitivity indices of f2 under exp,exp,cos,cos; all other terms are 0.
std::vector<GsiEntry> f2_analytic_gsi();
/// l2 distance between a model's indices and the analytic ones over all terms of U_2.
double f2_gsi_deviation(std::span<const GsiEntry> gsi);

/// Truncation set used for the airfoil data, bandwidths set from (n1, n2).
SubsetFamily airfoil_family(int n1, int n2);
BasisVector airfoil_basis();  // exp,exp,alg,alg,cos

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);
double median(std::vector<double> v);

struct BenchOptions {
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int threads = 1;
  bool full = false;
  int repetitions = 0;  // 0 selects the bench default
  double theta = 1e-2;
  std::string data_path;
  CsvDialect dialect = CsvDialect::kWhitespace;
  FitOptions fit;
};

/// Key/value lines for the console plus the files written.
struct BenchSummary {
  std::vector<std::pair<std::string, std::string>> values;
  std::vector<std::string> files;
};

BenchSummary run_f1_bench(const BenchOptions& options);
BenchSummary run_f2_bench(const BenchOptions& options);
BenchSummary run_airfoil_bench(const BenchOptions& options);

}  // namespace mixt
