#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixt/basis.hpp"

namespace mixt {

/// M nodes of dimension d (row-major) with optional real targets.
struct NodeSet {
  std::size_t dim = 0;
  std::vector<double> coords;
  std::vector<double> targets;

  std::size_t size() const noexcept { return dim == 0 ? 0 : coords.size() / dim; }
  bool has_targets() const noexcept { return !targets.empty(); }
  std::span<const double> node(std::size_t i) const { return {coords.data() + i * dim, dim}; }
};

/// Uniform in exp/cos dimensions; arcsine (Chebyshev) density in alg dimensions
/// via x = (1 - cos(pi u)) / 2, clamped to [1e-15, 1 - 1e-15].
NodeSet sample_nodes(const BasisVector& basis, std::size_t M, std::uint64_t seed);

/// exp(sin(2 pi x1) x2) + cos(pi x3) x4^2 + 0.1 sin^2(2 pi x1) + 5 sqrt(x2 x4 + 1)
double eval_f1(std::span<const double> x);
/// (2 x1 - 1)^2 x3 + 10 sin(2 pi x1) (x2 - 1/2)^2 + exp(x3)
double eval_f2(std::span<const double> x);

enum class TestFunction { kF1, kF2 };
void fill_targets(NodeSet& nodes, TestFunction f);

struct ColumnRange {
  double min = 0.0;
  double max = 0.0;
};

/// Feature matrix, target column and (after normalization) the per-feature extremes used.
struct Dataset {
  std::vector<std::string> feature_names;
  std::string target_name;
  std::size_t rows = 0;
  std::vector<double> features;  // rows x feature_names.size(), row-major
  std::vector<double> target;
  std::vector<ColumnRange> normalization;  // empty until normalized

  std::size_t cols() const noexcept { return feature_names.size(); }
};

enum class CsvDialect {
  kComma,       // comma separated, header row required
  kWhitespace,  // blank/tab separated; header optional (numeric first row means none)
};

/// Reads a numeric table. `target_column` is a column name or a 1-based index;
/// empty selects the last column.
Dataset load_csv(const std::string& path, const std::string& target_column = {}, CsvDialect dialect = CsvDialect::kComma);
Dataset parse_csv(const std::string& text, const std::string& target_column = {}, CsvDialect dialect = CsvDialect::kComma);

/// Per-feature extremes over the given rows (all rows when empty).
std::vector<ColumnRange> feature_extremes(const Dataset& data, std::span<const std::size_t> rows = {});

/// Maps features to [0,1] with the given extremes (computed from all rows when
/// empty). Constant columns map to 0 with a warning; values outside the extremes
/// are clamped (counted in one warning).
Dataset minmax_normalize(const Dataset& data, std::span<const ColumnRange> extremes = {});
Dataset denormalize(const Dataset& data);

/// Seeded uniform permutation; the first floor(fraction * rows) rows train.
std::pair<Dataset, Dataset> split(const Dataset& data, double fraction, std::uint64_t seed);
/// Row indices of the same split, for callers that normalize afterwards.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t rows, double fraction, std::uint64_t seed);
Dataset select_rows(const Dataset& data, std::span<const std::size_t> rows);

NodeSet to_node_set(const Dataset& data);

/// Writes a CSV with a header row; numbers use the shortest round-trip form.
void write_csv(const std::string& path, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);
void write_nodes_csv(const std::string& path, const NodeSet& nodes);
std::string format_double(double v);

}  // namespace mixt
