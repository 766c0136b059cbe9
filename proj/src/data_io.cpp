#include "mixt/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "mixt/error.hpp"

namespace mixt {

namespace {

constexpr double kPi = std::numbers::pi;

// 53 random bits -> [0, 1); identical on every platform for a given seed.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line, CsvDialect dialect) {
  std::vector<std::string> out;
  if (dialect == CsvDialect::kWhitespace) {
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_double(const std::string& s, double& value) {
  if (s.empty()) return false;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

NodeSet sample_nodes(const BasisVector& basis, std::size_t M, std::uint64_t seed) {
  if (M == 0) fail(ErrorCode::kDomain, "sample_nodes: M must be positive");
  NodeSet out;
  out.dim = basis.dim();
  out.coords.resize(M * out.dim);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j < out.dim; ++j) {
      const double u = unit_draw(rng);
      double x = u;
      if (basis[j] == BasisKind::kAlg) x = std::clamp((1.0 - std::cos(kPi * u)) / 2.0, 1e-15, 1.0 - 1e-15);
      out.coords[i * out.dim + j] = x;
    }
  }
  return out;
}

double eval_f1(std::span<const double> x) {
  if (x.size() != 4) fail(ErrorCode::kShape, "f1 expects 4 coordinates");
  const double s = std::sin(2.0 * kPi * x[0]);
  return std::exp(s * x[1]) + std::cos(kPi * x[2]) * x[3] * x[3] + 0.1 * s * s + 5.0 * std::sqrt(x[1] * x[3] + 1.0);
}

double eval_f2(std::span<const double> x) {
  if (x.size() != 4) fail(ErrorCode::kShape, "f2 expects 4 coordinates");
  const double a = 2.0 * x[0] - 1.0;
  const double b = x[1] - 0.5;
  return a * a * x[2] + 10.0 * std::sin(2.0 * kPi * x[0]) * b * b + std::exp(x[2]);
}

void fill_targets(NodeSet& nodes, TestFunction f) {
  nodes.targets.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    nodes.targets[i] = f == TestFunction::kF1 ? eval_f1(nodes.node(i)) : eval_f2(nodes.node(i));
  }
}

Dataset parse_csv(const std::string& text, const std::string& target_column, CsvDialect dialect) {
  std::istringstream is(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.push_back(split_fields(line, dialect));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) fail(ErrorCode::kParse, "csv: no rows");

  std::vector<std::string> header;
  std::size_t first_data = 0;
  bool first_numeric = true;
  for (const auto& f : rows[0]) {
    double v;
    if (!parse_double(f, v)) first_numeric = false;
  }
  if (dialect == CsvDialect::kComma || !first_numeric) {
    header = rows[0];
    first_data = 1;
  } else {
    for (std::size_t c = 0; c + 1 < rows[0].size(); ++c) header.push_back("x" + std::to_string(c + 1));
    header.push_back("y");
  }
  const std::size_t ncol = header.size();
  if (ncol < 2) fail(ErrorCode::kParse, "csv: need at least one feature and one target column");

  std::size_t target = ncol - 1;
  if (!target_column.empty()) {
    auto it = std::find(header.begin(), header.end(), target_column);
    if (it != header.end()) {
      target = static_cast<std::size_t>(it - header.begin());
    } else {
      int idx = 0;
      auto [ptr, ec] = std::from_chars(target_column.data(), target_column.data() + target_column.size(), idx);
      if (ec != std::errc() || ptr != target_column.data() + target_column.size() || idx < 1 || static_cast<std::size_t>(idx) > ncol) {
        fail(ErrorCode::kParse, "csv: target column '" + target_column + "' not found");
      }
      target = static_cast<std::size_t>(idx - 1);
    }
  }

  Dataset d;
  d.target_name = header[target];
  for (std::size_t c = 0; c < ncol; ++c) {
    if (c != target) d.feature_names.push_back(header[c]);
  }
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    const auto& fields = rows[r];
    if (fields.size() != ncol) {
      fail(ErrorCode::kParse, "csv line " + std::to_string(line_numbers[r]) + ": expected " + std::to_string(ncol) + " fields, found " +
                                  std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < ncol; ++c) {
      double v;
      if (!parse_double(fields[c], v) || !std::isfinite(v)) {
        fail(ErrorCode::kParse, "csv line " + std::to_string(line_numbers[r]) + ", column " + std::to_string(c + 1) + " (" + header[c] +
                                    "): not a finite number: '" + fields[c] + "'");
      }
      if (c == target) {
        d.target.push_back(v);
      } else {
        d.features.push_back(v);
      }
    }
    ++d.rows;
  }
  if (d.rows == 0) fail(ErrorCode::kParse, "csv: header but no data rows");
  return d;
}

Dataset load_csv(const std::string& path, const std::string& target_column, CsvDialect dialect) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), target_column, dialect);
}

std::vector<ColumnRange> feature_extremes(const Dataset& data, std::span<const std::size_t> rows) {
  const std::size_t nc = data.cols();
  std::vector<ColumnRange> ext(nc, {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
  auto visit = [&](std::size_t r) {
    if (r >= data.rows) fail(ErrorCode::kShape, "feature_extremes: row index out of range");
    for (std::size_t c = 0; c < nc; ++c) {
      const double v = data.features[r * nc + c];
      ext[c].min = std::min(ext[c].min, v);
      ext[c].max = std::max(ext[c].max, v);
    }
  };
  if (rows.empty()) {
    for (std::size_t r = 0; r < data.rows; ++r) visit(r);
  } else {
    for (std::size_t r : rows) visit(r);
  }
  return ext;
}

Dataset minmax_normalize(const Dataset& data, std::span<const ColumnRange> extremes) {
  const std::size_t nc = data.cols();
  std::vector<ColumnRange> ext = extremes.empty() ? feature_extremes(data) : std::vector<ColumnRange>(extremes.begin(), extremes.end());
  if (ext.size() != nc) fail(ErrorCode::kShape, "minmax_normalize: extremes do not match the column count");
  Dataset out = data;
  out.normalization = ext;
  std::size_t clamped = 0;
  for (std::size_t c = 0; c < nc; ++c) {
    const double range = ext[c].max - ext[c].min;
    if (!(range > 0.0)) warn("column '" + data.feature_names[c] + "' has zero range; normalized to 0");
    for (std::size_t r = 0; r < data.rows; ++r) {
      double& v = out.features[r * nc + c];
      if (!(range > 0.0)) {
        v = 0.0;
        continue;
      }
      v = (v - ext[c].min) / range;
      if (v < 0.0 || v > 1.0) {
        v = std::clamp(v, 0.0, 1.0);
        ++clamped;
      }
    }
  }
  if (clamped > 0) warn(std::to_string(clamped) + " feature values fell outside the normalization extremes and were clamped to [0,1]");
  return out;
}

Dataset denormalize(const Dataset& data) {
  if (data.normalization.empty()) return data;
  const std::size_t nc = data.cols();
  Dataset out = data;
  for (std::size_t c = 0; c < nc; ++c) {
    const auto& e = data.normalization[c];
    const double range = e.max - e.min;
    for (std::size_t r = 0; r < data.rows; ++r) {
      double& v = out.features[r * nc + c];
      v = range > 0.0 ? e.min + v * range : e.min;
    }
  }
  out.normalization.clear();
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t rows, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) fail(ErrorCode::kDomain, "split fraction must lie in (0,1)");
  std::vector<std::size_t> perm(rows);
  for (std::size_t i = 0; i < rows; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = rows; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(unit_draw(rng) * static_cast<double>(i));
    std::swap(perm[i - 1], perm[std::min(j, i - 1)]);
  }
  const auto n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(rows)));
  std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  return {std::move(train), std::move(test)};
}

Dataset select_rows(const Dataset& data, std::span<const std::size_t> rows) {
  const std::size_t nc = data.cols();
  Dataset out;
  out.feature_names = data.feature_names;
  out.target_name = data.target_name;
  out.normalization = data.normalization;
  out.rows = rows.size();
  out.features.reserve(rows.size() * nc);
  out.target.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= data.rows) fail(ErrorCode::kShape, "select_rows: row index out of range");
    out.features.insert(out.features.end(), data.features.begin() + static_cast<std::ptrdiff_t>(r * nc),
                        data.features.begin() + static_cast<std::ptrdiff_t>((r + 1) * nc));
    out.target.push_back(data.target[r]);
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double fraction, std::uint64_t seed) {
  auto [train, test] = split_indices(data.rows, fraction, seed);
  return {select_rows(data, train), select_rows(data, test)};
}

NodeSet to_node_set(const Dataset& data) {
  NodeSet out;
  out.dim = data.cols();
  out.coords = data.features;
  out.targets = data.target;
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_csv(const std::string& path, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "write to '" + path + "' failed");
}

void write_nodes_csv(const std::string& path, const NodeSet& nodes) {
  std::vector<std::string> header;
  for (std::size_t j = 0; j < nodes.dim; ++j) header.push_back("x" + std::to_string(j + 1));
  if (nodes.has_targets()) header.push_back("y");
  std::vector<std::vector<double>> rows(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto x = nodes.node(i);
    rows[i].assign(x.begin(), x.end());
    if (nodes.has_targets()) rows[i].push_back(nodes.targets[i]);
  }
  write_csv(path, header, rows);
}

}  // namespace mixt
