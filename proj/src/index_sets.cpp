#include "mixt/index_sets.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "mixt/error.hpp"

namespace mixt {

namespace {

void check_even(std::span<const int> N, bool allow_zero) {
  for (int n : N) {
    if (n < 0 || n % 2 != 0 || (!allow_zero && n == 0)) {
      fail(ErrorCode::kInvalidBandwidth,
           "bandwidth " + std::to_string(n) + (allow_zero ? " must be even and >= 0" : " must be even and > 0"));
    }
  }
}

// Per-dimension frequency ranges [lo, hi), with `skip_zero` removing 0.
struct Range {
  int lo;
  int hi;
  bool skip_zero;
};

IndexSet enumerate(std::span<const Range> ranges) {
  const std::size_t d = ranges.size();
  IndexSet out(d);
  for (const auto& r : ranges) {
    const int count = r.hi - r.lo - ((r.skip_zero && r.lo <= 0 && 0 < r.hi) ? 1 : 0);
    if (count <= 0) return out;
  }
  std::vector<int> k(d);
  auto first = [](const Range& r) { return (r.skip_zero && r.lo == 0) ? 1 : r.lo; };
  for (std::size_t j = 0; j < d; ++j) k[j] = first(ranges[j]);
  while (true) {
    out.push_back(k);
    std::size_t j = d;
    while (j > 0) {
      --j;
      ++k[j];
      if (ranges[j].skip_zero && k[j] == 0) ++k[j];
      if (k[j] < ranges[j].hi) break;
      k[j] = first(ranges[j]);
      if (j == 0) return out;
    }
    if (d == 0) return out;
  }
}

Range hypercube_range(BasisKind kind, int n) {
  if (kind == BasisKind::kExp) return {-n / 2, n / 2, false};
  return {0, n / 2, false};
}

Range reduced_range(BasisKind kind, int n) {
  if (n == 0) return {0, 1, false};
  auto r = hypercube_range(kind, n);
  r.skip_zero = true;
  return r;
}

std::vector<int> parse_int_list(std::string_view text, const std::string& what) {
  std::vector<int> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    auto tok = text.substr(start, comma - start);
    int value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
      fail(ErrorCode::kParse, "cannot parse integer '" + std::string(tok) + "' in " + what);
    }
    out.push_back(value);
    start = comma + 1;
  }
  return out;
}

}  // namespace

void IndexSet::push_back(std::span<const int> k) {
  if (k.size() != dim_) fail(ErrorCode::kShape, "IndexSet::push_back: dimension mismatch");
  if (dim_ == 0) {
    ++count_;
    return;
  }
  data_.insert(data_.end(), k.begin(), k.end());
}

Subset support(std::span<const int> k) {
  Subset u;
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (k[j] != 0) u.push_back(static_cast<int>(j));
  }
  return u;
}

IndexSet hypercube_set(const BasisVector& basis, std::span<const int> N) {
  if (N.size() != basis.dim()) fail(ErrorCode::kShape, "hypercube_set: bandwidth length mismatch");
  check_even(N, false);
  std::vector<Range> ranges;
  for (std::size_t j = 0; j < N.size(); ++j) ranges.push_back(hypercube_range(basis[j], N[j]));
  return enumerate(ranges);
}

std::int64_t hypercube_cardinality(const BasisVector& basis, std::span<const int> N) {
  if (N.size() != basis.dim()) fail(ErrorCode::kShape, "hypercube_cardinality: bandwidth length mismatch");
  check_even(N, false);
  std::int64_t c = 1;
  for (std::size_t j = 0; j < N.size(); ++j) c *= is_periodic(basis[j]) ? N[j] : N[j] / 2;
  return c;
}

IndexSet reduced_set(const BasisVector& basis, std::span<const int> N) {
  if (N.size() != basis.dim()) fail(ErrorCode::kShape, "reduced_set: bandwidth length mismatch");
  check_even(N, true);
  std::vector<Range> ranges;
  for (std::size_t j = 0; j < N.size(); ++j) ranges.push_back(reduced_range(basis[j], N[j]));
  return enumerate(ranges);
}

std::int64_t reduced_cardinality(const BasisVector& basis, std::span<const int> N) {
  if (N.size() != basis.dim()) fail(ErrorCode::kShape, "reduced_cardinality: bandwidth length mismatch");
  check_even(N, true);
  std::int64_t c = 1;
  for (std::size_t j = 0; j < N.size(); ++j) {
    if (N[j] == 0) continue;
    c *= is_periodic(basis[j]) ? N[j] - 1 : N[j] / 2 - 1;
  }
  return c;
}

std::int64_t cardinality_bound(int d, int ds, int n_max) {
  if (ds < 1 || d < 2 * ds) {
    fail(ErrorCode::kPrecondition, "cardinality bound requires d >= 2 d_s and d_s >= 1");
  }
  std::int64_t base = static_cast<std::int64_t>(d) * n_max;
  std::int64_t p = 1;
  for (int i = 0; i < ds; ++i) p *= base;
  return ds * p;
}

bool subset_less(const Subset& a, const Subset& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::string format_subset(const Subset& u) {
  std::string s = "{";
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(u[i] + 1);
  }
  return s + "}";
}

SubsetFamily::SubsetFamily(std::size_t dim, std::vector<FamilyTerm> terms) : dim_(dim), terms_(std::move(terms)) {
  for (auto& t : terms_) {
    if (t.N.size() != dim_) fail(ErrorCode::kInvalidFamily, "family term " + format_subset(t.u) + ": bandwidth length mismatch");
    if (!std::is_sorted(t.u.begin(), t.u.end()) || std::adjacent_find(t.u.begin(), t.u.end()) != t.u.end()) {
      std::sort(t.u.begin(), t.u.end());
      if (std::adjacent_find(t.u.begin(), t.u.end()) != t.u.end()) {
        fail(ErrorCode::kInvalidFamily, "family term " + format_subset(t.u) + " repeats a dimension");
      }
    }
    for (int j : t.u) {
      if (j < 0 || static_cast<std::size_t>(j) >= dim_) {
        fail(ErrorCode::kInvalidFamily, "family term references dimension " + std::to_string(j + 1) + " outside 1.." + std::to_string(dim_));
      }
    }
  }
  std::sort(terms_.begin(), terms_.end(), [](const FamilyTerm& a, const FamilyTerm& b) { return subset_less(a.u, b.u); });
  for (std::size_t i = 1; i < terms_.size(); ++i) {
    if (terms_[i].u == terms_[i - 1].u) fail(ErrorCode::kInvalidFamily, "duplicate family term " + format_subset(terms_[i].u));
  }
}

const FamilyTerm* SubsetFamily::find(const Subset& u) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), u,
                             [](const FamilyTerm& t, const Subset& v) { return subset_less(t.u, v); });
  if (it != terms_.end() && it->u == u) return &*it;
  return nullptr;
}

std::string SubsetFamily::to_text() const {
  std::ostringstream os;
  for (const auto& t : terms_) {
    os << "u=";
    for (std::size_t i = 0; i < t.u.size(); ++i) os << (i ? "," : "") << t.u[i] + 1;
    os << " N=";
    for (std::size_t j = 0; j < t.N.size(); ++j) os << (j ? "," : "") << t.N[j];
    os << '\n';
  }
  return os.str();
}

SubsetFamily SubsetFamily::parse(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<FamilyTerm> terms;
  std::size_t dim = 0;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line.substr(first));
    std::string utok, ntok, extra;
    ls >> utok >> ntok;
    const std::string where = "family line " + std::to_string(line_no);
    if (utok.rfind("u=", 0) != 0 || ntok.rfind("N=", 0) != 0 || (ls >> extra)) {
      fail(ErrorCode::kParse, where + ": expected 'u=<dims> N=<bandwidths>'");
    }
    FamilyTerm term;
    for (int j : parse_int_list(std::string_view(utok).substr(2), where)) {
      if (j < 1) fail(ErrorCode::kParse, where + ": dimensions are 1-based");
      term.u.push_back(j - 1);
    }
    term.N = parse_int_list(std::string_view(ntok).substr(2), where);
    if (term.N.empty()) fail(ErrorCode::kParse, where + ": empty bandwidth vector");
    if (dim == 0) dim = term.N.size();
    if (term.N.size() != dim) fail(ErrorCode::kParse, where + ": bandwidth length differs from previous lines");
    terms.push_back(std::move(term));
  }
  if (terms.empty()) fail(ErrorCode::kParse, "family text contains no terms");
  return SubsetFamily(dim, std::move(terms));
}

SubsetFamily superposition_family(int d, int ds, std::span<const int> order_params) {
  if (d < 1) fail(ErrorCode::kDomain, "superposition family needs d >= 1");
  if (ds < 1 || ds > d) fail(ErrorCode::kDomain, "superposition dimension must satisfy 1 <= d_s <= d");
  if (order_params.size() < static_cast<std::size_t>(ds)) {
    fail(ErrorCode::kDomain, "need one bandwidth parameter per interaction order");
  }
  std::vector<FamilyTerm> terms;
  const auto dd = static_cast<std::uint32_t>(d);
  for (std::uint32_t mask = 0; mask < (1u << dd); ++mask) {
    const int order = __builtin_popcount(mask);
    if (order > ds) continue;
    FamilyTerm t;
    t.N.assign(static_cast<std::size_t>(d), 0);
    for (int j = 0; j < d; ++j) {
      if (mask & (1u << j)) {
        t.u.push_back(j);
        t.N[static_cast<std::size_t>(j)] = order_params[static_cast<std::size_t>(order - 1)];
      }
    }
    terms.push_back(std::move(t));
  }
  return SubsetFamily(static_cast<std::size_t>(d), std::move(terms));
}

SubsetFamily apply_convention(const SubsetFamily& family, const BasisVector& basis, BandwidthConvention convention) {
  if (family.dim() != basis.dim()) fail(ErrorCode::kShape, "family and basis dimension differ");
  if (convention == BandwidthConvention::kIndexRange) return family;
  std::vector<FamilyTerm> terms(family.terms().begin(), family.terms().end());
  for (auto& t : terms) {
    for (std::size_t j = 0; j < t.N.size(); ++j) {
      if (!is_periodic(basis[j])) t.N[j] *= 2;
    }
  }
  return SubsetFamily(family.dim(), std::move(terms));
}

void validate_family(const BasisVector& basis, const SubsetFamily& family) {
  if (family.dim() != basis.dim()) {
    fail(ErrorCode::kInvalidFamily, "family dimension " + std::to_string(family.dim()) + " differs from basis dimension " +
                                        std::to_string(basis.dim()));
  }
  for (const auto& t : family.terms()) {
    for (std::size_t j = 0; j < t.N.size(); ++j) {
      const bool in_u = std::binary_search(t.u.begin(), t.u.end(), static_cast<int>(j));
      const int n = t.N[j];
      if (n < 0 || n % 2 != 0) {
        fail(ErrorCode::kInvalidFamily, "term " + format_subset(t.u) + ": bandwidth entries must be even and non-negative");
      }
      if (in_u != (n != 0)) {
        fail(ErrorCode::kInvalidFamily,
             "term " + format_subset(t.u) + ": bandwidth must be non-zero exactly on the term's dimensions");
      }
    }
  }
}

GroupedIndexSet::GroupedIndexSet(BasisVector basis, SubsetFamily family)
    : basis_(std::move(basis)), family_(std::move(family)) {
  validate_family(basis_, family_);
  for (const auto& t : family_.terms()) {
    GroupedBlock b;
    b.u = t.u;
    b.N = t.N;
    b.sub_basis = basis_.project(t.u);
    for (int j : t.u) b.sub_N.push_back(t.N[static_cast<std::size_t>(j)]);
    b.offset = total_;
    b.size = reduced_cardinality(basis_, t.N);
    total_ += b.size;
    blocks_.push_back(std::move(b));
  }
}

IndexSet GroupedIndexSet::frequencies() const {
  IndexSet out(basis_.dim());
  for (const auto& b : blocks_) {
    auto block = reduced_set(basis_, b.N);
    for (std::size_t i = 0; i < block.size(); ++i) out.push_back(block[i]);
  }
  return out;
}

}  // namespace mixt
