#include "mixt/grouped.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "mixt/error.hpp"

namespace mixt {

namespace {

std::vector<double> canonical_nodes(const BasisVector& basis, std::span<const double> nodes) {
  const std::size_t d = basis.dim();
  if (nodes.size() % d != 0) fail(ErrorCode::kShape, "node array length is not a multiple of the dimension");
  std::vector<double> out(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = canonical_coordinate(basis[i % d], nodes[i]);
  return out;
}

}  // namespace

GroupedTransform::GroupedTransform(GroupedIndexSet set, std::span<const double> nodes, GroupedOptions options)
    : set_(std::move(set)), threads_(std::max(1, options.threads)) {
  const BasisVector& basis = set_.basis();
  const std::size_t d = basis.dim();
  const std::vector<double> x = canonical_nodes(basis, nodes);
  num_nodes_ = x.size() / d;

  for (const auto& gb : set_.blocks()) {
    Block block;
    if (gb.u.empty() || gb.size == 0) {
      if (gb.size == 0) warn("term " + format_subset(gb.u) + " has an empty frequency block and is skipped");
      blocks_.push_back(std::move(block));
      continue;
    }
    const std::size_t du = gb.u.size();
    std::vector<double> sub(num_nodes_ * du);
    for (std::size_t i = 0; i < num_nodes_; ++i) {
      for (std::size_t a = 0; a < du; ++a) sub[i * du + a] = x[i * d + static_cast<std::size_t>(gb.u[a])];
    }
    std::vector<std::int64_t> stride(du, 1);
    for (std::size_t a = du; a-- > 1;) {
      stride[a - 1] = stride[a] * (is_periodic(gb.sub_basis[a]) ? gb.sub_N[a] : gb.sub_N[a] / 2);
    }
    const IndexSet reduced = reduced_set(gb.sub_basis, gb.sub_N);
    block.positions.resize(reduced.size());
    for (std::size_t r = 0; r < reduced.size(); ++r) {
      const auto k = reduced[r];
      std::int64_t pos = 0;
      for (std::size_t a = 0; a < du; ++a) {
        const int lo = is_periodic(gb.sub_basis[a]) ? -gb.sub_N[a] / 2 : 0;
        pos += static_cast<std::int64_t>(k[a] - lo) * stride[a];
      }
      block.positions[r] = pos;
    }
    block.plan.emplace(gb.sub_basis, gb.sub_N, sub, options.nfft);
    blocks_.push_back(std::move(block));
  }
}

template <class F>
void GroupedTransform::for_each_block(F&& f) const {
  const std::size_t nb = blocks_.size();
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads_), nb);
  if (workers <= 1) {
    for (std::size_t b = 0; b < nb; ++b) f(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t b = next++; b < nb; b = next++) {
        try {
          f(b);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void GroupedTransform::forward(std::span<const Complex> coeffs, std::span<Complex> values) const {
  if (coeffs.size() != num_coeffs() || values.size() != num_nodes_) fail(ErrorCode::kShape, "grouped forward: shape mismatch");
  const auto gblocks = set_.blocks();
  std::vector<std::vector<Complex>> partial(blocks_.size());
  for_each_block([&](std::size_t b) {
    const Block& block = blocks_[b];
    if (!block.plan) return;
    const auto& gb = gblocks[b];
    std::vector<Complex> full(block.plan->num_coeffs());
    for (std::size_t r = 0; r < block.positions.size(); ++r) {
      full[static_cast<std::size_t>(block.positions[r])] = coeffs[static_cast<std::size_t>(gb.offset) + r];
    }
    partial[b] = block.plan->forward(full);
  });
  std::fill(values.begin(), values.end(), Complex{});
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& gb = gblocks[b];
    if (gb.u.empty() && gb.size == 1) {
      const Complex c0 = coeffs[static_cast<std::size_t>(gb.offset)];
      for (auto& v : values) v += c0;
    } else if (!partial[b].empty()) {
      for (std::size_t i = 0; i < num_nodes_; ++i) values[i] += partial[b][i];
    }
  }
}

void GroupedTransform::transpose(std::span<const Complex> values, std::span<Complex> coeffs) const {
  if (coeffs.size() != num_coeffs() || values.size() != num_nodes_) fail(ErrorCode::kShape, "grouped transpose: shape mismatch");
  const auto gblocks = set_.blocks();
  for_each_block([&](std::size_t b) {
    const Block& block = blocks_[b];
    const auto& gb = gblocks[b];
    if (gb.u.empty() && gb.size == 1) {
      Complex s{};
      for (const auto& v : values) s += v;
      coeffs[static_cast<std::size_t>(gb.offset)] = s;
      return;
    }
    if (!block.plan) return;
    const std::vector<Complex> full = block.plan->transpose(values);
    for (std::size_t r = 0; r < block.positions.size(); ++r) {
      coeffs[static_cast<std::size_t>(gb.offset) + r] = full[static_cast<std::size_t>(block.positions[r])];
    }
  });
}

void GroupedTransform::adjoint(std::span<const Complex> values, std::span<Complex> coeffs) const {
  std::vector<Complex> conj_values(values.size());
  std::transform(values.begin(), values.end(), conj_values.begin(), [](Complex v) { return std::conj(v); });
  transpose(conj_values, coeffs);
  for (auto& c : coeffs) c = std::conj(c);
}

std::vector<Complex> GroupedTransform::forward(std::span<const Complex> coeffs) const {
  std::vector<Complex> out(num_nodes_);
  forward(coeffs, out);
  return out;
}

std::vector<Complex> GroupedTransform::adjoint(std::span<const Complex> values) const {
  std::vector<Complex> out(num_coeffs());
  adjoint(values, out);
  return out;
}

std::vector<Complex> grouped_direct(const GroupedIndexSet& set, std::span<const double> nodes, std::span<const Complex> coeffs) {
  if (coeffs.size() != static_cast<std::size_t>(set.size())) fail(ErrorCode::kShape, "grouped_direct: coefficient length mismatch");
  const BasisVector& basis = set.basis();
  const std::size_t d = basis.dim();
  const std::vector<double> x = canonical_nodes(basis, nodes);
  const std::size_t M = x.size() / d;
  const IndexSet freq = set.frequencies();
  std::vector<Complex> out(M);
  for (std::size_t i = 0; i < M; ++i) {
    const std::span<const double> xi(x.data() + i * d, d);
    Complex s{};
    for (std::size_t r = 0; r < freq.size(); ++r) s += coeffs[r] * eval_basis(basis, freq[r], xi);
    out[i] = s;
  }
  return out;
}

}  // namespace mixt
