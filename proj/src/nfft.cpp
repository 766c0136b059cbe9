#include "mixt/nfft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "mixt/error.hpp"

namespace mixt {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t checked_product(std::span<const int> N) {
  std::size_t p = 1;
  for (int n : N) p *= static_cast<std::size_t>(n);
  return p;
}

void check_bandwidths(std::span<const int> N) {
  if (N.empty()) fail(ErrorCode::kShape, "nfft: at least one dimension required");
  for (int n : N) {
    if (n <= 0 || n % 2 != 0) fail(ErrorCode::kInvalidBandwidth, "nfft: bandwidths must be even and positive");
  }
}

std::size_t check_nodes(std::span<const double> nodes, std::size_t d) {
  if (nodes.size() % d != 0) fail(ErrorCode::kShape, "nfft: node array length is not a multiple of the dimension");
  for (double x : nodes) {
    if (!std::isfinite(x)) fail(ErrorCode::kDomain, "nfft: non-finite node coordinate");
  }
  return nodes.size() / d;
}

// exp(2 pi i k x) for k = -N/2 .. N/2-1.
void exp_table(int N, double x, Complex* out) {
  const int lo = -N / 2;
  for (int a = 0; a < N; ++a) {
    const double arg = 2.0 * kPi * static_cast<double>(lo + a) * x;
    out[a] = {std::cos(arg), std::sin(arg)};
  }
}

// Tables are laid out per node as [dim 0 | dim 1 | ...], each of length N_j.
Complex direct_eval(std::span<const int> N, const Complex* table, const Complex* coeffs) {
  const std::size_t d = N.size();
  const int last = N[d - 1];
  std::vector<std::size_t> tab_off(d, 0);
  for (std::size_t j = 1; j < d; ++j) tab_off[j] = tab_off[j - 1] + static_cast<std::size_t>(N[j - 1]);
  const Complex* last_tab = table + tab_off[d - 1];

  std::vector<int> idx(d, 0);
  Complex acc{};
  std::size_t base = 0;
  while (true) {
    Complex p{1.0, 0.0};
    for (std::size_t j = 0; j + 1 < d; ++j) p *= table[tab_off[j] + static_cast<std::size_t>(idx[j])];
    Complex s{};
    for (int a = 0; a < last; ++a) s += coeffs[base + static_cast<std::size_t>(a)] * last_tab[a];
    acc += p * s;
    base += static_cast<std::size_t>(last);
    if (d == 1) break;
    std::size_t j = d - 1;
    bool done = true;
    while (j > 0) {
      --j;
      if (++idx[j] < N[j]) {
        done = false;
        break;
      }
      idx[j] = 0;
    }
    if (done) break;
  }
  return acc;
}

void direct_accumulate(std::span<const int> N, const Complex* table, Complex value, Complex* coeffs) {
  const std::size_t d = N.size();
  const int last = N[d - 1];
  std::vector<std::size_t> tab_off(d, 0);
  for (std::size_t j = 1; j < d; ++j) tab_off[j] = tab_off[j - 1] + static_cast<std::size_t>(N[j - 1]);
  const Complex* last_tab = table + tab_off[d - 1];

  std::vector<int> idx(d, 0);
  std::size_t base = 0;
  while (true) {
    Complex p = value;
    for (std::size_t j = 0; j + 1 < d; ++j) p *= table[tab_off[j] + static_cast<std::size_t>(idx[j])];
    for (int a = 0; a < last; ++a) coeffs[base + static_cast<std::size_t>(a)] += p * last_tab[a];
    base += static_cast<std::size_t>(last);
    if (d == 1) break;
    std::size_t j = d - 1;
    bool done = true;
    while (j > 0) {
      --j;
      if (++idx[j] < N[j]) {
        done = false;
        break;
      }
      idx[j] = 0;
    }
    if (done) break;
  }
}

std::vector<Complex> build_tables(std::span<const int> N, std::span<const double> nodes, std::size_t M) {
  const std::size_t d = N.size();
  std::size_t per_node = 0;
  for (int n : N) per_node += static_cast<std::size_t>(n);
  std::vector<Complex> tables(per_node * M);
  for (std::size_t i = 0; i < M; ++i) {
    Complex* t = tables.data() + i * per_node;
    for (std::size_t j = 0; j < d; ++j) {
      exp_table(N[j], nodes[i * d + j], t);
      t += N[j];
    }
  }
  return tables;
}

int pow2_at_least(double x) {
  int n = 1;
  while (n < x) n *= 2;
  return n;
}

double bessel_i0(double x) { return std::cyl_bessel_i(0.0, x); }

}  // namespace

std::vector<Complex> ndft(std::span<const int> N, std::span<const double> nodes, std::span<const Complex> coeffs) {
  check_bandwidths(N);
  const std::size_t M = check_nodes(nodes, N.size());
  if (coeffs.size() != checked_product(N)) fail(ErrorCode::kShape, "ndft: coefficient length does not match bandwidths");
  std::size_t per_node = 0;
  for (int n : N) per_node += static_cast<std::size_t>(n);
  std::vector<Complex> table(per_node);
  std::vector<Complex> out(M);
  for (std::size_t i = 0; i < M; ++i) {
    Complex* t = table.data();
    for (std::size_t j = 0; j < N.size(); ++j) {
      exp_table(N[j], nodes[i * N.size() + j], t);
      t += N[j];
    }
    out[i] = direct_eval(N, table.data(), coeffs.data());
  }
  return out;
}

std::vector<Complex> ndft_transpose(std::span<const int> N, std::span<const double> nodes,
                                    std::span<const Complex> values) {
  check_bandwidths(N);
  const std::size_t M = check_nodes(nodes, N.size());
  if (values.size() != M) fail(ErrorCode::kShape, "ndft_transpose: value length does not match node count");
  std::size_t per_node = 0;
  for (int n : N) per_node += static_cast<std::size_t>(n);
  std::vector<Complex> table(per_node);
  std::vector<Complex> out(checked_product(N));
  for (std::size_t i = 0; i < M; ++i) {
    Complex* t = table.data();
    for (std::size_t j = 0; j < N.size(); ++j) {
      exp_table(N[j], nodes[i * N.size() + j], t);
      t += N[j];
    }
    direct_accumulate(N, table.data(), values[i], out.data());
  }
  return out;
}

struct NfftPlan::Fft {
  fftw_plan plan = nullptr;
  std::vector<Complex> direct_tables;  // used only by direct plans
  std::vector<Complex> dirichlet;      // M x d x n complex window values for the exact window

  ~Fft() {
    if (plan) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

NfftPlan::NfftPlan(std::vector<int> N, std::span<const double> nodes, NfftOptions options)
    : N_(std::move(N)), options_(options), fft_(std::make_unique<Fft>()) {
  check_bandwidths(N_);
  const std::size_t d = N_.size();
  num_nodes_ = check_nodes(nodes, d);
  num_coeffs_ = checked_product(N_);
  if (!(options_.sigma >= 1.0)) fail(ErrorCode::kDomain, "nfft: oversampling factor must be >= 1");
  if (options_.m < 1) fail(ErrorCode::kDomain, "nfft: window cutoff m must be >= 1");

  nodes_.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double r = nodes[i] - std::floor(nodes[i]);
    nodes_[i] = r >= 1.0 ? 0.0 : r;
  }

  const double work = static_cast<double>(num_coeffs_) * static_cast<double>(num_nodes_);
  direct_ = work <= static_cast<double>(options_.direct_threshold);
  if (direct_) {
    fft_->direct_tables = build_tables(N_, nodes_, num_nodes_);
    return;
  }

  const int m = options_.m;
  const bool exact = options_.window == WindowKind::kDirichlet;
  n_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    int n = pow2_at_least(options_.sigma * N_[j]);
    if (!exact) n = std::max(n, pow2_at_least(2 * m + 2));
    n_[j] = n;
  }
  grid_size_ = checked_product(n_);

  deconv_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double n = n_[j];
    const double sigma = n / N_[j];
    deconv_[j].resize(static_cast<std::size_t>(N_[j]));
    for (int a = 0; a < N_[j]; ++a) {
      const double k = a - N_[j] / 2;
      double phihat = 1.0 / n;
      if (options_.window == WindowKind::kKaiserBessel) {
        const double b = kPi * (2.0 - 1.0 / sigma);
        const double w = 2.0 * kPi * k / n;
        phihat = bessel_i0(m * std::sqrt(b * b - w * w)) / n;
      } else if (options_.window == WindowKind::kGaussian) {
        const double b = 2.0 * sigma / (2.0 * sigma - 1.0) * m / kPi;
        phihat = std::exp(-b * (kPi * k / n) * (kPi * k / n)) / n;
      }
      deconv_[j][static_cast<std::size_t>(a)] = 1.0 / (n * phihat);
    }
  }

  if (exact) {
    // phi~(x) = (1/n) sum_{k in I_N} exp(2 pi i k x), evaluated at x - l/n for every grid point.
    support_ = 0;
    std::size_t per_node = 0;
    for (int n : n_) per_node += static_cast<std::size_t>(n);
    fft_->dirichlet.resize(per_node * num_nodes_);
    for (std::size_t i = 0; i < num_nodes_; ++i) {
      Complex* w = fft_->dirichlet.data() + i * per_node;
      for (std::size_t j = 0; j < d; ++j) {
        const int n = n_[j];
        for (int l = 0; l < n; ++l) {
          const double x = nodes_[i * d + j] - static_cast<double>(l) / n;
          Complex s{};
          for (int k = -N_[j] / 2; k < N_[j] / 2; ++k) {
            const double arg = 2.0 * kPi * k * x;
            s += Complex(std::cos(arg), std::sin(arg));
          }
          w[l] = s / static_cast<double>(n);
        }
        w += n;
      }
    }
  } else {
    support_ = 2 * m + 2;
    first_.resize(num_nodes_ * d);
    weights_.resize(num_nodes_ * d * static_cast<std::size_t>(support_));
    for (std::size_t i = 0; i < num_nodes_; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const double n = n_[j];
        const double sigma = n / N_[j];
        const double u = nodes_[i * d + j] * n;
        const int l0 = static_cast<int>(std::floor(u)) - m;
        first_[i * d + j] = l0;
        double* w = &weights_[(i * d + j) * static_cast<std::size_t>(support_)];
        for (int a = 0; a < support_; ++a) {
          const double t = u - (l0 + a);  // n * (x - l/n)
          double value = 0.0;
          if (options_.window == WindowKind::kKaiserBessel) {
            const double b = kPi * (2.0 - 1.0 / sigma);
            const double arg = static_cast<double>(m) * m - t * t;
            if (arg > 0.0) {
              const double r = std::sqrt(arg);
              value = std::sinh(b * r) / (kPi * r);
            } else if (arg == 0.0) {
              value = b / kPi;
            }
          } else {
            const double b = 2.0 * sigma / (2.0 * sigma - 1.0) * m / kPi;
            value = std::exp(-t * t / b) / std::sqrt(kPi * b);
          }
          w[a] = value;
        }
      }
    }
  }

  std::vector<Complex> scratch(grid_size_);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard lock(planner_mutex());
  fft_->plan = fftw_plan_dft(static_cast<int>(d), n_.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!fft_->plan) fail(ErrorCode::kNumeric, "nfft: FFTW planning failed");
}

NfftPlan::~NfftPlan() = default;
NfftPlan::NfftPlan(NfftPlan&&) noexcept = default;
NfftPlan& NfftPlan::operator=(NfftPlan&&) noexcept = default;

void NfftPlan::forward(std::span<const Complex> coeffs, std::span<Complex> values) const {
  if (coeffs.size() != num_coeffs_ || values.size() != num_nodes_) fail(ErrorCode::kShape, "nfft forward: shape mismatch");
  if (direct_) {
    std::size_t per_node = 0;
    for (int n : N_) per_node += static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < num_nodes_; ++i) {
      values[i] = direct_eval(N_, fft_->direct_tables.data() + i * per_node, coeffs.data());
    }
    return;
  }
  forward_windowed(coeffs, values);
}

void NfftPlan::transpose(std::span<const Complex> values, std::span<Complex> coeffs) const {
  if (coeffs.size() != num_coeffs_ || values.size() != num_nodes_) fail(ErrorCode::kShape, "nfft transpose: shape mismatch");
  if (direct_) {
    std::fill(coeffs.begin(), coeffs.end(), Complex{});
    std::size_t per_node = 0;
    for (int n : N_) per_node += static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < num_nodes_; ++i) {
      direct_accumulate(N_, fft_->direct_tables.data() + i * per_node, values[i], coeffs.data());
    }
    return;
  }
  transpose_windowed(values, coeffs);
}

namespace {

// Visits every coarse-grid coefficient with its fine-grid position and deconvolution factor.
template <class F>
void for_each_coarse(std::span<const int> N, std::span<const int> n, const std::vector<std::vector<double>>& deconv, F&& f) {
  const std::size_t d = N.size();
  std::vector<std::size_t> stride(d, 1);
  for (std::size_t j = d - 1; j > 0; --j) stride[j - 1] = stride[j] * static_cast<std::size_t>(n[j]);
  std::vector<std::vector<std::size_t>> pos(d);
  for (std::size_t j = 0; j < d; ++j) {
    pos[j].resize(static_cast<std::size_t>(N[j]));
    for (int a = 0; a < N[j]; ++a) {
      int k = a - N[j] / 2;
      if (k < 0) k += n[j];
      pos[j][static_cast<std::size_t>(a)] = static_cast<std::size_t>(k) * stride[j];
    }
  }
  std::vector<int> idx(d, 0);
  std::size_t flat = 0;
  const int last = N[d - 1];
  while (true) {
    std::size_t p = 0;
    double w = 1.0;
    for (std::size_t j = 0; j + 1 < d; ++j) {
      p += pos[j][static_cast<std::size_t>(idx[j])];
      w *= deconv[j][static_cast<std::size_t>(idx[j])];
    }
    for (int a = 0; a < last; ++a) {
      f(flat++, p + pos[d - 1][static_cast<std::size_t>(a)], w * deconv[d - 1][static_cast<std::size_t>(a)]);
    }
    if (d == 1) return;
    std::size_t j = d - 1;
    bool done = true;
    while (j > 0) {
      --j;
      if (++idx[j] < N[j]) {
        done = false;
        break;
      }
      idx[j] = 0;
    }
    if (done) return;
  }
}

// Visits the tensor window of one node: f(grid offset, weight). W is double or Complex.
template <class W, class F>
void for_each_window(std::size_t d, std::span<const int> n, const std::vector<std::size_t>& stride, const std::int32_t* first,
                     const W* weights, int support, F&& f) {
  // Wrapped offsets and weights per dimension; support <= n_j, so no index repeats.
  thread_local std::vector<std::size_t> off;
  off.resize(d * static_cast<std::size_t>(support));
  for (std::size_t j = 0; j < d; ++j) {
    for (int a = 0; a < support; ++a) {
      int l = (first ? first[j] : 0) + a;
      l %= n[j];
      if (l < 0) l += n[j];
      off[j * support + a] = static_cast<std::size_t>(l) * stride[j];
    }
  }
  const std::size_t S = static_cast<std::size_t>(support);
  const std::size_t* last_off = off.data() + (d - 1) * S;
  const W* last_w = weights + (d - 1) * S;
  if (d == 1) {
    for (std::size_t a = 0; a < S; ++a) f(last_off[a], last_w[a]);
    return;
  }
  thread_local std::vector<std::size_t> idx;
  idx.assign(d - 1, 0);
  while (true) {
    std::size_t base = 0;
    W w = W(1.0);
    for (std::size_t j = 0; j + 1 < d; ++j) {
      base += off[j * S + idx[j]];
      w *= weights[j * S + idx[j]];
    }
    for (std::size_t a = 0; a < S; ++a) f(base + last_off[a], w * last_w[a]);
    std::size_t j = d - 1;
    bool done = true;
    while (j > 0) {
      --j;
      if (++idx[j] < S) {
        done = false;
        break;
      }
      idx[j] = 0;
    }
    if (done) return;
  }
}

}  // namespace

void NfftPlan::forward_windowed(std::span<const Complex> coeffs, std::span<Complex> values) const {
  const std::size_t d = N_.size();
  std::vector<Complex> grid(grid_size_);
  for_each_coarse(N_, n_, deconv_, [&](std::size_t i, std::size_t p, double w) { grid[p] = coeffs[i] * w; });
  auto* buf = reinterpret_cast<fftw_complex*>(grid.data());
  fftw_execute_dft(fft_->plan, buf, buf);

  std::vector<std::size_t> stride(d, 1);
  for (std::size_t j = d - 1; j > 0; --j) stride[j - 1] = stride[j] * static_cast<std::size_t>(n_[j]);

  if (options_.window == WindowKind::kDirichlet) {
    // Full-support window; every dimension has n_j points (not necessarily equal).
    std::size_t per_node = 0;
    for (int n : n_) per_node += static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < num_nodes_; ++i) {
      const Complex* w = fft_->dirichlet.data() + i * per_node;
      // Generic tensor loop over the full grid.
      std::vector<std::size_t> idx(d, 0);
      Complex acc{};
      for (std::size_t g = 0; g < grid_size_; ++g) {
        Complex prod{1.0, 0.0};
        std::size_t woff = 0;
        for (std::size_t j = 0; j < d; ++j) {
          prod *= w[woff + idx[j]];
          woff += static_cast<std::size_t>(n_[j]);
        }
        acc += grid[g] * prod;
        for (std::size_t j = d; j-- > 0;) {
          if (++idx[j] < static_cast<std::size_t>(n_[j])) break;
          idx[j] = 0;
        }
      }
      values[i] = acc;
    }
    return;
  }

  const std::size_t S = static_cast<std::size_t>(support_);
  for (std::size_t i = 0; i < num_nodes_; ++i) {
    Complex acc{};
    for_each_window(d, n_, stride, &first_[i * d], &weights_[i * d * S], support_,
                    [&](std::size_t p, double w) { acc += grid[p] * w; });
    values[i] = acc;
  }
}

void NfftPlan::transpose_windowed(std::span<const Complex> values, std::span<Complex> coeffs) const {
  const std::size_t d = N_.size();
  std::vector<Complex> grid(grid_size_);
  std::vector<std::size_t> stride(d, 1);
  for (std::size_t j = d - 1; j > 0; --j) stride[j - 1] = stride[j] * static_cast<std::size_t>(n_[j]);

  if (options_.window == WindowKind::kDirichlet) {
    std::size_t per_node = 0;
    for (int n : n_) per_node += static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < num_nodes_; ++i) {
      const Complex* w = fft_->dirichlet.data() + i * per_node;
      std::vector<std::size_t> idx(d, 0);
      for (std::size_t g = 0; g < grid_size_; ++g) {
        Complex prod{1.0, 0.0};
        std::size_t woff = 0;
        for (std::size_t j = 0; j < d; ++j) {
          prod *= w[woff + idx[j]];
          woff += static_cast<std::size_t>(n_[j]);
        }
        grid[g] += values[i] * prod;
        for (std::size_t j = d; j-- > 0;) {
          if (++idx[j] < static_cast<std::size_t>(n_[j])) break;
          idx[j] = 0;
        }
      }
    }
  } else {
    const std::size_t S = static_cast<std::size_t>(support_);
    for (std::size_t i = 0; i < num_nodes_; ++i) {
      const Complex v = values[i];
      for_each_window(d, n_, stride, &first_[i * d], &weights_[i * d * S], support_,
                      [&](std::size_t p, double w) { grid[p] += v * w; });
    }
  }

  auto* buf = reinterpret_cast<fftw_complex*>(grid.data());
  fftw_execute_dft(fft_->plan, buf, buf);
  for_each_coarse(N_, n_, deconv_, [&](std::size_t i, std::size_t p, double w) { coeffs[i] = grid[p] * w; });
}

}  // namespace mixt
