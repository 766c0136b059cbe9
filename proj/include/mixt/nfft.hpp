#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mixt/basis.hpp"

namespace mixt {

// Sign convention throughout: f(x) = sum_k fhat_k exp(+2 pi i <k, x>) over the
// hypercube k_j in [-N_j/2, N_j/2), row-major with the last dimension fastest.
// The "transpose" is the plain (unconjugated) transpose of that matrix:
//   h_k = sum_x g_x exp(+2 pi i <k, x>).
// The Hermitian adjoint is conj(transpose(conj(g))).

enum class WindowKind {
  kKaiserBessel,
  kGaussian,
  kDirichlet,  // exact window: phihat = 1/n on the coarse grid, full support
};

struct NfftOptions {
  double sigma = 2.0;
  int m = 6;
  WindowKind window = WindowKind::kKaiserBessel;
  // Plans with |I| * M at or below this size evaluate the direct sum instead.
  std::int64_t direct_threshold = std::int64_t{1} << 20;
};

/// Direct sums on the exp hypercube. `nodes` is M x d row-major on the torus.
std::vector<Complex> ndft(std::span<const int> N, std::span<const double> nodes, std::span<const Complex> coeffs);
std::vector<Complex> ndft_transpose(std::span<const int> N, std::span<const double> nodes,
                                    std::span<const Complex> values);

class NfftPlan {
 public:
  NfftPlan(std::vector<int> N, std::span<const double> nodes, NfftOptions options = {});
  ~NfftPlan();
  NfftPlan(NfftPlan&&) noexcept;
  NfftPlan& operator=(NfftPlan&&) noexcept;
  NfftPlan(const NfftPlan&) = delete;
  NfftPlan& operator=(const NfftPlan&) = delete;

  std::size_t dim() const noexcept { return N_.size(); }
  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_coeffs() const noexcept { return num_coeffs_; }
  std::span<const int> bandwidths() const noexcept { return N_; }
  std::span<const int> fine_grid() const noexcept { return n_; }
  const NfftOptions& options() const noexcept { return options_; }
  bool is_direct() const noexcept { return direct_; }

  void forward(std::span<const Complex> coeffs, std::span<Complex> values) const;
  void transpose(std::span<const Complex> values, std::span<Complex> coeffs) const;

 private:
  struct Fft;

  void forward_windowed(std::span<const Complex> coeffs, std::span<Complex> values) const;
  void transpose_windowed(std::span<const Complex> values, std::span<Complex> coeffs) const;

  std::vector<int> N_;
  std::vector<int> n_;
  std::vector<double> nodes_;
  NfftOptions options_;
  std::size_t num_nodes_ = 0;
  std::size_t num_coeffs_ = 0;
  std::size_t grid_size_ = 0;
  bool direct_ = false;
  int support_ = 0;                         // window points per dimension
  std::vector<std::vector<double>> deconv_; // 1/(n_j phihat_j(k)) for k in [-N_j/2, N_j/2)
  std::vector<std::int32_t> first_;         // M x d first grid index of the window
  std::vector<double> weights_;             // M x d x support window values
  std::unique_ptr<Fft> fft_;
};

}  // namespace mixt
