#pragma once

// Thin RAII wrapper over FFTW real-to-complex 2D transforms on an n x n
// periodic grid stored row-major (index = j * n + i).

#include <complex>
#include <cstddef>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace rotex {

namespace detail {
// The FFTW planner is not thread-safe.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

class Fft2d {
 public:
  explicit Fft2d(int n)
      : n_(n),
        real_(fftw_alloc_real(static_cast<std::size_t>(n) * n)),
        spec_(fftw_alloc_complex(static_cast<std::size_t>(n) * (n / 2 + 1))) {
    std::lock_guard lock(detail::fftw_planner_mutex());
    forward_ = fftw_plan_dft_r2c_2d(n, n, real_, spec_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_2d(n, n, spec_, real_, FFTW_ESTIMATE);
  }

  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  ~Fft2d() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(real_);
    fftw_free(spec_);
  }

  int side() const { return n_; }
  std::size_t spectrum_size() const { return static_cast<std::size_t>(n_) * (n_ / 2 + 1); }
  // Columns of the half spectrum (frequencies 0..n/2 along i).
  int half() const { return n_ / 2 + 1; }

  // Signed frequency for a row index (j) or any full-range index.
  int signed_frequency(int k) const { return k <= n_ / 2 ? k : k - n_; }

  std::vector<std::complex<double>> forward(const std::vector<double>& grid) {
    for (std::size_t k = 0; k < grid.size(); ++k) real_[k] = grid[k];
    fftw_execute(forward_);
    std::vector<std::complex<double>> out(spectrum_size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = {spec_[k][0], spec_[k][1]};
    return out;
  }

  // Normalized inverse: inverse(forward(x)) == x.
  std::vector<double> inverse(const std::vector<std::complex<double>>& spectrum) {
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
      spec_[k][0] = spectrum[k].real();
      spec_[k][1] = spectrum[k].imag();
    }
    fftw_execute(backward_);
    const double scale = 1.0 / (static_cast<double>(n_) * n_);
    std::vector<double> out(static_cast<std::size_t>(n_) * n_);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = real_[k] * scale;
    return out;
  }

  // Apply a real multiplier depending on the signed frequencies (k1 along i,
  // k2 along j) to the spectrum in place.
  template <class Multiplier>
  void apply(std::vector<std::complex<double>>& spectrum, Multiplier&& mult) const {
    const int h = half();
    for (int row = 0; row < n_; ++row) {
      const int k2 = signed_frequency(row);
      for (int k1 = 0; k1 < h; ++k1) spectrum[static_cast<std::size_t>(row) * h + k1] *= mult(k1, k2);
    }
  }

 private:
  int n_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace rotex
