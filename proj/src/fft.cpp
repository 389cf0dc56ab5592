#include "cwvocoder/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace cwv {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

RealFft::RealFft(std::size_t size) : size_(size) {
  if (size < 2) throw std::invalid_argument("RealFft: size must be >= 2");
  real_ = fftw_alloc_real(size_);
  auto* cplx = fftw_alloc_complex(num_bins());
  complex_ = cplx;
  std::lock_guard<std::mutex> lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(size_), real_, cplx,
                                       FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(size_), cplx, real_,
                                       FFTW_ESTIMATE);
}

RealFft::~RealFft() { release(); }

RealFft::RealFft(RealFft&& other) noexcept
    : size_(other.size_),
      real_(other.real_),
      complex_(other.complex_),
      forward_plan_(other.forward_plan_),
      inverse_plan_(other.inverse_plan_) {
  other.real_ = nullptr;
  other.complex_ = nullptr;
  other.forward_plan_ = nullptr;
  other.inverse_plan_ = nullptr;
}

RealFft& RealFft::operator=(RealFft&& other) noexcept {
  if (this != &other) {
    release();
    size_ = other.size_;
    real_ = std::exchange(other.real_, nullptr);
    complex_ = std::exchange(other.complex_, nullptr);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
  }
  return *this;
}

void RealFft::release() noexcept {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  if (real_) fftw_free(real_);
  if (complex_) fftw_free(complex_);
  forward_plan_ = inverse_plan_ = nullptr;
  real_ = nullptr;
  complex_ = nullptr;
}

void RealFft::forward(std::span<const double> input,
                      std::vector<std::complex<double>>& spectrum) {
  const std::size_t n = std::min(input.size(), size_);
  std::copy_n(input.begin(), n, real_);
  std::fill(real_ + n, real_ + size_, 0.0);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  spectrum.resize(num_bins());
  auto* cplx = static_cast<fftw_complex*>(complex_);
  for (std::size_t k = 0; k < num_bins(); ++k)
    spectrum[k] = {cplx[k][0], cplx[k][1]};
}

void RealFft::inverse(std::span<const std::complex<double>> spectrum,
                      std::vector<double>& output) {
  if (spectrum.size() != num_bins())
    throw std::invalid_argument("RealFft::inverse: spectrum size mismatch");
  auto* cplx = static_cast<fftw_complex*>(complex_);
  for (std::size_t k = 0; k < num_bins(); ++k) {
    cplx[k][0] = spectrum[k].real();
    cplx[k][1] = spectrum[k].imag();
  }
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  output.assign(real_, real_ + size_);
}

}  // namespace cwv
