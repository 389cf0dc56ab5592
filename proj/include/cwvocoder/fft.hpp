#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cwv {

/// Real-to-complex / complex-to-real FFT of a fixed size.
///
/// Plans are created with FFTW_ESTIMATE so that repeated runs produce
/// bit-identical results. Plan creation is serialized internally; execution
/// is safe from multiple threads as long as each thread owns its RealFft.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&& other) noexcept;
  RealFft& operator=(RealFft&& other) noexcept;

  std::size_t size() const noexcept { return size_; }
  std::size_t num_bins() const noexcept { return size_ / 2 + 1; }

  /// Forward transform; `input` shorter than size() is zero padded.
  void forward(std::span<const double> input,
               std::vector<std::complex<double>>& spectrum);

  /// Unnormalized inverse (FFTW convention): output is size() times the
  /// true inverse.
  void inverse(std::span<const std::complex<double>> spectrum,
               std::vector<double>& output);

 private:
  void release() noexcept;

  std::size_t size_ = 0;
  double* real_ = nullptr;
  void* complex_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

/// Smallest power of two that is >= n.
std::size_t next_pow2(std::size_t n);

}  // namespace cwv
