#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace cwv {

enum class WaveletKind { MexicanHat };

/// Default truncation half-width. The truncated hat integrates to
/// 2 K T exp(-T^2/2): 3.2e-5 at T = 5 but 1.6e-7 at T = 6.
inline constexpr double kMexicanHatSupport = 6.0;

/// Real, even, zero-mean mother wavelet truncated to |t| <= effective_support.
struct MotherWavelet {
  WaveletKind kind = WaveletKind::MexicanHat;
  double effective_support = kMexicanHatSupport;

  double operator()(double t) const;
};

/// Normalized Mexican hat, 2/(sqrt(3) pi^(1/4)) (1 - t^2) exp(-t^2/2),
/// exactly zero for |t| > kMexicanHatSupport.
double mexican_hat(double t);

/// Octave-spaced analysis scales: scales[i] = base * 2^i.
class ScaleLadder {
 public:
  ScaleLadder() = default;

  const std::vector<double>& scales() const noexcept { return scales_; }
  std::size_t size() const noexcept { return scales_.size(); }
  double base_scale() const { return scales_.front(); }
  double operator[](std::size_t i) const { return scales_[i]; }

  /// Same ladder with every scale multiplied by `factor`.
  ScaleLadder scaled(double factor) const;

  friend bool operator==(const ScaleLadder&, const ScaleLadder&) = default;

 private:
  friend ScaleLadder make_scale_ladder(double, std::size_t);
  std::vector<double> scales_;
};

inline constexpr std::size_t kDefaultNumScales = 10;

ScaleLadder make_scale_ladder(double base_scale,
                              std::size_t num_scales = kDefaultNumScales);

/// M scales x N positions coefficient matrix, row-major, plus the mean that
/// was removed from the signal before analysis.
struct WaveletDecomposition {
  ScaleLadder ladder;
  std::size_t signal_length = 0;
  double signal_mean = 0.0;
  std::vector<double> coefficients;

  std::size_t num_scales() const noexcept { return ladder.size(); }
  std::span<double> row(std::size_t i) {
    return {coefficients.data() + i * signal_length, signal_length};
  }
  std::span<const double> row(std::size_t i) const {
    return {coefficients.data() + i * signal_length, signal_length};
  }
  double& at(std::size_t scale, std::size_t pos) {
    return coefficients[scale * signal_length + pos];
  }
  double at(std::size_t scale, std::size_t pos) const {
    return coefficients[scale * signal_length + pos];
  }
};

struct ReconstructionReport {
  double epsilon_rms = 0.0;
  double epsilon_relative = 0.0;
};

/// Discretized forward CWT:
///   W(a_i, b) = a_i^{-1/2} sum_x f(x) psi((x - b) / a_i)
/// over the truncated support, after removing the signal mean. The signal is
/// extended by symmetric (half-sample) reflection at both ends. Small kernels
/// are correlated directly, large ones through FFT convolution.
WaveletDecomposition cwt_forward(std::span<const double> signal,
                                 const ScaleLadder& ladder,
                                 const MotherWavelet& wavelet = {});

/// Approximate inverse by scale summation:
///   f(x) = mean + (1 / C) sum_i W(a_i, x) / sqrt(a_i)
std::vector<double> cwt_inverse(const WaveletDecomposition& decomp,
                                double recon_constant);

/// Reconstruction constant C for `ladder`.
///
/// The transform followed by the scale sum maps a unit cosine of angular
/// frequency w (radians/sample) onto G(w) cos(w b) away from the boundaries,
/// with G(w) = sum_i a_i^{-1} sum_j psi(j / a_i) cos(w j). G ripples
/// log-periodically with period one octave, so C is the log-frequency
/// average of G over the octave centred on the ladder's middle scale.
double calibrate_reconstruction_constant(const ScaleLadder& ladder,
                                         const MotherWavelet& wavelet = {});

/// Value of G(w) described above; exposed for diagnostics and tests.
double reconstruction_gain(const ScaleLadder& ladder, double omega,
                           const MotherWavelet& wavelet = {});

ReconstructionReport reconstruction_error(std::span<const double> original,
                                          std::span<const double> reconstructed);

/// Map any integer index onto [0, n) by half-sample symmetric reflection.
std::size_t reflect_index(long long i, std::size_t n);

/// CSV matrix export: header `scale,0,1,...,N-1`, one row per scale, values
/// with 9 significant digits, followed by a `# signal_mean=<value>` trailer.
/// With `magnitude` set, |W| is written instead of W.
void write_decomposition_csv(std::ostream& os,
                             const WaveletDecomposition& decomp,
                             bool magnitude = false);

/// Inverse of write_decomposition_csv (magnitude files cannot be inverted).
WaveletDecomposition read_decomposition_csv(std::istream& is);

}  // namespace cwv
