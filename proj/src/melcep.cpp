#include <cmath>
#include <numbers>

#include "cwvocoder/error.hpp"
#include "cwvocoder/features.hpp"

namespace cwv {

namespace {

const double kNeperPerDb = std::numbers::ln10 / 20.0;

void check_warp(std::size_t order, double alpha) {
  if (order < 1) throw InvalidArgument("mel-cepstrum: order must be >= 1");
  if (!(std::abs(alpha) < 1.0)) throw InvalidArgument("mel-cepstrum: |alpha| must be < 1");
}

}  // namespace

double warp_frequency(double omega, double alpha) {
  return omega + 2.0 * std::atan(alpha * std::sin(omega) / (1.0 - alpha * std::cos(omega)));
}

// L(w) = sum_m c(m) cos(m beta(w)). The warped cosines are orthogonal in
// d(beta) = beta'(w) dw, and the integrand is smooth and 2 pi periodic in w,
// so the trapezoid rule on the FFT bins is exact to rounding for
// order-limited spectra.
std::vector<double> log_amplitude_to_melcep(std::span<const double> log_amp,
                                            std::size_t order, double alpha) {
  check_warp(order, alpha);
  if (log_amp.size() < 2) throw InvalidArgument("mel-cepstrum: need at least two bins");
  const std::size_t last = log_amp.size() - 1;
  const double n = 2.0 * static_cast<double>(last);
  std::vector<double> c(order + 1, 0.0);
  const double a2 = alpha * alpha;
  for (std::size_t k = 0; k <= last; ++k) {
    const double w = std::numbers::pi * static_cast<double>(k) / static_cast<double>(last);
    const double beta = warp_frequency(w, alpha);
    const double jac = (1.0 - a2) / (1.0 - 2.0 * alpha * std::cos(w) + a2);
    const double weight = (k == 0 || k == last ? 1.0 : 2.0) * log_amp[k] * jac / n;
    for (std::size_t m = 0; m <= order; ++m)
      c[m] += weight * std::cos(static_cast<double>(m) * beta);
  }
  for (std::size_t m = 1; m <= order; ++m) c[m] *= 2.0;
  return c;
}

std::vector<double> melcep_to_log_amplitude(std::span<const double> melcep,
                                            double alpha, std::size_t num_bins) {
  if (num_bins < 2) throw InvalidArgument("mel-cepstrum: need at least two bins");
  std::vector<double> out(num_bins, 0.0);
  const std::size_t last = num_bins - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    const double w = std::numbers::pi * static_cast<double>(k) / static_cast<double>(last);
    const double beta = warp_frequency(w, alpha);
    double acc = 0.0;
    for (std::size_t m = 0; m < melcep.size(); ++m)
      acc += melcep[m] * std::cos(static_cast<double>(m) * beta);
    out[k] = acc;
  }
  return out;
}

MelCepstrumTrack envelope_to_melcepstrum(const SpectralEnvelope& envelope,
                                         std::size_t order, double alpha) {
  check_warp(order, alpha);
  MelCepstrumTrack mc;
  mc.order = order;
  mc.alpha = alpha;
  mc.grid = envelope.grid;
  mc.coefficients.resize(envelope.num_frames() * (order + 1));
  std::vector<double> log_amp(envelope.num_bins());
  for (std::size_t t = 0; t < envelope.num_frames(); ++t) {
    const auto db = envelope.frame(t);
    for (std::size_t k = 0; k < db.size(); ++k) log_amp[k] = db[k] * kNeperPerDb;
    const auto c = log_amplitude_to_melcep(log_amp, order, alpha);
    std::copy(c.begin(), c.end(), mc.frame(t).begin());
  }
  return mc;
}

SpectralEnvelope melcepstrum_to_envelope(const MelCepstrumTrack& melcep,
                                         std::size_t fft_size) {
  SpectralEnvelope env;
  env.fft_size = fft_size;
  env.grid = melcep.grid;
  env.db.resize(melcep.num_frames() * env.num_bins());
  for (std::size_t t = 0; t < melcep.num_frames(); ++t) {
    const auto la = melcep_to_log_amplitude(melcep.frame(t), melcep.alpha, env.num_bins());
    auto out = env.frame(t);
    for (std::size_t k = 0; k < la.size(); ++k) out[k] = la[k] / kNeperPerDb;
  }
  return env;
}

}  // namespace cwv
