#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "cwvocoder/features.hpp"

namespace testing {

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sd = 0.1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sd);
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

// Unit impulses every sample_rate/f0 samples (rounded per pulse, drift-free).
inline cwv::Waveform impulse_train(double f0, double seconds, double amp = 0.5,
                                   double rate = 16000.0) {
  cwv::Waveform w;
  w.sample_rate = rate;
  w.samples.assign(static_cast<std::size_t>(seconds * rate), 0.0);
  for (double t = 0.0; t < static_cast<double>(w.samples.size()); t += rate / f0)
    w.samples[static_cast<std::size_t>(std::lround(t)) % w.samples.size()] = amp;
  return w;
}

// Sum of cosines at every harmonic of f0 up to `max_hz`; phases are fixed so
// the signal is periodic and peaky.
inline std::vector<double> harmonic_signal(double f0, double max_hz, std::size_t n,
                                           double rate = 16000.0, double amp = 0.02) {
  std::vector<double> x(n, 0.0);
  for (double h = f0; h <= max_hz; h += f0)
    for (std::size_t i = 0; i < n; ++i)
      x[i] += amp * std::cos(2.0 * std::numbers::pi * h * static_cast<double>(i) / rate);
  return x;
}

inline double rms(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return x.empty() ? 0.0 : std::sqrt(s / static_cast<double>(x.size()));
}

// Plain O(N^2) DFT power in the band [lo_hz, hi_hz).
inline double band_energy(const std::vector<double>& x, double lo_hz, double hi_hz,
                          double rate = 16000.0) {
  // Hann-windowed so strong low harmonics do not leak into the measured band.
  const std::size_t n = x.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = x[i] * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                        static_cast<double>(n)));
  double e = 0.0;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double f = rate * static_cast<double>(k) / static_cast<double>(n);
    if (f < lo_hz || f >= hi_hz) continue;
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      acc += w[i] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * i % n) /
                                        static_cast<double>(n));
    e += std::norm(acc);
  }
  return e;
}

// Lag in [lo, hi] maximizing the (biased) autocorrelation.
inline std::size_t dominant_lag(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  double best_r = -1e300;
  for (std::size_t lag = lo; lag <= hi; ++lag) {
    double r = 0.0;
    for (std::size_t i = 0; i + lag < x.size(); ++i) r += x[i] * x[i + lag];
    if (r > best_r) {
      best_r = r;
      best = lag;
    }
  }
  return best;
}

}  // namespace testing
