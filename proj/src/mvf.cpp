#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "cwvocoder/error.hpp"
#include "cwvocoder/features.hpp"
#include "cwvocoder/fft.hpp"

namespace cwv {

namespace {

constexpr double kPeriodSearch = 0.03;
constexpr double kCoarseStep = 0.1;
constexpr double kFineStep = 0.02;
constexpr std::size_t kMedianSpan = 5;

std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i + 0.5) / static_cast<double>(n));
  return w;
}

void windowed_segment(const std::vector<double>& x, long long start,
                      const std::vector<double>& window, std::vector<double>& out) {
  out.resize(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) {
    const long long k = start + static_cast<long long>(i);
    const double v = (k < 0 || k >= static_cast<long long>(x.size()))
                         ? 0.0
                         : x[static_cast<std::size_t>(k)];
    out[i] = v * window[i];
  }
}

}  // namespace

std::vector<double> band_harmonicity(const Waveform& wave, long long centre,
                                     double period, std::size_t window_samples,
                                     double band_width) {
  if (!(period >= 2.0)) throw InvalidArgument("band_harmonicity: period too short");
  const double nyquist = wave.sample_rate / 2.0;
  const auto num_bands = static_cast<std::size_t>(std::ceil(nyquist / band_width - 1e-9));
  std::vector<double> scores(num_bands, 0.0);

  const std::size_t fft_size = std::max<std::size_t>(1024, next_pow2(window_samples));
  RealFft fft(fft_size);
  const auto window = hann(window_samples);
  const long long start =
      centre - static_cast<long long>(window_samples / 2) - std::llround(period / 2.0);

  std::vector<double> seg;
  std::vector<std::complex<double>> x1;
  windowed_segment(wave.samples, start, window, seg);
  fft.forward(seg, x1);
  const std::size_t bins = fft.num_bins();
  const double bin_omega = 2.0 * std::numbers::pi / static_cast<double>(fft_size);

  double e1 = 0.0;
  for (std::size_t k = 1; k < bins; ++k) e1 += std::norm(x1[k]);
  if (e1 <= 0.0) return scores;

  // Cross-spectra for every integer lag in the search range.
  const double lo = period * (1.0 - kPeriodSearch), hi = period * (1.0 + kPeriodSearch);
  const long long lag_lo = static_cast<long long>(std::floor(lo));
  const long long lag_hi = static_cast<long long>(std::ceil(hi));
  std::vector<std::vector<std::complex<double>>> cross;
  std::vector<std::vector<double>> power2;
  std::vector<std::complex<double>> x2;
  for (long long lag = lag_lo; lag <= lag_hi; ++lag) {
    windowed_segment(wave.samples, start + lag, window, seg);
    fft.forward(seg, x2);
    std::vector<std::complex<double>> c(bins);
    std::vector<double> p2(bins);
    for (std::size_t k = 0; k < bins; ++k) {
      c[k] = x1[k] * std::conj(x2[k]);
      p2[k] = std::norm(x2[k]);
    }
    cross.push_back(std::move(c));
    power2.push_back(std::move(p2));
  }

  // Full-band correlation at a fractional period P: the cross-spectrum of the
  // nearest integer lag L, phase-corrected by exp(j w (L - P)).
  const auto score_at = [&](double p, std::size_t k_begin, std::size_t k_end) {
    const long long lag = std::clamp(std::llround(p), lag_lo, lag_hi);
    const auto& c = cross[static_cast<std::size_t>(lag - lag_lo)];
    const auto& p2 = power2[static_cast<std::size_t>(lag - lag_lo)];
    const double d = static_cast<double>(lag) - p;
    double num = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t k = k_begin; k < k_end; ++k) {
      const double ph = bin_omega * static_cast<double>(k) * d;
      num += c[k].real() * std::cos(ph) - c[k].imag() * std::sin(ph);
      n1 += std::norm(x1[k]);
      n2 += p2[k];
    }
    const double denom = std::sqrt(n1 * n2);
    return denom > 0.0 ? num / denom : 0.0;
  };

  double best_p = period, best = -2.0;
  for (double p = lo; p <= hi; p += kCoarseStep) {
    const double s = score_at(p, 1, bins);
    if (s > best) {
      best = s;
      best_p = p;
    }
  }
  const double centre_p = best_p;
  for (double p = centre_p - kCoarseStep; p <= centre_p + kCoarseStep; p += kFineStep) {
    const double s = score_at(p, 1, bins);
    if (s > best) {
      best = s;
      best_p = p;
    }
  }

  const double hz_per_bin = wave.sample_rate / static_cast<double>(fft_size);
  for (std::size_t b = 0; b < num_bands; ++b) {
    auto k0 = static_cast<std::size_t>(std::ceil(b * band_width / hz_per_bin - 1e-9));
    auto k1 = static_cast<std::size_t>(std::ceil((b + 1) * band_width / hz_per_bin - 1e-9));
    k0 = std::max<std::size_t>(k0, 1);
    k1 = b + 1 == num_bands ? bins : std::min(k1, bins);
    if (k0 < k1) scores[b] = score_at(best_p, k0, k1);
  }
  return scores;
}

FrameTrack estimate_mvf(const Waveform& wave, const FrameGrid& grid,
                        const FrameTrack& contf0) {
  if (contf0.size() != grid.num_frames)
    throw InvalidArgument("estimate_mvf: contF0 is not aligned to the grid");
  const double nyquist = wave.sample_rate / 2.0;
  std::vector<double> raw(grid.num_frames, 0.0);
  const std::size_t window = grid.window_samples();
  for (std::size_t t = 0; t < grid.num_frames; ++t) {
    const double period = wave.sample_rate / contf0.values[t];
    const auto scores = band_harmonicity(wave, grid.centre_sample(t), period, window);
    std::size_t passing = 0;
    while (passing < scores.size() && scores[passing] > kMvfThreshold) ++passing;
    raw[t] = std::min(nyquist, static_cast<double>(passing) * kMvfBandWidth);
  }

  FrameTrack mvf;
  mvf.kind = TrackKind::Mvf;
  mvf.grid = grid;
  mvf.values.resize(grid.num_frames);
  std::vector<double> span;
  for (std::size_t t = 0; t < grid.num_frames; ++t) {
    const std::size_t a = t >= kMedianSpan / 2 ? t - kMedianSpan / 2 : 0;
    const std::size_t b = std::min(grid.num_frames, t + kMedianSpan / 2 + 1);
    span.assign(raw.begin() + static_cast<long>(a), raw.begin() + static_cast<long>(b));
    std::nth_element(span.begin(), span.begin() + static_cast<long>(span.size() / 2), span.end());
    mvf.values[t] = span[span.size() / 2];
  }
  return mvf;
}

}  // namespace cwv
