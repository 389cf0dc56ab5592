#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "cwvocoder/error.hpp"
#include "cwvocoder/features.hpp"
#include "cwvocoder/fft.hpp"

namespace cwv {

namespace {

constexpr double kPeriodsPerWindow = 3.0;
constexpr double kLifterFactor = 1.2;
const double kDbPerNeper = 20.0 / std::numbers::ln10;

}  // namespace

SpectralEnvelope extract_spectral_envelope(const Waveform& wave,
                                           const FrameGrid& grid,
                                           const FrameTrack& contf0,
                                           std::size_t fft_size,
                                           double log_floor_db) {
  if (contf0.size() != grid.num_frames)
    throw InvalidArgument("extract_spectral_envelope: contF0 is not aligned to the grid");
  if (fft_size < 2 * grid.window_samples() || (fft_size & (fft_size - 1)) != 0)
    throw InvalidArgument("extract_spectral_envelope: fft_size must be a power of two "
                          ">= twice the window length");

  SpectralEnvelope env;
  env.fft_size = fft_size;
  env.grid = grid;
  env.db.assign(grid.num_frames * env.num_bins(), log_floor_db);

  RealFft fft(fft_size);
  const std::size_t bins = env.num_bins();
  // Floors are applied to power (|X|^2), i.e. ln P >= log_floor_db / 10 * ln 10.
  const double log_power_floor = log_floor_db / 10.0 * std::numbers::ln10;
  std::vector<double> frame(fft_size), cep;
  std::vector<std::complex<double>> spec, logspec(bins);

  for (std::size_t t = 0; t < grid.num_frames; ++t) {
    const double f0 = contf0.values[t];
    auto len = static_cast<std::size_t>(std::llround(kPeriodsPerWindow * wave.sample_rate / f0));
    len = std::min(len, grid.window_samples());
    len |= 1;  // odd, so the window is centred on the frame sample
    const long long start = grid.centre_sample(t) - static_cast<long long>(len / 2);
    double wsum2 = 0.0;
    std::fill(frame.begin(), frame.end(), 0.0);
    for (std::size_t i = 0; i < len; ++i) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i + 1.0) / (len + 1.0));
      wsum2 += w * w;
      const long long k = start + static_cast<long long>(i);
      if (k >= 0 && k < static_cast<long long>(wave.samples.size()))
        frame[i] = w * wave.samples[static_cast<std::size_t>(k)];
    }
    fft.forward(frame, spec);
    for (std::size_t k = 0; k < bins; ++k)
      logspec[k] = std::max(std::log(std::norm(spec[k]) / wsum2), log_power_floor);

    // Cepstral liftering: keep quefrencies below 1 / (1.2 F0).
    fft.inverse(logspec, cep);
    const auto cutoff = static_cast<std::size_t>(
        std::floor(wave.sample_rate / (kLifterFactor * f0)));
    const double inv_n = 1.0 / static_cast<double>(fft_size);
    for (std::size_t q = 0; q < fft_size; ++q) {
      const std::size_t quef = std::min(q, fft_size - q);
      cep[q] = quef <= cutoff ? cep[q] * inv_n : 0.0;
    }
    fft.forward(cep, spec);
    auto out = env.frame(t);
    for (std::size_t k = 0; k < bins; ++k)
      out[k] = std::max(0.5 * kDbPerNeper * spec[k].real(), log_floor_db);
  }
  return env;
}

}  // namespace cwv
