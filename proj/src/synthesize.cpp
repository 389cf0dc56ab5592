#include <algorithm>
#include <cmath>

#include "cwvocoder/error.hpp"
#include "cwvocoder/synthesis.hpp"

namespace cwv {

namespace {
constexpr double kPeakLimit = 0.99;
}

std::size_t synthesis_length(const FrameGrid& grid) {
  return static_cast<std::size_t>(
      std::llround(static_cast<double>(grid.num_frames) * grid.shift_samples()));
}

SynthesisResult synthesize(const UtteranceFeatures& features,
                           const ResidualPrototype& prototype,
                           const SynthesisConfig& config) {
  validate(features);
  validate(config);
  const auto& grid = features.grid();
  const std::size_t n = synthesis_length(grid);

  SynthesisResult r;
  const auto voiced = generate_voiced_excitation(features.contf0, prototype, n, grid.sample_rate);
  r.excitation = mix_excitation_mvf(voiced, features.mvf, grid, config.noise_seed,
                                    config.noise_gain, config.lowpass_taps);
  auto y = mglsa_synthesis_filter(r.excitation.samples, features.melcep, config);

  double peak = 0.0;
  for (double v : y) {
    if (!std::isfinite(v)) throw Error("synthesis produced a non-finite sample");
    peak = std::max(peak, std::abs(v));
  }
  if (peak > kPeakLimit) {
    r.normalization = kPeakLimit / peak;
    for (double& v : y) v *= r.normalization;
  }
  r.waveform.sample_rate = grid.sample_rate;
  r.waveform.samples = std::move(y);
  return r;
}

}  // namespace cwv
