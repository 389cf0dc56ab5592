#include "cwvocoder/error.hpp"
#include "cwvocoder/features.hpp"

namespace cwv {

UtteranceFeatures analyze_utterance(const Waveform& wave, const AnalysisConfig& config) {
  validate(wave);
  const FrameGrid grid = make_frame_grid(wave, config.frame_shift, config.window_length);

  UtteranceFeatures f;
  f.source_sample_rate = wave.sample_rate;
  f.contf0 = track_contf0(wave, grid, config.f0_floor, config.f0_ceil);
  if (config.refine_f0) {
    const auto ladder = make_scale_ladder(config.base_scale, config.num_scales);
    f.contf0 = refine_contf0_cwt(f.contf0, ladder, config.drop_finest, config.f0_floor);
  }
  f.mvf = estimate_mvf(wave, grid, f.contf0);
  const auto envelope =
      extract_spectral_envelope(wave, grid, f.contf0, config.fft_size, config.log_floor_db);
  f.melcep = envelope_to_melcepstrum(envelope, config.order, config.alpha);
  return f;
}

}  // namespace cwv
