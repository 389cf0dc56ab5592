#include "cwvocoder/pipeline.hpp"

#include <cmath>

#include "cwvocoder/error.hpp"

namespace cwv {

namespace {

void require(bool ok, const char* flag, const std::string& why) {
  if (!ok) throw InvalidArgument(std::string(flag) + ": " + why);
}

}  // namespace

void validate(const RunConfig& c) {
  require(std::isfinite(c.f0_floor) && c.f0_floor > 0.0, "--f0-floor", "must be positive");
  require(std::isfinite(c.f0_ceil) && c.f0_ceil > c.f0_floor, "--f0-ceil",
          "must exceed --f0-floor");
  require(c.f0_ceil < kCanonicalSampleRate / 2.0, "--f0-ceil", "must be below Nyquist");
  require(c.order >= 1 && c.order <= 100, "--order", "must be in [1, 100]");
  require(std::isfinite(c.alpha) && std::abs(c.alpha) < 1.0, "--alpha", "must satisfy |alpha| < 1");
  require(std::isfinite(c.base_scale) && c.base_scale > 0.0, "--base-scale", "must be positive");
  require(c.num_scales >= 1 && c.num_scales <= 20, "--num-scales", "must be in [1, 20]");
  require(c.drop_finest < c.num_scales, "--drop-finest", "must be below --num-scales");
  require(std::isfinite(c.noise_gain) && c.noise_gain >= 0.0, "--noise-gain",
          "must be finite and >= 0");
}

AnalysisConfig analysis_config(const RunConfig& c) {
  AnalysisConfig a;
  a.f0_floor = c.f0_floor;
  a.f0_ceil = c.f0_ceil;
  a.order = c.order;
  a.alpha = c.alpha;
  a.base_scale = c.base_scale;
  a.num_scales = c.num_scales;
  a.drop_finest = c.drop_finest;
  return a;
}

SynthesisConfig synthesis_config(const RunConfig& c) {
  SynthesisConfig s;
  s.noise_seed = c.noise_seed;
  s.alpha = c.alpha;
  s.noise_gain = c.noise_gain;
  return s;
}

ScaleLadder feature_ladder(const RunConfig& c) {
  return make_scale_ladder(c.base_scale, c.num_scales);
}

CopySynthesisResult copy_synthesize(const Waveform& wave, const RunConfig& config,
                                    const CopySynthesisOptions& options) {
  validate(config);
  const auto acfg = analysis_config(config);
  const auto scfg = synthesis_config(config);
  CopySynthesisResult out;
  out.features = analyze_utterance(wave, acfg);

  if (options.cwt_roundtrip || options.scale_weights) {
    const auto decomp = decompose_features(out.features, feature_ladder(config));
    const auto weights = options.scale_weights.value_or(ScaleWeights::identity(config.num_scales));
    out.features = recompose_features(decomp, weights, config.f0_floor);
  }

  ResidualPrototype prototype;
  if (options.prototype) {
    prototype = *options.prototype;
  } else {
    try {
      const TrainingUtterance utt{wave, out.features};
      prototype = train_residual_prototype({&utt, 1}, 512, 1, scfg).prototype;
    } catch (const TrainingFailure&) {
      prototype = impulse_prototype();
    }
  }

  out.synthesis = synthesize(out.features, prototype, scfg);
  if (options.report) out.report = evaluate_pair(wave, out.synthesis.waveform, acfg);
  return out;
}

}  // namespace cwv
