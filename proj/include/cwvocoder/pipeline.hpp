#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cwvocoder/decomposition.hpp"
#include "cwvocoder/features.hpp"
#include "cwvocoder/metrics.hpp"
#include "cwvocoder/synthesis.hpp"

namespace cwv {

/// Every tunable exposed on the command line.
struct RunConfig {
  double f0_floor = 50.0;
  double f0_ceil = 400.0;
  std::size_t order = 24;
  double alpha = 0.42;
  /// In frames.
  double base_scale = 2.0;
  std::size_t num_scales = kDefaultNumScales;
  std::size_t drop_finest = 1;
  std::uint64_t noise_seed = 1234;
  double noise_gain = 1.0;
};

/// Throws InvalidArgument naming the offending flag (e.g. "--f0-ceil").
void validate(const RunConfig& config);

AnalysisConfig analysis_config(const RunConfig& config);
SynthesisConfig synthesis_config(const RunConfig& config);
ScaleLadder feature_ladder(const RunConfig& config);

struct CopySynthesisOptions {
  /// Decompose and recompose every track before synthesis.
  bool cwt_roundtrip = false;
  /// Per-scale weights for the recomposition; implies cwt_roundtrip.
  std::optional<ScaleWeights> scale_weights;
  /// Residual prototype; when absent one is trained on the input itself,
  /// falling back to an impulse when it has no voiced material.
  std::optional<ResidualPrototype> prototype;
  bool report = false;
};

struct CopySynthesisResult {
  UtteranceFeatures features;
  SynthesisResult synthesis;
  std::optional<EvaluationReport> report;
};

CopySynthesisResult copy_synthesize(const Waveform& wave, const RunConfig& config,
                                    const CopySynthesisOptions& options = {});

}  // namespace cwv
