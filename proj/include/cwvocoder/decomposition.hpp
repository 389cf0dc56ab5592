#pragma once

#include <string>
#include <vector>

#include "cwvocoder/features.hpp"
#include "cwvocoder/wavelet.hpp"

namespace cwv {

/// Non-negative per-scale gains applied before reconstruction; all ones is
/// the identity.
struct ScaleWeights {
  std::vector<double> weights;

  static ScaleWeights identity(std::size_t num_scales) {
    return {std::vector<double>(num_scales, 1.0)};
  }
};

/// Parses "w1,w2,...". Throws InvalidArgument on malformed, negative or
/// non-finite entries.
ScaleWeights parse_scale_weights(const std::string& text);

/// Every scalar trajectory of an utterance decomposed on one shared ladder.
struct FeatureDecomposition {
  ScaleLadder ladder;
  FrameGrid grid;
  WaveletDecomposition contf0;
  WaveletDecomposition mvf;
  /// One decomposition per cepstral coefficient trajectory c(0)..c(order).
  std::vector<WaveletDecomposition> melcep;
  double alpha = 0.42;
  double source_sample_rate = kCanonicalSampleRate;
};

FeatureDecomposition decompose_features(const UtteranceFeatures& features,
                                        const ScaleLadder& ladder);

/// Weighted scale-sum reconstruction of every track; contF0 is clamped to
/// >= f0_floor and MVF into [0, Nyquist] afterwards.
UtteranceFeatures recompose_features(const FeatureDecomposition& decomp,
                                     const ScaleWeights& weights,
                                     double f0_floor = 50.0);

UtteranceFeatures recompose_features(const FeatureDecomposition& decomp);

/// Scale-sum reconstruction of a single decomposition with per-scale weights.
std::vector<double> weighted_inverse(const WaveletDecomposition& decomp,
                                     const ScaleWeights& weights,
                                     double recon_constant);

/// Track names accepted by the decomposition export: "contf0", "mvf",
/// "mcep0" .. "mcep<order>".
std::vector<std::string> track_names(std::size_t order);

const WaveletDecomposition& track_by_name(const FeatureDecomposition& decomp,
                                          const std::string& name);

}  // namespace cwv
