#include "cwvocoder/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cwvocoder/error.hpp"

namespace cwv {

ScaleWeights parse_scale_weights(const std::string& text) {
  ScaleWeights w;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("scale weights: '" + cell + "' is not a number");
    }
    if (used != cell.size() && cell.find_first_not_of(" \t", used) != std::string::npos)
      throw InvalidArgument("scale weights: '" + cell + "' is not a number");
    if (!std::isfinite(v) || v < 0.0)
      throw InvalidArgument("scale weights: entries must be finite and >= 0");
    w.weights.push_back(v);
  }
  if (w.weights.empty()) throw InvalidArgument("scale weights: empty list");
  return w;
}

FeatureDecomposition decompose_features(const UtteranceFeatures& features,
                                        const ScaleLadder& ladder) {
  validate(features);
  FeatureDecomposition d;
  d.ladder = ladder;
  d.grid = features.grid();
  d.alpha = features.melcep.alpha;
  d.source_sample_rate = features.source_sample_rate;
  d.contf0 = cwt_forward(features.contf0.values, ladder);
  d.mvf = cwt_forward(features.mvf.values, ladder);
  const std::size_t frames = features.num_frames();
  const std::size_t dims = features.melcep.order + 1;
  std::vector<double> trajectory(frames);
  for (std::size_t m = 0; m < dims; ++m) {
    for (std::size_t t = 0; t < frames; ++t)
      trajectory[t] = features.melcep.coefficients[t * dims + m];
    d.melcep.push_back(cwt_forward(trajectory, ladder));
  }
  return d;
}

std::vector<double> weighted_inverse(const WaveletDecomposition& decomp,
                                     const ScaleWeights& weights,
                                     double recon_constant) {
  if (weights.weights.size() != decomp.num_scales())
    throw InvalidArgument("scale weights: expected " + std::to_string(decomp.num_scales()) +
                          " entries, got " + std::to_string(weights.weights.size()));
  for (double w : weights.weights)
    if (!std::isfinite(w) || w < 0.0)
      throw InvalidArgument("scale weights: entries must be finite and >= 0");
  WaveletDecomposition scaled = decomp;
  for (std::size_t i = 0; i < scaled.num_scales(); ++i)
    for (double& v : scaled.row(i)) v *= weights.weights[i];
  return cwt_inverse(scaled, recon_constant);
}

UtteranceFeatures recompose_features(const FeatureDecomposition& decomp,
                                     const ScaleWeights& weights, double f0_floor) {
  const double c = calibrate_reconstruction_constant(decomp.ladder);
  UtteranceFeatures f;
  f.source_sample_rate = decomp.source_sample_rate;

  f.contf0.kind = TrackKind::ContF0;
  f.contf0.grid = decomp.grid;
  f.contf0.values = weighted_inverse(decomp.contf0, weights, c);
  for (double& v : f.contf0.values) v = std::max(v, f0_floor);

  f.mvf.kind = TrackKind::Mvf;
  f.mvf.grid = decomp.grid;
  f.mvf.values = weighted_inverse(decomp.mvf, weights, c);
  const double nyquist = decomp.grid.sample_rate / 2.0;
  for (double& v : f.mvf.values) v = std::clamp(v, 0.0, nyquist);

  f.melcep.order = decomp.melcep.size() - 1;
  f.melcep.alpha = decomp.alpha;
  f.melcep.grid = decomp.grid;
  const std::size_t frames = decomp.grid.num_frames;
  const std::size_t dims = decomp.melcep.size();
  f.melcep.coefficients.assign(frames * dims, 0.0);
  for (std::size_t m = 0; m < dims; ++m) {
    const auto traj = weighted_inverse(decomp.melcep[m], weights, c);
    for (std::size_t t = 0; t < frames; ++t) f.melcep.coefficients[t * dims + m] = traj[t];
  }
  return f;
}

UtteranceFeatures recompose_features(const FeatureDecomposition& decomp) {
  return recompose_features(decomp, ScaleWeights::identity(decomp.ladder.size()));
}

std::vector<std::string> track_names(std::size_t order) {
  std::vector<std::string> names{"contf0", "mvf"};
  for (std::size_t m = 0; m <= order; ++m) names.push_back("mcep" + std::to_string(m));
  return names;
}

const WaveletDecomposition& track_by_name(const FeatureDecomposition& decomp,
                                          const std::string& name) {
  if (name == "contf0") return decomp.contf0;
  if (name == "mvf") return decomp.mvf;
  if (name.rfind("mcep", 0) == 0 && name.size() > 4 &&
      name.find_first_not_of("0123456789", 4) == std::string::npos) {
    const auto m = std::stoul(name.substr(4));
    if (m < decomp.melcep.size()) return decomp.melcep[m];
  }
  std::string valid;
  for (const auto& n : track_names(decomp.melcep.size() - 1))
    valid += (valid.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown track '" + name + "'; valid tracks: " + valid);
}

}  // namespace cwv
