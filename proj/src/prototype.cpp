#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "cwvocoder/error.hpp"
#include "cwvocoder/synthesis.hpp"

namespace cwv {

namespace {

double track_at(const std::vector<double>& v, double sample, double shift) {
  const double pos = std::max(0.0, sample / shift);
  const auto t0 = static_cast<std::size_t>(pos);
  if (t0 + 1 >= v.size()) return v.back();
  const double u = pos - static_cast<double>(t0);
  return v[t0] + u * (v[t0 + 1] - v[t0]);
}

}  // namespace

std::vector<std::vector<double>> extract_residual_frames(std::span<const double> residual,
                                                         const UtteranceFeatures& features,
                                                         std::size_t frame_length) {
  std::vector<std::vector<double>> frames;
  const auto& grid = features.grid();
  const double shift = grid.shift_samples();
  const double rate = grid.sample_rate;
  const auto n = static_cast<double>(residual.size());
  const auto voiced_at = [&](double s) {
    const auto t = static_cast<std::size_t>(std::llround(s / shift));
    return t < features.mvf.size() && features.mvf.values[t] >= kTrainingMinMvf;
  };
  const auto sample = [&](double pos) {
    if (pos < 0.0 || pos > n - 1.0) return 0.0;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= residual.size()) return residual[i];
    const double u = pos - static_cast<double>(i);
    return residual[i] + u * (residual[i + 1] - residual[i]);
  };

  double pos = 0.0;
  while (pos < n) {
    const double period = rate / track_at(features.contf0.values, pos, shift);
    if (!voiced_at(pos)) {
      pos += period;
      continue;
    }
    // Strongest residual sample within the next period.
    const auto begin = static_cast<std::size_t>(pos);
    const auto end = std::min(residual.size(), static_cast<std::size_t>(pos + period) + 1);
    std::size_t peak = begin;
    for (std::size_t i = begin; i < end; ++i)
      if (std::abs(residual[i]) > std::abs(residual[peak])) peak = i;
    const double peak_period = rate / track_at(features.contf0.values, static_cast<double>(peak), shift);
    const double lo = static_cast<double>(peak) - peak_period;
    const double hi = static_cast<double>(peak) + peak_period;
    if (lo >= 0.0 && hi <= n - 1.0 && voiced_at(static_cast<double>(peak))) {
      std::vector<double> f(frame_length);
      for (std::size_t j = 0; j < frame_length; ++j)
        f[j] = sample(lo + 2.0 * peak_period * (j + 0.5) / static_cast<double>(frame_length));
      double mean = 0.0;
      for (double v : f) mean += v;
      mean /= static_cast<double>(frame_length);
      double norm = 0.0;
      for (double& v : f) {
        v -= mean;
        norm += v * v;
      }
      if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& v : f) v /= norm;
        frames.push_back(std::move(f));
      }
    }
    pos = std::max(pos + 0.5 * period, static_cast<double>(peak) + 0.5 * peak_period);
  }
  return frames;
}

PrototypeTraining train_residual_prototype(std::span<const TrainingUtterance> corpus,
                                           std::size_t frame_length,
                                           std::size_t num_components,
                                           const SynthesisConfig& config) {
  if (corpus.empty()) throw TrainingFailure("prototype training: empty corpus");
  if (frame_length < 8) throw InvalidArgument("prototype training: frame_length too short");
  if (num_components < 1 || num_components > frame_length)
    throw InvalidArgument("prototype training: num_components out of range");

  std::vector<std::vector<double>> frames;
  for (const auto& utt : corpus) {
    validate(utt.features);
    const auto residual = mglsa_inverse_filter(utt.waveform.samples, utt.features.melcep, config);
    auto f = extract_residual_frames(residual, utt.features, frame_length);
    frames.insert(frames.end(), std::make_move_iterator(f.begin()),
                  std::make_move_iterator(f.end()));
  }
  if (frames.empty()) throw TrainingFailure("prototype training: no voiced residual frames");

  const auto l = static_cast<Eigen::Index>(frame_length);
  Eigen::MatrixXd second_moment = Eigen::MatrixXd::Zero(l, l);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(l);
  for (const auto& f : frames) {
    const Eigen::Map<const Eigen::VectorXd> v(f.data(), l);
    second_moment.noalias() += v * v.transpose();
    mean += v;
  }
  mean /= static_cast<double>(frames.size());

  // Uncentred PCA: the leading eigenvector is the dominant residual shape.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(second_moment);
  if (eig.info() != Eigen::Success) throw TrainingFailure("prototype training: PCA failed");

  PrototypeTraining out;
  out.frames_used = frames.size();
  out.prototype.frame_length = frame_length;
  out.prototype.mean_frame.assign(mean.data(), mean.data() + l);
  for (std::size_t k = 0; k < num_components; ++k) {
    Eigen::VectorXd c = eig.eigenvectors().col(l - 1 - static_cast<Eigen::Index>(k));
    Eigen::Index imax = 0;
    c.cwiseAbs().maxCoeff(&imax);
    if (c(imax) < 0.0) c = -c;
    c.normalize();
    out.prototype.components.emplace_back(c.data(), c.data() + l);
  }
  return out;
}

}  // namespace cwv
