#include "cwvocoder/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cwvocoder/error.hpp"

namespace cwv {

namespace {

MelCepstrumTrack truncate(const MelCepstrumTrack& c, std::size_t frames) {
  MelCepstrumTrack out = c;
  out.coefficients.resize(frames * (c.order + 1));
  out.grid.num_frames = frames;
  return out;
}

FrameTrack truncate(const FrameTrack& f, std::size_t frames) {
  FrameTrack out = f;
  out.values.resize(frames);
  out.grid.num_frames = frames;
  return out;
}

}  // namespace

std::vector<double> mcd_per_frame(const MelCepstrumTrack& ref, const MelCepstrumTrack& syn,
                                  bool include_gain) {
  if (ref.order != syn.order) throw InvalidArgument("mcd: cepstral orders differ");
  if (ref.alpha != syn.alpha) throw InvalidArgument("mcd: warping factors differ");
  if (ref.num_frames() != syn.num_frames())
    throw InvalidArgument("mcd: frame counts differ (" + std::to_string(ref.num_frames()) +
                          " vs " + std::to_string(syn.num_frames()) + ")");
  std::vector<double> d(ref.num_frames());
  const std::size_t first = include_gain ? 0 : 1;
  for (std::size_t t = 0; t < d.size(); ++t) {
    const auto a = ref.frame(t);
    const auto b = syn.frame(t);
    double sum = 0.0;
    for (std::size_t m = first; m < a.size(); ++m) sum += (a[m] - b[m]) * (a[m] - b[m]);
    d[t] = kMcdScale * std::sqrt(sum);
  }
  return d;
}

double mcd(const MelCepstrumTrack& ref, const MelCepstrumTrack& syn, bool include_gain) {
  const auto d = mcd_per_frame(ref, syn, include_gain);
  if (d.empty()) throw InvalidArgument("mcd: empty tracks");
  double sum = 0.0;
  for (double v : d) sum += v;
  return sum / static_cast<double>(d.size());
}

double f0_rmse(const FrameTrack& ref, const FrameTrack& syn) {
  if (ref.size() != syn.size())
    throw InvalidArgument("f0_rmse: frame counts differ (" + std::to_string(ref.size()) + " vs " +
                          std::to_string(syn.size()) + ")");
  if (ref.size() == 0) throw InvalidArgument("f0_rmse: empty tracks");
  double sum = 0.0;
  for (std::size_t t = 0; t < ref.size(); ++t) {
    const double e = ref.values[t] - syn.values[t];
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(ref.size()));
}

EvaluationReport evaluate_pair(const Waveform& ref, const Waveform& syn,
                               const AnalysisConfig& config, bool include_gain) {
  if (ref.sample_rate != syn.sample_rate)
    throw InvalidArgument("evaluate: sample rates differ (" + std::to_string(ref.sample_rate) +
                          " vs " + std::to_string(syn.sample_rate) + ")");
  const double dr = ref.duration();
  const double ds = syn.duration();
  if (dr <= 0.0 || std::abs(ds - dr) > kMaxDurationMismatch * dr)
    throw AlignmentFailure("evaluate: durations differ by more than 10% (" + std::to_string(dr) +
                           " s vs " + std::to_string(ds) + " s)");
  const auto a = analyze_utterance(ref, config);
  const auto b = analyze_utterance(syn, config);
  const std::size_t frames = std::min(a.num_frames(), b.num_frames());

  EvaluationReport r;
  r.num_frames = frames;
  r.per_frame_mcd =
      mcd_per_frame(truncate(a.melcep, frames), truncate(b.melcep, frames), include_gain);
  double sum = 0.0;
  for (double v : r.per_frame_mcd) sum += v;
  r.mcd_db = frames ? sum / static_cast<double>(frames) : 0.0;
  r.f0_rmse_hz = f0_rmse(truncate(a.contf0, frames), truncate(b.contf0, frames));
  return r;
}

MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  s.n = values.size();
  if (s.n == 0) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(s.n);
  if (s.n < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  const double sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  s.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(s.n));
  return s;
}

}  // namespace cwv
