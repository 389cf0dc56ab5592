#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cwvocoder/features.hpp"

namespace cwv {

/// 10 / ln 10: converts natural-log cepstral distance to dB.
inline constexpr double kMcdScale = 4.3429448190325175;

struct EvaluationReport {
  double mcd_db = 0.0;
  double f0_rmse_hz = 0.0;
  std::size_t num_frames = 0;
  std::vector<double> per_frame_mcd;
};

/// Mean over frames of kMcdScale * ||c_ref(m) - c_syn(m)||, m from 1 (or 0
/// when include_gain). Throws InvalidArgument on order, alpha or frame count
/// mismatch.
double mcd(const MelCepstrumTrack& ref, const MelCepstrumTrack& syn, bool include_gain = false);

/// Per-frame distances behind mcd().
std::vector<double> mcd_per_frame(const MelCepstrumTrack& ref, const MelCepstrumTrack& syn,
                                  bool include_gain = false);

/// Root-mean-square difference in Hz. Throws InvalidArgument on length
/// mismatch or empty tracks.
double f0_rmse(const FrameTrack& ref, const FrameTrack& syn);

/// Maximum relative duration difference accepted by evaluate_pair.
inline constexpr double kMaxDurationMismatch = 0.10;

/// Analyze both waveforms with the same config, truncate to the shorter
/// frame count and compute both metrics. Throws InvalidArgument on a sample
/// rate mismatch and AlignmentFailure when durations differ by more than 10%.
EvaluationReport evaluate_pair(const Waveform& ref, const Waveform& syn,
                               const AnalysisConfig& config = {}, bool include_gain = false);

struct MetricSummary {
  std::size_t n = 0;
  double mean = 0.0;
  /// 1.96 * sample standard deviation / sqrt(n); 0 when n < 2.
  double ci95 = 0.0;
};

MetricSummary summarize(std::span<const double> values);

}  // namespace cwv
