#include <cmath>
#include <string>

#include "cwvocoder/error.hpp"
#include "cwvocoder/features.hpp"

namespace cwv {

void validate(const Waveform& wave) {
  if (wave.samples.empty()) throw InvalidArgument("waveform: no samples");
  if (!(wave.sample_rate > 0.0))
    throw InvalidArgument("waveform: sample rate must be positive");
  for (double s : wave.samples)
    if (!std::isfinite(s) || std::abs(s) > 1.0)
      throw InvalidArgument("waveform: samples must be finite and within [-1, 1]");
}

std::size_t FrameGrid::window_samples() const {
  return static_cast<std::size_t>(std::llround(window_length * sample_rate));
}

long long FrameGrid::centre_sample(std::size_t frame) const {
  return std::llround(static_cast<double>(frame) * frame_shift * sample_rate);
}

std::size_t frames_for_samples(std::size_t num_samples, double sample_rate,
                               double frame_shift) {
  const double shift = frame_shift * sample_rate;
  return static_cast<std::size_t>(
             std::floor(static_cast<double>(num_samples) / shift + 1e-9)) +
         1;
}

FrameGrid make_frame_grid(const Waveform& wave, double frame_shift,
                          double window_length) {
  if (!(frame_shift > 0.0) || !(frame_shift < window_length))
    throw InvalidArgument("frame grid: need 0 < frame_shift < window_length");
  if (!(window_length <= wave.duration() + 1e-12))
    throw InvalidArgument("frame grid: window (" + std::to_string(window_length) +
                          " s) exceeds audio duration (" +
                          std::to_string(wave.duration()) + " s)");
  FrameGrid g;
  g.frame_shift = frame_shift;
  g.window_length = window_length;
  g.sample_rate = wave.sample_rate;
  g.num_frames = frames_for_samples(wave.samples.size(), wave.sample_rate, frame_shift);
  return g;
}

void validate(const FrameTrack& track) {
  if (track.values.size() != track.grid.num_frames)
    throw InvalidArgument("frame track: length does not match grid");
  const double nyquist = track.grid.sample_rate / 2.0;
  for (double v : track.values) {
    if (!std::isfinite(v)) throw InvalidArgument("frame track: non-finite value");
    if (track.kind == TrackKind::ContF0 && !(v > 0.0))
      throw InvalidArgument("contF0 track: values must be strictly positive");
    if (track.kind == TrackKind::Mvf && (v < 0.0 || v > nyquist))
      throw InvalidArgument("MVF track: values must lie in [0, Nyquist]");
  }
}

void validate(const UtteranceFeatures& f) {
  validate(f.contf0);
  validate(f.mvf);
  if (f.contf0.kind != TrackKind::ContF0 || f.mvf.kind != TrackKind::Mvf)
    throw InvalidArgument("features: track kinds are swapped");
  if (!(f.contf0.grid == f.mvf.grid) || !(f.contf0.grid == f.melcep.grid))
    throw InvalidArgument("features: components do not share one frame grid");
  if (f.melcep.coefficients.size() != f.contf0.size() * (f.melcep.order + 1))
    throw InvalidArgument("features: mel-cepstrum frame count mismatch");
  for (double c : f.melcep.coefficients)
    if (!std::isfinite(c)) throw InvalidArgument("features: non-finite cepstrum");
}

}  // namespace cwv
