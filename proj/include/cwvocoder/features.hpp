#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cwvocoder/wavelet.hpp"

namespace cwv {

inline constexpr double kCanonicalSampleRate = 16000.0;

/// Mono PCM signal, samples in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  double sample_rate = kCanonicalSampleRate;

  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

/// Throws InvalidArgument unless the waveform is non-empty, finite and within
/// [-1, 1].
void validate(const Waveform& wave);

/// Frame t is centred on sample round(t * frame_shift * sample_rate).
struct FrameGrid {
  double frame_shift = 0.005;
  double window_length = 0.025;
  std::size_t num_frames = 0;
  double sample_rate = kCanonicalSampleRate;

  double shift_samples() const { return frame_shift * sample_rate; }
  std::size_t window_samples() const;
  long long centre_sample(std::size_t frame) const;

  friend bool operator==(const FrameGrid&, const FrameGrid&) = default;
};

FrameGrid make_frame_grid(const Waveform& wave, double frame_shift = 0.005,
                          double window_length = 0.025);

/// Number of frames for `num_samples` at the given rate and shift.
std::size_t frames_for_samples(std::size_t num_samples, double sample_rate,
                               double frame_shift);

enum class TrackKind { ContF0, Mvf };

/// One value (Hz) per frame.
struct FrameTrack {
  std::vector<double> values;
  TrackKind kind = TrackKind::ContF0;
  FrameGrid grid;

  std::size_t size() const noexcept { return values.size(); }
};

/// Throws InvalidArgument when the track breaks its kind's invariants:
/// contF0 strictly positive, MVF in [0, Nyquist], length == grid.num_frames.
void validate(const FrameTrack& track);

/// Per-frame mel-cepstra c(0)..c(order), frame-major. c(0) is the natural-log
/// gain; the transfer function is H(z) = exp(sum_m c(m) z~^-m) with the
/// all-pass warped delay z~^-1 = (z^-1 - alpha) / (1 - alpha z^-1).
struct MelCepstrumTrack {
  std::size_t order = 24;
  double alpha = 0.42;
  FrameGrid grid;
  std::vector<double> coefficients;

  std::size_t num_frames() const noexcept {
    return coefficients.size() / (order + 1);
  }
  std::span<double> frame(std::size_t t) {
    return {coefficients.data() + t * (order + 1), order + 1};
  }
  std::span<const double> frame(std::size_t t) const {
    return {coefficients.data() + t * (order + 1), order + 1};
  }
};

/// Per-frame log-magnitude spectra in dB (20 log10 |H|), fft_size/2+1 bins.
struct SpectralEnvelope {
  std::size_t fft_size = 1024;
  FrameGrid grid;
  std::vector<double> db;

  std::size_t num_bins() const noexcept { return fft_size / 2 + 1; }
  std::size_t num_frames() const noexcept { return db.size() / num_bins(); }
  std::span<double> frame(std::size_t t) {
    return {db.data() + t * num_bins(), num_bins()};
  }
  std::span<const double> frame(std::size_t t) const {
    return {db.data() + t * num_bins(), num_bins()};
  }
};

struct UtteranceFeatures {
  FrameTrack contf0;
  FrameTrack mvf;
  MelCepstrumTrack melcep;
  double source_sample_rate = kCanonicalSampleRate;

  const FrameGrid& grid() const { return contf0.grid; }
  std::size_t num_frames() const { return contf0.size(); }
  /// Advertised per-frame parameter count: cepstra c(1)..c(order), MVF and
  /// contF0. The gain c(0) is carried but not counted.
  std::size_t advertised_dimension() const { return melcep.order + 2; }
  /// Values stored per frame in the feature file: contF0, MVF, c(0)..c(order).
  std::size_t stored_dimension() const { return melcep.order + 3; }
};

/// Throws InvalidArgument if the three components do not share one grid or
/// a track violates its invariants.
void validate(const UtteranceFeatures& features);

struct AnalysisConfig {
  double frame_shift = 0.005;
  double window_length = 0.025;
  double f0_floor = 50.0;
  double f0_ceil = 400.0;
  std::size_t order = 24;
  double alpha = 0.42;
  std::size_t fft_size = 1024;
  double log_floor_db = -100.0;
  /// CWT refinement of the raw contF0 track; disabled when refine_f0 is false.
  bool refine_f0 = true;
  double base_scale = 2.0;
  std::size_t num_scales = kDefaultNumScales;
  std::size_t drop_finest = 1;
};

// -- pitch ------------------------------------------------------------------

/// Continuous F0 track: normalized cross-correlation candidates per frame, a
/// Viterbi path with an octave-jump penalty over confidently periodic
/// stretches, then linear interpolation through the remaining frames. Every
/// frame gets a positive value; with no periodic evidence at all the track is
/// the constant sqrt(f0_floor * f0_ceil).
FrameTrack track_contf0(const Waveform& wave, const FrameGrid& grid,
                        double f0_floor = 50.0, double f0_ceil = 400.0);

/// Decompose the raw track, zero the `drop_finest` finest scales, reconstruct,
/// and clamp to >= f0_floor.
FrameTrack refine_contf0_cwt(const FrameTrack& raw, const ScaleLadder& ladder,
                             std::size_t drop_finest = 1,
                             double f0_floor = 50.0);

// -- maximum voiced frequency -----------------------------------------------

inline constexpr double kMvfBandWidth = 500.0;
inline constexpr double kMvfThreshold = 0.5;

/// Per-band harmonicity in [-1, 1] for one frame: the band-limited normalized
/// correlation between the frame and the frame one pitch period later,
/// evaluated at a locally refined period. Exposed for tests.
std::vector<double> band_harmonicity(const Waveform& wave, long long centre,
                                     double period_samples,
                                     std::size_t window_samples,
                                     double band_width = kMvfBandWidth);

FrameTrack estimate_mvf(const Waveform& wave, const FrameGrid& grid,
                        const FrameTrack& contf0);

// -- spectral envelope and mel-cepstrum ---------------------------------------

SpectralEnvelope extract_spectral_envelope(const Waveform& wave,
                                           const FrameGrid& grid,
                                           const FrameTrack& contf0,
                                           std::size_t fft_size = 1024,
                                           double log_floor_db = -100.0);

/// Warped frequency beta(w) of the first-order all-pass map.
double warp_frequency(double omega, double alpha);

/// Mel-cepstrum of one natural-log amplitude spectrum given on the
/// fft_size/2+1 linear-frequency bins (orthogonal projection onto the warped
/// cosine basis).
std::vector<double> log_amplitude_to_melcep(std::span<const double> log_amp,
                                            std::size_t order, double alpha);

/// Natural-log amplitude on `num_bins` linear-frequency bins spanning [0, pi].
std::vector<double> melcep_to_log_amplitude(std::span<const double> melcep,
                                            double alpha, std::size_t num_bins);

MelCepstrumTrack envelope_to_melcepstrum(const SpectralEnvelope& envelope,
                                         std::size_t order = 24,
                                         double alpha = 0.42);

SpectralEnvelope melcepstrum_to_envelope(const MelCepstrumTrack& melcep,
                                         std::size_t fft_size = 1024);

// -- composition ---------------------------------------------------------------

UtteranceFeatures analyze_utterance(const Waveform& wave,
                                    const AnalysisConfig& config = {});

}  // namespace cwv
