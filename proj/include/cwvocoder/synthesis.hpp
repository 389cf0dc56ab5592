#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cwvocoder/features.hpp"

namespace cwv {

/// Pitch-synchronous residual prototype from PCA over energy-normalized
/// two-period residual windows.
struct ResidualPrototype {
  std::size_t frame_length = 512;
  std::vector<double> mean_frame;
  /// Unit-norm, mutually orthogonal principal components, strongest first.
  std::vector<std::vector<double>> components;

  std::size_t num_components() const noexcept { return components.size(); }
};

/// Prototype whose single component is a centred unit impulse (flat
/// spectrum). Used when no trained prototype is available.
ResidualPrototype impulse_prototype(std::size_t frame_length = 512);

struct ExcitationSignal {
  std::vector<double> samples;
  std::vector<double> voiced_part;
  std::vector<double> noise_part;
};

struct SynthesisConfig {
  std::uint64_t noise_seed = 1234;
  std::size_t pade_order = 5;
  std::size_t lowpass_taps = 129;
  double alpha = 0.42;
  double noise_gain = 1.0;
};

/// Throws InvalidArgument unless pade_order is 4 or 5, lowpass_taps is odd,
/// |alpha| < 1 and noise_gain is finite and >= 0.
void validate(const SynthesisConfig& config);

inline constexpr double kPadeValidityBound = 6.0;

// -- MLSA filter ----------------------------------------------------------------

/// Mel-cepstrum to MLSA filter coefficients: b(M) = c(M),
/// b(m) = c(m) - alpha b(m+1).
std::vector<double> mc2b(std::span<const double> melcep, double alpha);

/// Sample-by-sample MLSA filter realizing exp(sum_m c(m) z~^-m) through a
/// Pade approximant of exp, in the two-stage (b(1) / b(2..M)) cascade.
class MlsaFilter {
 public:
  MlsaFilter(std::size_t order, double alpha, std::size_t pade_order);

  /// Filter one sample with coefficients `b` (b(0) is the log gain).
  double process(double x, std::span<const double> b);
  void reset();

 private:
  double stage_one(double x, double b1);
  double stage_two(double x, std::span<const double> b);
  double fir(double x, std::span<const double> b, double* d);

  std::size_t order_;
  double alpha_;
  std::size_t pade_order_;
  const double* pade_;
  std::vector<double> d1_;
  std::vector<double> d2_;
};

/// Time-varying synthesis filter; coefficients are interpolated linearly
/// between frame centres. Throws FilterInstability naming the first frame
/// with |b(m)| > kPadeValidityBound for some m >= 1.
std::vector<double> mglsa_synthesis_filter(std::span<const double> excitation,
                                           const MelCepstrumTrack& melcep,
                                           const SynthesisConfig& config = {});

/// Inverse (whitening) filter: the synthesis filter driven with -c.
std::vector<double> mglsa_inverse_filter(std::span<const double> waveform,
                                         const MelCepstrumTrack& melcep,
                                         const SynthesisConfig& config = {});

// -- excitation -----------------------------------------------------------------

/// Linear-phase windowed-sinc (Hamming) lowpass with DC gain 1. A cutoff at or
/// above Nyquist yields a unit impulse, a cutoff <= 0 yields all zeros.
std::vector<double> design_lowpass(double cutoff_hz, std::size_t taps,
                                   double sample_rate);

/// Pitch marks (fractional sample positions) obtained by integrating contF0:
/// next = previous + sample_rate / F0(previous), starting at sample 0.
std::vector<double> pitch_marks(const FrameTrack& contf0, std::size_t num_samples,
                                double sample_rate);

/// Overlap-add of the first prototype component, resampled to the local
/// two-period length and Hann tapered, at every pitch mark. Each pulse
/// carries energy equal to its period so the excitation has unit power.
std::vector<double> generate_voiced_excitation(const FrameTrack& contf0,
                                               const ResidualPrototype& prototype,
                                               std::size_t num_samples,
                                               double sample_rate);

/// Frame-wise MVF split: the voiced input is lowpass filtered at MVF(frame),
/// seeded Gaussian noise matched to the local voiced RMS is highpass filtered
/// at the same cutoff, and the filtered frames are Hann windowed and
/// overlap-added at 50%.
ExcitationSignal mix_excitation_mvf(std::span<const double> voiced,
                                    const FrameTrack& mvf, const FrameGrid& grid,
                                    std::uint64_t seed, double noise_gain = 1.0,
                                    std::size_t lowpass_taps = 129);

// -- prototype training -----------------------------------------------------------

struct TrainingUtterance {
  Waveform waveform;
  UtteranceFeatures features;
};

struct PrototypeTraining {
  ResidualPrototype prototype;
  std::size_t frames_used = 0;
};

/// Frames with MVF below this are not treated as voiced during training.
inline constexpr double kTrainingMinMvf = 1500.0;

/// Throws TrainingFailure when the corpus is empty or yields no voiced
/// residual frames.
PrototypeTraining train_residual_prototype(std::span<const TrainingUtterance> corpus,
                                           std::size_t frame_length = 512,
                                           std::size_t num_components = 1,
                                           const SynthesisConfig& config = {});

/// Two-period residual windows around per-period residual peaks, each
/// resampled to `frame_length`, DC-removed and unit-norm. Exposed for tests.
std::vector<std::vector<double>> extract_residual_frames(std::span<const double> residual,
                                                         const UtteranceFeatures& features,
                                                         std::size_t frame_length);

// -- full chain ---------------------------------------------------------------------

struct SynthesisResult {
  Waveform waveform;
  ExcitationSignal excitation;
  /// Factor applied to bring the peak to 0.99; 1 when no clipping threatened.
  double normalization = 1.0;
};

SynthesisResult synthesize(const UtteranceFeatures& features,
                           const ResidualPrototype& prototype,
                           const SynthesisConfig& config = {});

/// Output length for a feature grid: num_frames * frame shift, in samples.
std::size_t synthesis_length(const FrameGrid& grid);

}  // namespace cwv
