#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cwvocoder/error.hpp"
#include "cwvocoder/synthesis.hpp"

namespace cwv {

namespace {

// F0 at a (fractional) sample position, linear between frame centres.
double f0_at(const FrameTrack& contf0, double sample, double shift) {
  const auto& v = contf0.values;
  const double pos = std::max(0.0, sample / shift);
  const auto t0 = static_cast<std::size_t>(pos);
  if (t0 + 1 >= v.size()) return v.back();
  const double u = pos - static_cast<double>(t0);
  return v[t0] + u * (v[t0 + 1] - v[t0]);
}

double interpolate(std::span<const double> x, double pos) {
  if (pos < 0.0 || pos > static_cast<double>(x.size() - 1)) return 0.0;
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= x.size()) return x[i];
  const double u = pos - static_cast<double>(i);
  return x[i] + u * (x[i + 1] - x[i]);
}

}  // namespace

ResidualPrototype impulse_prototype(std::size_t frame_length) {
  if (frame_length < 2) throw InvalidArgument("impulse_prototype: frame_length too short");
  ResidualPrototype p;
  p.frame_length = frame_length;
  p.mean_frame.assign(frame_length, 0.0);
  p.mean_frame[frame_length / 2] = 1.0;
  p.components.push_back(p.mean_frame);
  return p;
}

std::vector<double> design_lowpass(double cutoff_hz, std::size_t taps, double sample_rate) {
  if (taps % 2 == 0) throw InvalidArgument("design_lowpass: taps must be odd");
  std::vector<double> h(taps, 0.0);
  const std::size_t mid = taps / 2;
  const double fc = cutoff_hz / sample_rate;  // cycles per sample
  if (fc <= 0.0) return h;
  if (fc >= 0.5) {
    h[mid] = 1.0;
    return h;
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < taps; ++k) {
    const double n = static_cast<double>(k) - static_cast<double>(mid);
    const double sinc = n == 0.0 ? 2.0 * fc
                                 : std::sin(2.0 * std::numbers::pi * fc * n) / (std::numbers::pi * n);
    const double w =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / (taps - 1));
    h[k] = sinc * w;
    sum += h[k];
  }
  for (double& v : h) v /= sum;
  return h;
}

std::vector<double> pitch_marks(const FrameTrack& contf0, std::size_t num_samples,
                                double sample_rate) {
  std::vector<double> marks;
  if (num_samples == 0 || contf0.values.empty()) return marks;
  for (double f : contf0.values)
    if (!(f > 0.0)) throw InvalidArgument("pitch_marks: contF0 must be positive");
  const double shift = contf0.grid.shift_samples();
  for (double m = 0.0; m < static_cast<double>(num_samples);
       m += sample_rate / f0_at(contf0, m, shift))
    marks.push_back(m);
  return marks;
}

std::vector<double> generate_voiced_excitation(const FrameTrack& contf0,
                                               const ResidualPrototype& prototype,
                                               std::size_t num_samples,
                                               double sample_rate) {
  std::vector<double> out(num_samples, 0.0);
  if (num_samples == 0) return out;
  if (prototype.components.empty())
    throw InvalidArgument("generate_voiced_excitation: prototype has no components");
  const std::span<const double> shape = prototype.components.front();
  const double len = static_cast<double>(shape.size());
  const double shift = contf0.grid.shift_samples();
  std::vector<double> pulse;

  for (double mark : pitch_marks(contf0, num_samples, sample_rate)) {
    const double period = sample_rate / f0_at(contf0, mark, shift);
    const auto first = static_cast<long long>(std::ceil(mark - period));
    const auto last = static_cast<long long>(std::floor(mark + period));
    pulse.assign(static_cast<std::size_t>(last - first + 1), 0.0);
    double energy = 0.0;
    for (long long n = first; n <= last; ++n) {
      const double u = (static_cast<double>(n) - (mark - period)) / (2.0 * period);
      if (u <= 0.0 || u >= 1.0) continue;
      const double taper = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * u);
      const double v = taper * interpolate(shape, u * len - 0.5);
      pulse[static_cast<std::size_t>(n - first)] = v;
      energy += v * v;
    }
    if (energy <= 0.0) continue;
    const double gain = std::sqrt(period / energy);
    for (long long n = std::max(first, 0LL);
         n <= last && n < static_cast<long long>(num_samples); ++n)
      out[static_cast<std::size_t>(n)] += gain * pulse[static_cast<std::size_t>(n - first)];
  }
  return out;
}

ExcitationSignal mix_excitation_mvf(std::span<const double> voiced, const FrameTrack& mvf,
                                    const FrameGrid& grid, std::uint64_t seed,
                                    double noise_gain, std::size_t lowpass_taps) {
  if (mvf.size() != grid.num_frames)
    throw InvalidArgument("mix_excitation_mvf: MVF track is not aligned to the grid");
  if (lowpass_taps % 2 == 0) throw InvalidArgument("mix_excitation_mvf: taps must be odd");
  const std::size_t n = voiced.size();
  const double shift = grid.shift_samples();
  if (static_cast<double>(n) > static_cast<double>(grid.num_frames + 1) * shift + 1.0)
    throw InvalidArgument("mix_excitation_mvf: voiced signal outlasts the frame grid");

  ExcitationSignal ex;
  ex.voiced_part.assign(n, 0.0);
  ex.noise_part.assign(n, 0.0);
  if (n == 0) return ex;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> noise(n);
  for (double& v : noise) v = gauss(rng);

  const long long hop = std::llround(shift);
  const long long block = 2 * hop;
  const long long rms_half = std::max<long long>(hop, static_cast<long long>(grid.window_samples() / 2));
  const long long half_taps = static_cast<long long>(lowpass_taps / 2);
  const auto at = [](std::span<const double> x, long long i) {
    return (i < 0 || i >= static_cast<long long>(x.size())) ? 0.0 : x[static_cast<std::size_t>(i)];
  };

  // One block past the last frame (repeating its MVF) completes the
  // overlap-add over the tail.
  for (std::size_t t = 0; t <= grid.num_frames; ++t) {
    const long long centre = grid.centre_sample(t);
    const long long begin = centre - hop;
    if (begin >= static_cast<long long>(n)) break;
    const double cutoff = mvf.values[std::min(t, grid.num_frames - 1)];
    const auto h = design_lowpass(cutoff, lowpass_taps, grid.sample_rate);

    double energy = 0.0;
    for (long long i = centre - rms_half; i < centre + rms_half; ++i) energy += at(voiced, i) * at(voiced, i);
    const double noise_scale = noise_gain * std::sqrt(energy / static_cast<double>(2 * rms_half));

    for (long long i = std::max(begin, 0LL); i < std::min(begin + block, static_cast<long long>(n)); ++i) {
      // Periodic Hann over the block: overlapping halves sum to one.
      const double w = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i - begin) /
                                            static_cast<double>(hop));
      double lv = 0.0, ln = 0.0;
      for (long long k = -half_taps; k <= half_taps; ++k) {
        const double hk = h[static_cast<std::size_t>(k + half_taps)];
        if (hk == 0.0) continue;
        lv += hk * at(voiced, i - k);
        ln += hk * at(noise, i - k);
      }
      const auto idx = static_cast<std::size_t>(i);
      ex.voiced_part[idx] += w * lv;
      ex.noise_part[idx] += w * noise_scale * (noise[idx] - ln);
    }
  }
  ex.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) ex.samples[i] = ex.voiced_part[i] + ex.noise_part[i];
  return ex;
}

}  // namespace cwv
