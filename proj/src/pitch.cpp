#include <algorithm>
#include <cmath>
#include <limits>

#include "cwvocoder/error.hpp"
#include "cwvocoder/features.hpp"
#include "cwvocoder/synthesis.hpp"

namespace cwv {

namespace {

constexpr double kVoicingThreshold = 0.5;
constexpr double kCandidateFloor = 0.2;
constexpr std::size_t kMaxCandidates = 8;
constexpr double kRelativeEnergyFloor = 1e-3;
constexpr double kOctaveJumpCost = 1.5;
constexpr double kLongLagBias = 0.1;
constexpr std::size_t kMinVoicedRun = 3;
// Run edges quieter than this fraction of the run's loudest frame are
// dropped; decaying formant ringing there masquerades as periodicity.
constexpr double kRunEdgeEnergy = 0.02;
// Correlation runs on a lowpassed copy: smooth pulses keep one-sample period
// jitter from splitting the peak at T while 2T still aligns.
constexpr double kPrefilterCutoff = 1000.0;
constexpr std::size_t kPrefilterTaps = 129;

std::vector<double> prefilter(const std::vector<double>& x, double sample_rate) {
  const auto h = design_lowpass(kPrefilterCutoff, kPrefilterTaps, sample_rate);
  const long long half = static_cast<long long>(h.size() / 2);
  const long long n = static_cast<long long>(x.size());
  std::vector<double> y(x.size(), 0.0);
  for (long long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (long long k = -half; k <= half; ++k) {
      const long long j = i - k;
      if (j >= 0 && j < n) acc += h[static_cast<std::size_t>(k + half)] * x[static_cast<std::size_t>(j)];
    }
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

struct Candidate {
  double lag;
  double score;
};

struct FrameCandidates {
  std::vector<Candidate> cands;
  double energy = 0.0;
};

class SignalView {
 public:
  explicit SignalView(const std::vector<double>& x) : x_(x), prefix_(x.size() + 1, 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) prefix_[i + 1] = prefix_[i] + x[i] * x[i];
  }
  double at(long long i) const {
    return (i < 0 || i >= static_cast<long long>(x_.size())) ? 0.0
                                                             : x_[static_cast<std::size_t>(i)];
  }
  double energy(long long begin, long long len) const {
    const long long n = static_cast<long long>(x_.size());
    const long long b = std::clamp(begin, 0LL, n);
    const long long e = std::clamp(begin + len, 0LL, n);
    return std::max(0.0, prefix_[static_cast<std::size_t>(e)] - prefix_[static_cast<std::size_t>(b)]);
  }

 private:
  const std::vector<double>& x_;
  std::vector<double> prefix_;
};

FrameCandidates analyse_frame(const SignalView& x, long long centre,
                              long long window, int min_lag, int max_lag) {
  FrameCandidates out;
  out.energy = x.energy(centre - window / 2, window);
  std::vector<double> r(static_cast<std::size_t>(max_lag + 2), 0.0);
  for (int lag = std::max(1, min_lag - 1); lag <= max_lag + 1; ++lag) {
    const long long start = centre - (window + lag) / 2;
    const double e1 = x.energy(start, window);
    const double e2 = x.energy(start + lag, window);
    if (e1 <= 0.0 || e2 <= 0.0) continue;
    double acc = 0.0;
    for (long long n = 0; n < window; ++n) acc += x.at(start + n) * x.at(start + n + lag);
    r[static_cast<std::size_t>(lag)] = acc / std::sqrt(e1 * e2);
  }
  for (int lag = min_lag; lag <= max_lag; ++lag) {
    const double r0 = r[static_cast<std::size_t>(lag)];
    const double rm = r[static_cast<std::size_t>(lag - 1)];
    const double rp = r[static_cast<std::size_t>(lag + 1)];
    if (r0 < kCandidateFloor || r0 < rm || r0 <= rp) continue;
    const double denom = rm - 2.0 * r0 + rp;
    double delta = 0.0, peak = r0;
    if (denom < 0.0) {
      delta = std::clamp(0.5 * (rm - rp) / denom, -0.5, 0.5);
      peak = r0 - 0.25 * (rm - rp) * delta;
    }
    out.cands.push_back({lag + delta, std::min(peak, 1.0)});
  }
  std::sort(out.cands.begin(), out.cands.end(),
            [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
  if (out.cands.size() > kMaxCandidates) out.cands.resize(kMaxCandidates);
  return out;
}

// Lowest-cost candidate sequence over frames [begin, end).
void viterbi(const std::vector<FrameCandidates>& frames, std::size_t begin,
             std::size_t end, double max_lag, std::vector<double>& lags) {
  const auto local = [&](const Candidate& c) {
    return (1.0 - c.score) + kLongLagBias * c.lag / max_lag;
  };
  std::vector<std::vector<double>> cost(end - begin);
  std::vector<std::vector<std::size_t>> back(end - begin);
  for (std::size_t t = begin; t < end; ++t) {
    const auto& cands = frames[t].cands;
    auto& c = cost[t - begin];
    auto& bp = back[t - begin];
    c.resize(cands.size());
    bp.assign(cands.size(), 0);
    for (std::size_t j = 0; j < cands.size(); ++j) {
      double best = t == begin ? 0.0 : std::numeric_limits<double>::infinity();
      if (t > begin) {
        const auto& prev = frames[t - 1].cands;
        const auto& pc = cost[t - 1 - begin];
        for (std::size_t i = 0; i < prev.size(); ++i) {
          const double v =
              pc[i] + kOctaveJumpCost * std::abs(std::log2(cands[j].lag / prev[i].lag));
          if (v < best) {
            best = v;
            bp[j] = i;
          }
        }
      }
      c[j] = best + local(cands[j]);
    }
  }
  const auto& last = cost.back();
  std::size_t state =
      static_cast<std::size_t>(std::min_element(last.begin(), last.end()) - last.begin());
  for (std::size_t t = end; t-- > begin;) {
    lags[t] = frames[t].cands[state].lag;
    state = back[t - begin][state];
  }
}

}  // namespace

FrameTrack track_contf0(const Waveform& wave, const FrameGrid& grid,
                        double f0_floor, double f0_ceil) {
  if (!(f0_floor > 0.0) || !(f0_floor < f0_ceil) || !(f0_ceil < wave.sample_rate / 2.0))
    throw InvalidArgument("track_contf0: need 0 < f0_floor < f0_ceil < Nyquist");
  FrameTrack track;
  track.kind = TrackKind::ContF0;
  track.grid = grid;
  track.values.assign(grid.num_frames, std::sqrt(f0_floor * f0_ceil));
  if (grid.num_frames == 0) return track;

  const int min_lag = static_cast<int>(std::floor(wave.sample_rate / f0_ceil));
  const int max_lag = static_cast<int>(std::ceil(wave.sample_rate / f0_floor));
  const long long window = static_cast<long long>(grid.window_samples());
  const auto filtered = prefilter(wave.samples, wave.sample_rate);
  const SignalView view(filtered);

  std::vector<FrameCandidates> frames(grid.num_frames);
  double max_energy = 0.0;
  for (std::size_t t = 0; t < grid.num_frames; ++t) {
    frames[t] = analyse_frame(view, grid.centre_sample(t), window, min_lag, max_lag);
    max_energy = std::max(max_energy, frames[t].energy);
  }

  std::vector<bool> voiced(grid.num_frames, false);
  for (std::size_t t = 0; t < grid.num_frames; ++t) {
    const auto& f = frames[t];
    voiced[t] = !f.cands.empty() && f.cands.front().score >= kVoicingThreshold &&
                f.energy > 0.0 && f.energy >= kRelativeEnergyFloor * max_energy;
  }

  std::vector<double> lags(grid.num_frames, 0.0);
  std::vector<bool> confident(grid.num_frames, false);
  for (std::size_t t = 0; t < grid.num_frames;) {
    if (!voiced[t]) {
      ++t;
      continue;
    }
    std::size_t end = t;
    while (end < grid.num_frames && voiced[end]) ++end;
    const std::size_t next = end;
    double peak = 0.0;
    for (std::size_t k = t; k < end; ++k) peak = std::max(peak, frames[k].energy);
    std::size_t begin = t;
    while (begin < end && frames[begin].energy < kRunEdgeEnergy * peak) ++begin;
    while (end > begin && frames[end - 1].energy < kRunEdgeEnergy * peak) --end;
    if (end - begin >= kMinVoicedRun) {
      viterbi(frames, begin, end, max_lag, lags);
      for (std::size_t k = begin; k < end; ++k) confident[k] = true;
    }
    t = next;
  }

  // Linear interpolation through low-confidence frames, constant at the ends.
  std::vector<std::size_t> anchors;
  for (std::size_t t = 0; t < grid.num_frames; ++t)
    if (confident[t]) anchors.push_back(t);
  if (anchors.empty()) return track;
  const auto hz = [&](std::size_t t) {
    return std::clamp(wave.sample_rate / lags[t], f0_floor, f0_ceil);
  };
  for (std::size_t t = 0; t <= anchors.front(); ++t) track.values[t] = hz(anchors.front());
  for (std::size_t t = anchors.back(); t < grid.num_frames; ++t) track.values[t] = hz(anchors.back());
  for (std::size_t k = 0; k + 1 < anchors.size(); ++k) {
    const std::size_t a = anchors[k], b = anchors[k + 1];
    const double fa = hz(a), fb = hz(b);
    for (std::size_t t = a; t <= b; ++t) {
      const double u = static_cast<double>(t - a) / static_cast<double>(b - a);
      track.values[t] = fa + u * (fb - fa);
    }
  }
  return track;
}

FrameTrack refine_contf0_cwt(const FrameTrack& raw, const ScaleLadder& ladder,
                             std::size_t drop_finest, double f0_floor) {
  if (raw.kind != TrackKind::ContF0)
    throw InvalidArgument("refine_contf0_cwt: expected a contF0 track");
  if (drop_finest >= ladder.size())
    throw InvalidArgument("refine_contf0_cwt: drop_finest must be < ladder size");
  if (raw.values.empty()) return raw;
  auto decomp = cwt_forward(raw.values, ladder);
  for (std::size_t i = 0; i < drop_finest; ++i)
    std::fill(decomp.row(i).begin(), decomp.row(i).end(), 0.0);
  FrameTrack out = raw;
  out.values = cwt_inverse(decomp, calibrate_reconstruction_constant(ladder));
  for (double& v : out.values) v = std::max(v, f0_floor);
  return out;
}

}  // namespace cwv
