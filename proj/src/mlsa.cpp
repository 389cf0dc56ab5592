#include <algorithm>
#include <cmath>
#include <string>

#include "cwvocoder/error.hpp"
#include "cwvocoder/synthesis.hpp"

namespace cwv {

namespace {

// Pade approximant coefficients of exp for orders 4 and 5 (Imai's MLSA
// construction, as tabulated in SPTK).
constexpr double kPade4[] = {1.0, 4.999273e-1, 1.067005e-1, 1.170221e-2, 5.656279e-4};
constexpr double kPade5[] = {1.0,         4.999391e-1, 1.107098e-1,
                             1.369984e-2, 9.564853e-4, 3.041721e-5};

std::vector<double> frame_coefficients(const MelCepstrumTrack& melcep, double sign,
                                       const SynthesisConfig& config) {
  const std::size_t dims = melcep.order + 1;
  std::vector<double> b(melcep.num_frames() * dims);
  std::vector<double> c(dims);
  for (std::size_t t = 0; t < melcep.num_frames(); ++t) {
    const auto src = melcep.frame(t);
    for (std::size_t m = 0; m < dims; ++m) c[m] = sign * src[m];
    const auto bt = mc2b(c, config.alpha);
    for (std::size_t m = 1; m < dims; ++m) {
      if (!(std::abs(bt[m]) <= kPadeValidityBound))
        throw FilterInstability("MLSA filter: |b(" + std::to_string(m) + ")| = " +
                                    std::to_string(std::abs(bt[m])) +
                                    " exceeds the Pade validity bound at frame " +
                                    std::to_string(t),
                                t);
    }
    std::copy(bt.begin(), bt.end(), b.begin() + static_cast<long>(t * dims));
  }
  return b;
}

std::vector<double> run_filter(std::span<const double> input, const MelCepstrumTrack& melcep,
                               double sign, const SynthesisConfig& config) {
  validate(config);
  if (melcep.num_frames() == 0) throw InvalidArgument("MLSA filter: empty mel-cepstrum");
  if (std::abs(melcep.alpha - config.alpha) > 1e-12)
    throw InvalidArgument("MLSA filter: cepstrum alpha does not match the synthesis alpha");
  const std::size_t dims = melcep.order + 1;
  const auto b = frame_coefficients(melcep, sign, config);
  const std::size_t frames = melcep.num_frames();
  const double shift = melcep.grid.shift_samples();

  MlsaFilter filter(melcep.order, config.alpha, config.pade_order);
  std::vector<double> out(input.size());
  std::vector<double> bn(dims);
  for (std::size_t n = 0; n < input.size(); ++n) {
    const double pos = static_cast<double>(n) / shift;
    const auto t0 = static_cast<std::size_t>(pos);
    if (t0 + 1 >= frames) {
      std::copy_n(b.begin() + static_cast<long>((frames - 1) * dims), dims, bn.begin());
    } else {
      const double u = pos - static_cast<double>(t0);
      const double* lo = b.data() + t0 * dims;
      const double* hi = lo + dims;
      for (std::size_t m = 0; m < dims; ++m) bn[m] = lo[m] + u * (hi[m] - lo[m]);
    }
    out[n] = filter.process(input[n], bn);
  }
  return out;
}

}  // namespace

void validate(const SynthesisConfig& config) {
  if (config.pade_order != 4 && config.pade_order != 5)
    throw InvalidArgument("synthesis config: pade_order must be 4 or 5");
  if (config.lowpass_taps % 2 == 0 || config.lowpass_taps < 3)
    throw InvalidArgument("synthesis config: lowpass_taps must be odd and >= 3");
  if (!(std::abs(config.alpha) < 1.0))
    throw InvalidArgument("synthesis config: |alpha| must be < 1");
  if (!std::isfinite(config.noise_gain) || config.noise_gain < 0.0)
    throw InvalidArgument("synthesis config: noise_gain must be finite and >= 0");
}

std::vector<double> mc2b(std::span<const double> melcep, double alpha) {
  std::vector<double> b(melcep.begin(), melcep.end());
  if (b.empty()) return b;
  for (std::size_t m = b.size() - 1; m-- > 0;) b[m] = melcep[m] - alpha * b[m + 1];
  return b;
}

MlsaFilter::MlsaFilter(std::size_t order, double alpha, std::size_t pade_order)
    : order_(order),
      alpha_(alpha),
      pade_order_(pade_order),
      pade_(pade_order == 4 ? kPade4 : kPade5) {
  if (pade_order != 4 && pade_order != 5)
    throw InvalidArgument("MLSA filter: pade_order must be 4 or 5");
  if (order < 1) throw InvalidArgument("MLSA filter: order must be >= 1");
  reset();
}

void MlsaFilter::reset() {
  d1_.assign(2 * (pade_order_ + 1), 0.0);
  d2_.assign(pade_order_ * (order_ + 2) + pade_order_ + 1, 0.0);
}

double MlsaFilter::process(double x, std::span<const double> b) {
  x *= std::exp(b[0]);
  x = stage_one(x, b.size() > 1 ? b[1] : 0.0);
  return stage_two(x, b);
}

// exp(b(1) Phi_1(z)) with Phi_1 the first-order warped delay.
double MlsaFilter::stage_one(double x, double b1) {
  const double aa = 1.0 - alpha_ * alpha_;
  double* d = d1_.data();
  double* pt = d + pade_order_ + 1;
  double out = 0.0;
  for (std::size_t i = pade_order_; i >= 1; --i) {
    d[i] = aa * pt[i - 1] + alpha_ * d[i];
    pt[i] = d[i] * b1;
    const double v = pt[i] * pade_[i];
    x += (i & 1) ? v : -v;
    out += v;
  }
  pt[0] = x;
  return out + x;
}

double MlsaFilter::fir(double x, std::span<const double> b, double* d) {
  const double aa = 1.0 - alpha_ * alpha_;
  d[0] = x;
  d[1] = aa * d[0] + alpha_ * d[1];
  for (std::size_t i = 2; i <= order_; ++i) d[i] += alpha_ * (d[i + 1] - d[i - 1]);
  double y = 0.0;
  for (std::size_t i = 2; i <= order_ && i < b.size(); ++i) y += d[i] * b[i];
  for (std::size_t i = order_ + 1; i > 1; --i) d[i] = d[i - 1];
  return y;
}

// exp(sum_{m>=2} b(m) Phi_m(z)).
double MlsaFilter::stage_two(double x, std::span<const double> b) {
  double* pt = d2_.data() + pade_order_ * (order_ + 2);
  double out = 0.0;
  for (std::size_t i = pade_order_; i >= 1; --i) {
    pt[i] = fir(pt[i - 1], b, d2_.data() + (i - 1) * (order_ + 2));
    const double v = pt[i] * pade_[i];
    x += (i & 1) ? v : -v;
    out += v;
  }
  pt[0] = x;
  return out + x;
}

std::vector<double> mglsa_synthesis_filter(std::span<const double> excitation,
                                           const MelCepstrumTrack& melcep,
                                           const SynthesisConfig& config) {
  return run_filter(excitation, melcep, 1.0, config);
}

std::vector<double> mglsa_inverse_filter(std::span<const double> waveform,
                                         const MelCepstrumTrack& melcep,
                                         const SynthesisConfig& config) {
  return run_filter(waveform, melcep, -1.0, config);
}

}  // namespace cwv
