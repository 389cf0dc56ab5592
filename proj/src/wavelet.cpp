#include "cwvocoder/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <istream>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "cwvocoder/error.hpp"
#include "cwvocoder/fft.hpp"

namespace cwv {

namespace {

// 2 / (sqrt(3) * pi^(1/4))
const double kMexicanHatNorm =
    2.0 / (std::sqrt(3.0) * std::pow(std::numbers::pi, 0.25));

// Kernels with at most this many taps are correlated directly.
constexpr std::size_t kDirectKernelTaps = 129;

std::size_t half_width(double scale, const MotherWavelet& wavelet) {
  return static_cast<std::size_t>(std::floor(wavelet.effective_support * scale));
}

std::vector<double> scaled_kernel(double scale, const MotherWavelet& wavelet) {
  const std::size_t h = half_width(scale, wavelet);
  std::vector<double> k(2 * h + 1);
  const double norm = 1.0 / std::sqrt(scale);
  for (std::size_t j = 0; j < k.size(); ++j) {
    const double t = (static_cast<double>(j) - static_cast<double>(h)) / scale;
    k[j] = norm * wavelet(t);
  }
  return k;
}

}  // namespace

double mexican_hat(double t) {
  if (!(std::abs(t) <= kMexicanHatSupport)) return 0.0;
  const double t2 = t * t;
  return kMexicanHatNorm * (1.0 - t2) * std::exp(-0.5 * t2);
}

double MotherWavelet::operator()(double t) const {
  if (!(std::abs(t) <= effective_support)) return 0.0;
  switch (kind) {
    case WaveletKind::MexicanHat:
      return mexican_hat(t);
  }
  return 0.0;
}

ScaleLadder make_scale_ladder(double base_scale, std::size_t num_scales) {
  if (!(base_scale > 0.0) || !std::isfinite(base_scale))
    throw InvalidArgument("make_scale_ladder: base_scale must be positive");
  if (num_scales < 1)
    throw InvalidArgument("make_scale_ladder: num_scales must be >= 1");
  ScaleLadder ladder;
  ladder.scales_.resize(num_scales);
  for (std::size_t i = 0; i < num_scales; ++i)
    ladder.scales_[i] = std::ldexp(base_scale, static_cast<int>(i));
  return ladder;
}

ScaleLadder ScaleLadder::scaled(double factor) const {
  return make_scale_ladder(base_scale() * factor, size());
}

std::size_t reflect_index(long long i, std::size_t n) {
  const long long period = 2 * static_cast<long long>(n);
  long long m = i % period;
  if (m < 0) m += period;
  if (m >= static_cast<long long>(n)) m = period - 1 - m;
  return static_cast<std::size_t>(m);
}

WaveletDecomposition cwt_forward(std::span<const double> signal,
                                 const ScaleLadder& ladder,
                                 const MotherWavelet& wavelet) {
  if (signal.empty()) throw InvalidArgument("cwt_forward: empty signal");
  if (ladder.size() == 0) throw InvalidArgument("cwt_forward: empty ladder");
  for (double v : signal)
    if (!std::isfinite(v))
      throw InvalidArgument("cwt_forward: non-finite sample");

  const std::size_t n = signal.size();
  WaveletDecomposition out;
  out.ladder = ladder;
  out.signal_length = n;
  double sum = 0.0;
  for (double v : signal) sum += v;
  out.signal_mean = sum / static_cast<double>(n);
  out.coefficients.assign(ladder.size() * n, 0.0);

  std::vector<double> centred(signal.begin(), signal.end());
  for (double& v : centred) v -= out.signal_mean;

  std::size_t max_h = 0;
  for (double a : ladder.scales()) max_h = std::max(max_h, half_width(a, wavelet));

  // Reflected extension shared by every row: ext[t] = f(t - max_h).
  std::vector<double> ext(n + 2 * max_h);
  for (std::size_t t = 0; t < ext.size(); ++t)
    ext[t] = centred[reflect_index(static_cast<long long>(t) -
                                       static_cast<long long>(max_h),
                                   n)];

  // FFT state is created lazily: short tracks never need it.
  std::size_t fft_size = 0;
  std::unique_ptr<RealFft> fft;
  std::vector<std::complex<double>> ext_spec, kern_spec;
  std::vector<double> buf;

  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const auto kernel = scaled_kernel(ladder[i], wavelet);
    const std::size_t h = kernel.size() / 2;
    auto row = out.row(i);
    if (kernel.size() <= kDirectKernelTaps) {
      for (std::size_t b = 0; b < n; ++b) {
        const double* base = ext.data() + max_h + b - h;
        double acc = 0.0;
        for (std::size_t j = 0; j < kernel.size(); ++j) acc += base[j] * kernel[j];
        row[b] = acc;
      }
      continue;
    }
    if (!fft) {
      fft_size = next_pow2(ext.size());
      fft = std::make_unique<RealFft>(fft_size);
      fft->forward(ext, ext_spec);
    }
    // Kernel centred on index 0 of the circular buffer; it is even, so
    // circular convolution equals the required correlation.
    buf.assign(fft_size, 0.0);
    buf[0] = kernel[h];
    for (std::size_t j = 1; j <= h; ++j) {
      buf[j] = kernel[h + j];
      buf[fft_size - j] = kernel[h - j];
    }
    fft->forward(buf, kern_spec);
    for (std::size_t k = 0; k < kern_spec.size(); ++k) kern_spec[k] *= ext_spec[k];
    fft->inverse(kern_spec, buf);
    const double scale = 1.0 / static_cast<double>(fft_size);
    for (std::size_t b = 0; b < n; ++b) row[b] = buf[max_h + b] * scale;
  }
  return out;
}

std::vector<double> cwt_inverse(const WaveletDecomposition& decomp,
                                double recon_constant) {
  if (!(recon_constant > 0.0) || !std::isfinite(recon_constant))
    throw InvalidArgument("cwt_inverse: recon_constant must be positive");
  const std::size_t n = decomp.signal_length;
  if (decomp.coefficients.size() != decomp.num_scales() * n)
    throw InvalidArgument("cwt_inverse: malformed decomposition");
  std::vector<double> acc(n, 0.0);
  for (std::size_t i = 0; i < decomp.num_scales(); ++i) {
    const double w = 1.0 / std::sqrt(decomp.ladder[i]);
    const auto row = decomp.row(i);
    for (std::size_t x = 0; x < n; ++x) acc[x] += w * row[x];
  }
  for (double& v : acc) v = decomp.signal_mean + v / recon_constant;
  return acc;
}

double reconstruction_gain(const ScaleLadder& ladder, double omega,
                           const MotherWavelet& wavelet) {
  double g = 0.0;
  for (double a : ladder.scales()) {
    const std::size_t h = half_width(a, wavelet);
    double row = wavelet(0.0);
    for (std::size_t j = 1; j <= h; ++j)
      row += 2.0 * wavelet(static_cast<double>(j) / a) *
             std::cos(omega * static_cast<double>(j));
    g += row / a;
  }
  return g;
}

double calibrate_reconstruction_constant(const ScaleLadder& ladder,
                                         const MotherWavelet& wavelet) {
  if (ladder.size() == 0)
    throw CalibrationFailure("calibration: empty ladder");
  // The Mexican hat's response a^{1/2} psi_hat(a w) peaks at a w = sqrt(2).
  const double centre_scale = std::sqrt(ladder.scales().front() * ladder.scales().back());
  const double centre = std::sqrt(2.0) / centre_scale;
  constexpr int kProbes = 64;
  double acc = 0.0;
  for (int q = 0; q < kProbes; ++q) {
    const double octave = (q + 0.5) / kProbes - 0.5;
    const double omega = std::min(centre * std::exp2(octave), std::numbers::pi);
    acc += reconstruction_gain(ladder, omega, wavelet);
  }
  const double c = acc / kProbes;
  if (!(c > 0.0) || !std::isfinite(c))
    throw CalibrationFailure("calibration: ladder has no positive response");
  return c;
}

ReconstructionReport reconstruction_error(std::span<const double> original,
                                          std::span<const double> reconstructed) {
  if (original.size() != reconstructed.size())
    throw InvalidArgument("reconstruction_error: length mismatch");
  ReconstructionReport r;
  if (original.empty()) return r;
  double err = 0.0, energy = 0.0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const double d = original[i] - reconstructed[i];
    err += d * d;
    energy += original[i] * original[i];
  }
  const double n = static_cast<double>(original.size());
  r.epsilon_rms = std::sqrt(err / n);
  r.epsilon_relative = energy > 0.0 ? r.epsilon_rms / std::sqrt(energy / n) : 0.0;
  return r;
}

void write_decomposition_csv(std::ostream& os,
                             const WaveletDecomposition& decomp,
                             bool magnitude) {
  char buf[32];
  os << "scale";
  for (std::size_t b = 0; b < decomp.signal_length; ++b) os << ',' << b;
  os << '\n';
  for (std::size_t i = 0; i < decomp.num_scales(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g", decomp.ladder[i]);
    os << buf;
    for (double v : decomp.row(i)) {
      std::snprintf(buf, sizeof buf, "%.9g", magnitude ? std::abs(v) : v);
      os << ',' << buf;
    }
    os << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.17g", decomp.signal_mean);
  os << "# signal_mean=" << buf << '\n';
}

WaveletDecomposition read_decomposition_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("scale", 0) != 0)
    throw FormatError("decomposition csv: missing header");
  const std::size_t n =
      static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  std::vector<double> scales, coeffs;
  double mean = 0.0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("signal_mean=");
      if (pos != std::string::npos) mean = std::stod(line.substr(pos + 12));
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(ss, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw FormatError("decomposition csv: bad value '" + cell + "'");
      }
    }
    if (values.size() != n + 1)
      throw FormatError("decomposition csv: ragged row");
    scales.push_back(values[0]);
    coeffs.insert(coeffs.end(), values.begin() + 1, values.end());
  }
  if (scales.empty()) throw FormatError("decomposition csv: no rows");
  WaveletDecomposition d;
  d.ladder = make_scale_ladder(scales.front(), scales.size());
  for (std::size_t i = 0; i < scales.size(); ++i)
    if (std::abs(d.ladder[i] - scales[i]) > 1e-6 * scales[i])
      throw FormatError("decomposition csv: scales are not octave spaced");
  d.signal_length = n;
  d.signal_mean = mean;
  d.coefficients = std::move(coeffs);
  return d;
}

}  // namespace cwv
