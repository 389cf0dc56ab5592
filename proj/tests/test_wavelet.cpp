#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cwvocoder/error.hpp"
#include "cwvocoder/wavelet.hpp"
#include "support.hpp"

using namespace cwv;

namespace {

// Direct double-loop evaluation of the discretized transform with its own
// reflection, independent of the library's padding and FFT paths.
std::vector<double> oracle_cwt(const std::vector<double>& s, const ScaleLadder& ladder) {
  const auto n = static_cast<long long>(s.size());
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(n);
  const auto value = [&](long long x) {
    long long p = ((x % (2 * n)) + 2 * n) % (2 * n);
    if (p >= n) p = 2 * n - 1 - p;
    return s[static_cast<std::size_t>(p)] - mean;
  };
  std::vector<double> out;
  for (double a : ladder.scales()) {
    const auto reach = static_cast<long long>(std::floor(kMexicanHatSupport * a));
    for (long long b = 0; b < n; ++b) {
      long double acc = 0.0L;
      for (long long x = b - reach; x <= b + reach; ++x) {
        const double t = static_cast<double>(x - b) / a;
        const double psi = std::abs(t) > kMexicanHatSupport
                               ? 0.0
                               : 2.0 / (std::sqrt(3.0) * std::pow(std::numbers::pi, 0.25)) *
                                     (1.0 - t * t) * std::exp(-t * t / 2.0);
        acc += static_cast<long double>(value(x)) * psi;
      }
      out.push_back(static_cast<double>(acc / std::sqrt(a)));
    }
  }
  return out;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(b[i]));
    diff = std::max(diff, std::abs(a[i] - b[i]));
  }
  return scale > 0.0 ? diff / scale : diff;
}

std::vector<double> contour(std::size_t n, double (*f)(double)) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = f(static_cast<double>(i));
  return x;
}

}  // namespace

TEST_CASE("mexican hat closed form and symmetry") {
  CHECK(mexican_hat(0.0) == doctest::Approx(0.8673250705840776).epsilon(1e-14));
  CHECK(mexican_hat(1.0) == 0.0);
  CHECK(mexican_hat(-1.0) == 0.0);
  CHECK(mexican_hat(-0.5) == mexican_hat(0.5));
  CHECK(mexican_hat(6.01) == 0.0);
  CHECK(std::abs(mexican_hat(5.0)) < 1e-4);
  CHECK(std::abs(mexican_hat(6.0)) < 1e-6);

  // Zero mean and unit energy over the support, midpoint rule.
  const int n = 200000;
  const double h = 12.0 / n;
  double integral = 0.0, energy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = -6.0 + (i + 0.5) * h;
    integral += mexican_hat(t) * h;
    energy += mexican_hat(t) * mexican_hat(t) * h;
  }
  CHECK(std::abs(integral) < 1e-6);
  CHECK(energy == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("scale ladder") {
  const auto l = make_scale_ladder(1.0, 10);
  REQUIRE(l.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(l[i] == std::ldexp(1.0, static_cast<int>(i)));
  const auto s = make_scale_ladder(2.5, 3);
  CHECK(s.scales() == std::vector<double>{2.5, 5.0, 10.0});
  CHECK_THROWS_AS(make_scale_ladder(0.0), InvalidArgument);
  CHECK_THROWS_AS(make_scale_ladder(-1.0), InvalidArgument);
  CHECK_THROWS_AS(make_scale_ladder(1.0, 0), InvalidArgument);
  CHECK(make_scale_ladder(3.0).scaled(2.0) == make_scale_ladder(6.0));
}

TEST_CASE("forward transform matches the direct oracle") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> len(1, 256);
  for (int trial = 0; trial < 10; ++trial) {
    const auto n = static_cast<std::size_t>(len(rng));
    const auto s = testing::white_noise(n, 100 + trial, 1.0);
    const auto ladder = make_scale_ladder(trial % 2 ? 2.0 : 1.0, trial % 3 ? 10 : 6);
    const auto w = cwt_forward(s, ladder);
    REQUIRE(w.coefficients.size() == ladder.size() * n);
    CHECK(max_rel_diff(w.coefficients, oracle_cwt(s, ladder)) < 1e-9);
  }
}

TEST_CASE("forward transform edge cases") {
  const auto ladder = make_scale_ladder(2.0);
  CHECK_THROWS_AS(cwt_forward(std::vector<double>{}, ladder), InvalidArgument);
  CHECK_THROWS_AS(cwt_forward(std::vector<double>{1.0, NAN}, ladder), InvalidArgument);

  const auto c = cwt_forward(std::vector<double>(100, 3.25), ladder);
  CHECK(c.signal_mean == 3.25);
  for (double v : c.coefficients) CHECK(v == 0.0);
  const auto back = cwt_inverse(c, 1.0);
  for (double v : back) CHECK(v == 3.25);
}

TEST_CASE("impulse response rows follow the scaled wavelet") {
  const std::size_t n = 400, n0 = 200;
  std::vector<double> s(n, 0.0);
  s[n0] = 1.0;
  const auto ladder = make_scale_ladder(2.0, 4);
  const auto w = cwt_forward(s, ladder);
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const double a = ladder[i];
    // Mean removal subtracts (1/n) from every sample: its correlation with
    // the wavelet is the truncated wavelet sum, constant away from the edges.
    double bias = 0.0;
    for (long long j = -static_cast<long long>(kMexicanHatSupport * a); j <= static_cast<long long>(kMexicanHatSupport * a); ++j)
      bias += mexican_hat(static_cast<double>(j) / a);
    bias /= static_cast<double>(n) * std::sqrt(a);
    for (std::size_t b = 150; b < 250; ++b) {
      const double expected = mexican_hat((static_cast<double>(n0) - static_cast<double>(b)) / a) /
                                  std::sqrt(a) -
                              bias;
      CHECK(w.at(i, b) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("linearity and interior shift covariance") {
  const auto ladder = make_scale_ladder(1.0, 6);
  auto s1 = testing::white_noise(300, 1, 1.0);
  auto s2 = testing::white_noise(300, 2, 1.0);
  for (auto* s : {&s1, &s2}) {
    double m = 0.0;
    for (double v : *s) m += v;
    for (double& v : *s) v -= m / 300.0;
  }
  std::vector<double> mix(300);
  for (std::size_t i = 0; i < 300; ++i) mix[i] = 2.5 * s1[i] - 0.75 * s2[i];
  const auto w1 = cwt_forward(s1, ladder), w2 = cwt_forward(s2, ladder);
  const auto wm = cwt_forward(mix, ladder);
  std::vector<double> expected(wm.coefficients.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    expected[i] = 2.5 * w1.coefficients[i] - 0.75 * w2.coefficients[i];
  CHECK(max_rel_diff(wm.coefficients, expected) < 1e-9);

  // b is a shifted by k. Their means differ, which offsets every interior
  // coefficient by (mean_a - mean_b) * sum_j psi(j / a) / sqrt(a).
  const std::size_t n = 1024, k = 13;
  const auto big = testing::white_noise(n + k, 3, 1.0);
  const std::vector<double> a(big.begin(), big.begin() + n), b(big.begin() + k, big.end());
  const auto wa = cwt_forward(a, ladder), wb = cwt_forward(b, ladder);
  const std::size_t margin = 6 * 32 + 1;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const double sc = ladder[i];
    double kernel_sum = 0.0;
    for (long long j = -static_cast<long long>(kMexicanHatSupport * sc); j <= static_cast<long long>(kMexicanHatSupport * sc); ++j)
      kernel_sum += mexican_hat(static_cast<double>(j) / sc);
    const double offset = (wa.signal_mean - wb.signal_mean) * kernel_sum / std::sqrt(sc);
    double worst = 0.0, scale = 0.0;
    for (std::size_t col = margin; col + margin + k < n; ++col) {
      worst = std::max(worst, std::abs(wb.at(i, col) - wa.at(i, col + k) - offset));
      scale = std::max(scale, std::abs(wa.at(i, col + k)));
    }
    CHECK(worst <= 1e-9 * scale);
  }
}

TEST_CASE("round trip of smooth contours") {
  const auto ladder = make_scale_ladder(2.0);
  const double c = calibrate_reconstruction_constant(ladder);
  const std::vector<std::vector<double>> contours = {
      std::vector<double>(512, 120.0),
      contour(512, [](double i) { return 100.0 + 20.0 * std::sin(2.0 * std::numbers::pi * i / 64.0); }),
      contour(512, [](double i) { return i < 200 ? 100.0 + 0.2 * i : 140.0 - 0.1 * (i - 200.0); }),
  };
  for (const auto& s : contours) {
    const auto r = reconstruction_error(s, cwt_inverse(cwt_forward(s, ladder), c));
    CHECK(r.epsilon_relative <= 0.05);
  }
}

TEST_CASE("calibration constant") {
  const auto ladder = make_scale_ladder(2.0);
  const double c = calibrate_reconstruction_constant(ladder);
  CHECK(c > 0.0);
  CHECK(c == calibrate_reconstruction_constant(ladder));
  const double c2 = calibrate_reconstruction_constant(ladder.scaled(2.0));
  CHECK(std::abs(c2 / c - 1.0) < 0.01);
  const double single = calibrate_reconstruction_constant(make_scale_ladder(4.0, 1));
  CHECK(std::isfinite(single));
  CHECK(single > 0.0);
  CHECK_THROWS_AS(cwt_inverse(cwt_forward(std::vector<double>{1, 2, 3}, ladder), 0.0),
                  InvalidArgument);
}

TEST_CASE("denser ladder does not increase reconstruction error") {
  // Band-limited to the ladder's flat interior (w in [0.012, 0.035]); the
  // finest and coarsest scales roll the summed gain off outside it.
  const std::size_t n = 8192;
  const auto s = contour(n, [](double i) {
    return 100.0 + 15.0 * std::sin(2.0 * std::numbers::pi * i / 300.0) + 5.0 * std::cos(i / 70.0) +
           3.0 * std::sin(i / 40.0);
  });
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(n);

  // Scale-sum reconstruction over arbitrary scales, both ladders calibrated
  // by the log-frequency average of their summed gain over the signal band.
  const auto gain = [](const std::vector<double>& scales, double omega) {
    double g = 0.0;
    for (double a : scales) g += reconstruction_gain(make_scale_ladder(a, 1), omega);
    return g;
  };
  const std::size_t margin = 1536;  // effective support of the coarsest scale
  const auto reconstruct = [&](const std::vector<double>& scales) {
    double c = 0.0;
    for (int p = 0; p < 64; ++p)
      c += gain(scales, 0.012 * std::pow(0.035 / 0.012, (p + 0.5) / 64.0));
    c /= 64.0;
    std::vector<double> out(n, 0.0);
    for (double a : scales) {
      const auto w = cwt_forward(s, make_scale_ladder(a, 1));
      for (std::size_t x = 0; x < n; ++x) out[x] += w.at(0, x) / std::sqrt(a);
    }
    double err = 0.0;
    for (std::size_t x = margin; x + margin < n; ++x) {
      const double d = mean + out[x] / c - s[x];
      err += d * d;
    }
    return std::sqrt(err / static_cast<double>(n - 2 * margin));
  };
  std::vector<double> octave, half;
  for (int i = 0; i < 8; ++i) octave.push_back(2.0 * std::ldexp(1.0, i));
  for (int i = 0; i < 15; ++i) half.push_back(2.0 * std::pow(2.0, 0.5 * i));
  const double e_octave = reconstruct(octave);
  const double e_half = reconstruct(half);
  MESSAGE("interior error: octave " << e_octave << ", half octave " << e_half);
  CHECK(e_half <= e_octave);
}

TEST_CASE("reconstruction error report") {
  const auto r = reconstruction_error(std::vector<double>{3, 4}, std::vector<double>{0, 0});
  CHECK(r.epsilon_rms == doctest::Approx(std::sqrt(12.5)));
  CHECK(r.epsilon_relative == doctest::Approx(1.0));
  const auto z = reconstruction_error(std::vector<double>{0, 0}, std::vector<double>{1, 0});
  CHECK(z.epsilon_relative == 0.0);
  CHECK(z.epsilon_rms > 0.0);
  const auto same = reconstruction_error(std::vector<double>{1, 2}, std::vector<double>{1, 2});
  CHECK(same.epsilon_rms == 0.0);
  CHECK_THROWS_AS(reconstruction_error(std::vector<double>{1}, std::vector<double>{1, 2}),
                  InvalidArgument);
}

TEST_CASE("sinusoid argmax row is monotone in the period") {
  const auto ladder = make_scale_ladder(1.0, 10);
  std::size_t prev = 0;
  for (double period = 4.0; period <= 1024.0; period *= 1.25) {
    std::vector<double> s(4096);
    for (std::size_t i = 0; i < s.size(); ++i)
      s[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / period);
    const auto w = cwt_forward(s, ladder);
    std::size_t best = 0;
    double best_e = -1.0;
    for (std::size_t r = 0; r < ladder.size(); ++r) {
      double e = 0.0;
      for (double v : w.row(r)) e += v * v;
      if (e > best_e) best_e = e, best = r;
    }
    CHECK(best >= prev);
    prev = best;
    // Peak response of a^{-1/2} psi(t/a) is at a = sqrt(5/2) P / (2 pi):
    // the winning row is within one octave of it.
    const double ideal = std::sqrt(2.5) * period / (2.0 * std::numbers::pi);
    CHECK(std::abs(std::log2(ladder[best] / ideal)) <= 1.0);
  }
}

TEST_CASE("reflection index") {
  CHECK(reflect_index(-1, 5) == 0);
  CHECK(reflect_index(-2, 5) == 1);
  CHECK(reflect_index(5, 5) == 4);
  CHECK(reflect_index(6, 5) == 3);
  CHECK(reflect_index(10, 5) == 0);
  CHECK(reflect_index(0, 1) == 0);
  CHECK(reflect_index(-7, 1) == 0);
}

TEST_CASE("CSV export round trip") {
  const auto ladder = make_scale_ladder(2.0, 3);
  const auto w = cwt_forward(testing::white_noise(7, 5, 1.0), ladder);
  std::stringstream ss;
  write_decomposition_csv(ss, w);
  const std::string text = ss.str();
  CHECK(text.rfind("scale,0,1,2,3,4,5,6\n", 0) == 0);
  const auto back = read_decomposition_csv(ss);
  CHECK(back.ladder == ladder);
  REQUIRE(back.coefficients.size() == w.coefficients.size());
  for (std::size_t i = 0; i < w.coefficients.size(); ++i)
    CHECK(back.coefficients[i] == doctest::Approx(w.coefficients[i]).epsilon(1e-8));
  CHECK(back.signal_mean == w.signal_mean);

  std::stringstream mag;
  write_decomposition_csv(mag, w, true);
  CHECK(mag.str().find(",-") == std::string::npos);

  std::stringstream bad("scale,0\n2,abc\n");
  CHECK_THROWS_AS(read_decomposition_csv(bad), FormatError);
}
