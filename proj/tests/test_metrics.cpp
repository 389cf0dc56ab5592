#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cwvocoder/error.hpp"
#include "cwvocoder/metrics.hpp"
#include "support.hpp"

using namespace cwv;

namespace {

MelCepstrumTrack cep(std::size_t frames, std::size_t order, std::vector<double> c) {
  MelCepstrumTrack m;
  m.order = order;
  m.grid.num_frames = frames;
  m.coefficients = std::move(c);
  return m;
}

FrameTrack f0(std::vector<double> v) {
  FrameTrack t;
  t.grid.num_frames = v.size();
  t.values = std::move(v);
  return t;
}

double naive_mcd(const std::vector<double>& a, const std::vector<double>& b, std::size_t frames,
                 std::size_t order) {
  double total = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    double s = 0.0;
    for (std::size_t m = 1; m <= order; ++m) {
      const double d = a[t * (order + 1) + m] - b[t * (order + 1) + m];
      s += d * d;
    }
    total += 10.0 / std::log(10.0) * std::sqrt(s);
  }
  return total / static_cast<double>(frames);
}

double naive_rmse(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace

TEST_CASE("hand cases") {
  const auto a = cep(1, 3, {0.0, 0.0, 0.0, 0.0});
  const auto b = cep(1, 3, {0.0, 0.0, 0.1, 0.0});
  CHECK(mcd(a, a) == 0.0);
  CHECK(mcd(a, b) == doctest::Approx(0.434294).epsilon(1e-6 / 0.434294));
  CHECK(f0_rmse(f0({100, 120, 130}), f0({102, 122, 132})) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(f0_rmse(f0({100, 120}), f0({100, 120})) == 0.0);
}

TEST_CASE("gain term is excluded by default") {
  const auto a = cep(2, 2, {1.0, 0.5, 0.2, 1.0, 0.5, 0.2});
  const auto b = cep(2, 2, {2.0, 0.5, 0.2, 2.0, 0.5, 0.2});
  CHECK(mcd(a, b) == 0.0);
  CHECK(mcd(a, b, true) == doctest::Approx(kMcdScale));
}

TEST_CASE("agreement with naive formulas on random tracks") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> nf(1, 20), no(1, 30);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t frames = nf(rng), order = no(rng);
    std::vector<double> a((order + 1) * frames), b(a.size()), fa(frames), fb(frames);
    for (auto* v : {&a, &b})
      for (double& x : *v) x = g(rng);
    for (std::size_t i = 0; i < frames; ++i) fa[i] = 100 + 50 * std::abs(g(rng)), fb[i] = 100 + 50 * std::abs(g(rng));
    CHECK(std::abs(mcd(cep(frames, order, a), cep(frames, order, b)) - naive_mcd(a, b, frames, order)) < 1e-9);
    CHECK(std::abs(f0_rmse(f0(fa), f0(fb)) - naive_rmse(fa, fb)) < 1e-9);
  }
}

TEST_CASE("metric axioms") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> a(5 * 9), b(a.size());
  for (double& x : a) x = g(rng);
  for (double& x : b) x = g(rng);
  const auto ta = cep(5, 8, a), tb = cep(5, 8, b);
  CHECK(mcd(ta, tb) == doctest::Approx(mcd(tb, ta)).epsilon(1e-15));
  for (double k : {0.0, 0.5, 3.0}) {
    std::vector<double> c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + k * (b[i] - a[i]);
    CHECK(mcd(ta, cep(5, 8, c)) == doctest::Approx(k * mcd(ta, tb)).epsilon(1e-12).scale(1e-12));
  }

  // Frame reordering applied to both tracks leaves f0_rmse unchanged.
  std::vector<double> x(30), y(30);
  for (std::size_t i = 0; i < 30; ++i) x[i] = 100 + 10 * g(rng), y[i] = 100 + 10 * g(rng);
  std::vector<std::size_t> perm(30);
  for (std::size_t i = 0; i < 30; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> px(30), py(30);
  for (std::size_t i = 0; i < 30; ++i) px[i] = x[perm[i]], py[i] = y[perm[i]];
  CHECK(f0_rmse(f0(x), f0(y)) == doctest::Approx(f0_rmse(f0(px), f0(py))).epsilon(1e-14));
}

TEST_CASE("shape checks") {
  const auto a = cep(2, 2, std::vector<double>(6, 0.0));
  CHECK_THROWS_AS(mcd(a, cep(1, 2, std::vector<double>(3, 0.0))), InvalidArgument);
  CHECK_THROWS_AS(mcd(a, cep(3, 1, std::vector<double>(6, 0.0))), InvalidArgument);
  auto other_alpha = a;
  other_alpha.alpha = 0.3;
  CHECK_THROWS_AS(mcd(a, other_alpha), InvalidArgument);
  CHECK_THROWS_AS(f0_rmse(f0({1, 2}), f0({1})), InvalidArgument);
}

TEST_CASE("evaluate pair") {
  auto w = testing::impulse_train(140.0, 1.0, 0.3);
  const auto n = testing::white_noise(w.samples.size(), 3, 0.002);
  for (std::size_t i = 0; i < n.size(); ++i) w.samples[i] += n[i];

  const auto self = evaluate_pair(w, w);
  CHECK(self.mcd_db == 0.0);
  CHECK(self.f0_rmse_hz == 0.0);
  CHECK(self.num_frames == 201);
  CHECK(self.per_frame_mcd.size() == 201);

  auto half = w;
  for (double& v : half.samples) v *= 0.5;
  const auto shape_only = evaluate_pair(w, half);
  const auto with_gain = evaluate_pair(w, half, {}, true);
  CHECK(shape_only.mcd_db < 0.5);
  CHECK(with_gain.mcd_db > shape_only.mcd_db);
  // Halving the amplitude shifts c(0) by ln 2 on every frame.
  CHECK(with_gain.mcd_db == doctest::Approx(kMcdScale * std::log(2.0)).epsilon(0.05));

  auto other_rate = w;
  other_rate.sample_rate = 8000.0;
  CHECK_THROWS_AS(evaluate_pair(w, other_rate), InvalidArgument);

  auto shorter = w;
  shorter.samples.resize(12000);
  CHECK_THROWS_AS(evaluate_pair(w, shorter), AlignmentFailure);
  shorter.samples.resize(15000);
  CHECK(evaluate_pair(w, shorter).num_frames == 188);
}

TEST_CASE("corpus summary") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto s = summarize(v);
  CHECK(s.n == 4);
  CHECK(s.mean == 2.5);
  CHECK(s.ci95 == doctest::Approx(1.96 * std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(summarize(std::vector<double>{7.0}).ci95 == 0.0);
  CHECK(summarize(std::vector<double>{}).n == 0);
}
