#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cwvocoder/decomposition.hpp"
#include "cwvocoder/error.hpp"
#include "support.hpp"

using namespace cwv;

namespace {

UtteranceFeatures smooth_features(std::size_t frames, std::size_t order = 4) {
  UtteranceFeatures f;
  FrameGrid g;
  g.num_frames = frames;
  f.contf0 = {{}, TrackKind::ContF0, g};
  f.mvf = {{}, TrackKind::Mvf, g};
  f.melcep.order = order;
  f.melcep.grid = g;
  for (std::size_t t = 0; t < frames; ++t) {
    const double x = static_cast<double>(t);
    f.contf0.values.push_back(120.0 + 20.0 * std::sin(2.0 * std::numbers::pi * x / 80.0));
    f.mvf.values.push_back(4000.0 + 1500.0 * std::sin(2.0 * std::numbers::pi * x / 120.0));
    for (std::size_t m = 0; m <= order; ++m)
      f.melcep.coefficients.push_back((m == 0 ? -3.0 : 1.0 / m) +
                                      0.3 * std::cos(2.0 * std::numbers::pi * x / (60.0 + 7.0 * m)));
  }
  return f;
}

std::vector<double> melcep_column(const MelCepstrumTrack& mc, std::size_t m) {
  std::vector<double> v;
  for (std::size_t t = 0; t < mc.num_frames(); ++t) v.push_back(mc.frame(t)[m]);
  return v;
}

// Relative RMS error measured around the track mean, so cepstral tracks with
// near-zero means are judged on their variation.
double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  return reconstruction_error(a, b).epsilon_relative;
}

}  // namespace

TEST_CASE("scale weight parsing") {
  CHECK(parse_scale_weights("1,2,0.5").weights == std::vector<double>{1.0, 2.0, 0.5});
  CHECK(parse_scale_weights(" 1, 0 ").weights == std::vector<double>{1.0, 0.0});
  CHECK_THROWS_AS(parse_scale_weights(""), InvalidArgument);
  CHECK_THROWS_AS(parse_scale_weights("1,,2"), InvalidArgument);
  CHECK_THROWS_AS(parse_scale_weights("1,-2"), InvalidArgument);
  CHECK_THROWS_AS(parse_scale_weights("1,x"), InvalidArgument);
  CHECK_THROWS_AS(parse_scale_weights("1,inf"), InvalidArgument);
  CHECK(ScaleWeights::identity(10).weights == std::vector<double>(10, 1.0));
}

TEST_CASE("identity round trip of every track") {
  const auto f = smooth_features(512);
  const auto ladder = make_scale_ladder(2.0);
  const auto d = decompose_features(f, ladder);
  CHECK(d.melcep.size() == 5);
  CHECK(d.contf0.signal_length == 512);
  const auto r = recompose_features(d);
  CHECK_NOTHROW(validate(r));
  CHECK(relative_error(f.contf0.values, r.contf0.values) <= 0.05);
  CHECK(relative_error(f.mvf.values, r.mvf.values) <= 0.05);
  for (std::size_t m = 0; m <= 4; ++m)
    CHECK(relative_error(melcep_column(f.melcep, m), melcep_column(r.melcep, m)) <= 0.05);
}

TEST_CASE("constant and single-frame tracks") {
  auto f = smooth_features(1);
  const auto ladder = make_scale_ladder(2.0);
  const auto d = decompose_features(f, ladder);
  for (double v : d.contf0.coefficients) CHECK(v == 0.0);
  const auto r = recompose_features(d);
  CHECK(r.contf0.values == f.contf0.values);
  CHECK(r.mvf.values == f.mvf.values);
  CHECK(r.melcep.coefficients == f.melcep.coefficients);

  auto c = smooth_features(50);
  std::fill(c.contf0.values.begin(), c.contf0.values.end(), 140.0);
  const auto dc = decompose_features(c, ladder);
  for (double v : dc.contf0.coefficients) CHECK(v == 0.0);
  CHECK(dc.contf0.signal_mean == 140.0);
}

TEST_CASE("zero weights collapse tracks to their means") {
  const auto f = smooth_features(300);
  const auto d = decompose_features(f, make_scale_ladder(2.0));
  const auto r = recompose_features(d, {std::vector<double>(10, 0.0)});
  for (double v : r.contf0.values) CHECK(v == doctest::Approx(d.contf0.signal_mean));
  for (double v : r.mvf.values) CHECK(v == doctest::Approx(d.mvf.signal_mean));
  CHECK_NOTHROW(validate(r));
}

TEST_CASE("weighted recomposition is clamped and checked") {
  auto f = smooth_features(300);
  for (double& v : f.contf0.values) v = 55.0 + (v - 120.0) * 2.0;
  for (double& v : f.mvf.values) v = std::min(8000.0, v * 1.8);
  const auto d = decompose_features(f, make_scale_ladder(2.0));
  const auto r = recompose_features(d, {std::vector<double>(10, 4.0)});
  CHECK_NOTHROW(validate(r));
  for (double v : r.contf0.values) CHECK(v >= 50.0);
  for (double v : r.mvf.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 8000.0);
  }
  CHECK_THROWS_AS(recompose_features(d, {std::vector<double>(9, 1.0)}), InvalidArgument);
}

TEST_CASE("scale weighting is linear in each row") {
  // Doubling the coarse-scale weight adds exactly one more copy of that
  // row's contribution to the reconstruction.
  const auto f = smooth_features(512);
  const auto ladder = make_scale_ladder(2.0);
  const auto d = decompose_features(f, ladder);
  const double c = calibrate_reconstruction_constant(ladder);
  auto w = ScaleWeights::identity(10);
  const auto base = weighted_inverse(d.contf0, w, c);
  // Scale 128 is the coarsest one with a meaningful response on 512 frames.
  const std::size_t k = 6;
  w.weights[k] = 2.0;
  const auto boosted = weighted_inverse(d.contf0, w, c);
  const auto row = d.contf0.row(k);
  // Absolute tolerance: the difference of two values near 120 cancels.
  for (std::size_t x = 0; x < base.size(); ++x)
    CHECK(boosted[x] - base[x] == doctest::Approx(row[x] / std::sqrt(ladder[k]) / c).epsilon(1e-12).scale(1e3));
  // Re-analysing the boosted track raises the boosted row and changes the
  // finest row far less, relative to their sizes.
  const auto again = cwt_forward(boosted, ladder);
  double e_before = 0.0, e_after = 0.0, coarse_diff = 0.0, fine_diff = 0.0, fine = 0.0;
  for (std::size_t x = 0; x < base.size(); ++x) {
    e_before += row[x] * row[x];
    e_after += again.at(k, x) * again.at(k, x);
    coarse_diff += std::pow(again.at(k, x) - row[x], 2);
    fine_diff += std::pow(again.at(0, x) - d.contf0.at(0, x), 2);
    fine += std::pow(d.contf0.at(0, x), 2);
  }
  CHECK(e_after > e_before);
  const double coarse_change = std::sqrt(coarse_diff / e_before);
  const double fine_change = std::sqrt(fine_diff / fine);
  MESSAGE("relative change: boosted row " << coarse_change << ", finest row " << fine_change);
  CHECK(fine_change < 0.25 * coarse_change);
}

TEST_CASE("track lookup") {
  const auto f = smooth_features(20);
  const auto d = decompose_features(f, make_scale_ladder(2.0));
  const auto names = track_names(4);
  CHECK(names == std::vector<std::string>{"contf0", "mvf", "mcep0", "mcep1", "mcep2", "mcep3", "mcep4"});
  CHECK(&track_by_name(d, "contf0") == &d.contf0);
  CHECK(&track_by_name(d, "mcep3") == &d.melcep[3]);
  try {
    track_by_name(d, "pitch");
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("mcep4") != std::string::npos);
  }
  CHECK_THROWS_AS(track_by_name(d, "mcep5"), InvalidArgument);
}
