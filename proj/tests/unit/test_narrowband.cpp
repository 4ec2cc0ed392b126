#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "fixtures.hpp"
#include "nbdf/narrowband.hpp"

using namespace nbdf;
using Catch::Approx;

namespace {

SceneSpectra small_spectra(int mics, std::uint64_t seed) {
  const auto scene = test::make_test_scene(make_array(GeometryTag::circular, mics, 0.2, 0), seed, {8000, 0.6});
  return analyze_scene(scene, StftConfig::for_sample_rate(8000));
}

}  // namespace

TEST_CASE("channel orders keep the reference first", "[narrowband][property]") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = uniform_int(rng, 2, 8);
    const int ref = uniform_int(rng, 0, m - 1);
    auto order = shuffled_order(m, ref, rng);
    REQUIRE(order.size() == static_cast<std::size_t>(m));
    CHECK(order[0] == ref);
    std::sort(order.begin(), order.end());
    std::vector<int> expect(static_cast<std::size_t>(m));
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(order == expect);
  }
  CHECK(natural_order(4, 2) == std::vector<int>{2, 0, 1, 3});
}

TEST_CASE("shuffled orders cover every permutation", "[narrowband]") {
  Rng rng(2);
  std::set<std::vector<int>> seen;
  for (int i = 0; i < 500; ++i) seen.insert(shuffled_order(4, 1, rng));
  CHECK(seen.size() == 6);
}

TEST_CASE("MRM is clipped to [0, 1] and floored", "[narrowband]") {
  const std::vector<Complex> s{{1, 0}, {3, 4}, {0, 0}, {1, 1}};
  const std::vector<Complex> x{{2, 0}, {1, 0}, {0, 0}, {0, 0}};
  const auto m = compute_mrm(s, x);
  CHECK(m[0] == Approx(0.5));
  CHECK(m[1] == 1.0);
  CHECK(m[2] == 0.0);
  CHECK(m[3] == 1.0);
}

TEST_CASE("magnitude augmentation scales components coherently", "[narrowband]") {
  const auto spectra = small_spectra(3, 4);
  Rng rng(5);
  const auto aug = magnitude_augment(spectra, rng);
  REQUIRE(aug.gains.rows() == 3);
  REQUIRE(aug.gains.cols() == spectra.mixture.bins());
  CHECK(aug.gains.minCoeff() >= 0.75);
  CHECK(aug.gains.maxCoeff() <= 1.33);
  for (int m = 0; m < 3; ++m) {
    for (int k = 0; k < spectra.mixture.bins(); k += 7) {
      const double g = aug.gains(m, k);
      for (int t = 0; t < spectra.mixture.frames(); t += 5) {
        CHECK(std::abs(aug.spectra.speech.at(m, k, t) - g * spectra.speech.at(m, k, t)) < 1e-12);
        CHECK(std::abs(aug.spectra.mixture.at(m, k, t) - aug.spectra.speech.at(m, k, t) - aug.spectra.noise.at(m, k, t)) < 1e-12);
      }
    }
  }
  Rng r2(5);
  const auto per_mic = magnitude_augment(spectra, r2, 0.75, 1.33, AugmentMode::per_mic);
  for (int m = 0; m < 3; ++m) CHECK(per_mic.gains.row(m).maxCoeff() == per_mic.gains.row(m).minCoeff());
  CHECK_THROWS(magnitude_augment(spectra, rng, 0.0, 1.0));
  CHECK_THROWS(magnitude_augment(spectra, rng, 1.5, 1.0));
}

TEST_CASE("narrowband samples carry normalized input and MRM target", "[narrowband]") {
  const auto spectra = small_spectra(4, 6);
  Rng rng(7);
  SampleBuildOptions opts;
  opts.arrangement = ArrangementMode::natural;
  const auto samples = build_narrowband_samples(spectra, 2, rng, opts, "s");
  REQUIRE(samples.size() == static_cast<std::size_t>(spectra.mixture.bins()));
  for (const auto& s : samples) {
    REQUIRE(s.frames() == spectra.mixture.frames());
    REQUIRE(s.channels() == 4);
    const int k = s.frequency_index;
    double mean = 0.0;
    for (int t = 0; t < s.frames(); ++t) mean += std::hypot(s.x(t, 0), s.x(t, 1));
    mean /= s.frames();
    if (s.norm_factor > 1e-6) CHECK(mean == Approx(1.0).epsilon(1e-4));
    // Channel 0 is microphone 2, channel 1 is microphone 0.
    const int t = s.frames() / 2;
    CHECK(s.x(t, 0) == Approx(spectra.mixture.at(2, k, t).real() / s.norm_factor).margin(1e-4));
    CHECK(s.x(t, 2) == Approx(spectra.mixture.at(0, k, t).real() / s.norm_factor).margin(1e-4));
    const auto mrm = compute_mrm(spectra.speech.sequence(2, k), spectra.mixture.sequence(2, k));
    for (int f = 0; f < s.frames(); ++f) CHECK(s.target[static_cast<std::size_t>(f)] == Approx(mrm[static_cast<std::size_t>(f)]).margin(1e-6));
  }
}

TEST_CASE("augmentation leaves the MRM target unchanged", "[narrowband][property]") {
  const auto spectra = small_spectra(3, 8);
  Rng a(1), b(1);
  SampleBuildOptions plain, aug;
  aug.augment = true;
  const auto x = build_narrowband_samples(spectra, 0, a, plain);
  const auto y = build_narrowband_samples(spectra, 0, b, aug);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t t = 0; t < x[i].target.size(); ++t) REQUIRE(x[i].target[t] == Approx(y[i].target[t]).margin(1e-6));
}

TEST_CASE("redrawing a sample matches rebuilding with the same draws", "[narrowband]") {
  const auto spectra = small_spectra(5, 9);
  Rng rng(3);
  SampleBuildOptions natural;
  natural.arrangement = ArrangementMode::natural;
  const auto base = build_narrowband_samples(spectra, 0, rng, natural);
  SampleBuildOptions redraw;
  redraw.augment = true;
  const auto& s = base[20];
  Rng r1(11);
  const auto out = redraw_sample(s, r1, redraw);
  CHECK(out.target == s.target);
  double mean = 0.0;
  for (int t = 0; t < out.frames(); ++t) mean += std::hypot(out.x(t, 0), out.x(t, 1));
  CHECK(mean / out.frames() == Approx(1.0).epsilon(1e-4));
  // Both versions are normalized by the reference, so its columns coincide.
  CHECK((out.x.leftCols(2) - s.x.leftCols(2)).norm() < 1e-4 * s.x.leftCols(2).norm());
  // Every non-reference column is a positive multiple of some original column.
  for (int i = 1; i < 5; ++i) {
    bool matched = false;
    for (int j = 1; j < 5 && !matched; ++j) {
      const double ratio = out.x(10, 2 * i) / s.x(10, 2 * j);
      if (!(ratio > 0.0)) continue;
      matched = (out.x.col(2 * i).cast<double>() - ratio * s.x.col(2 * j).cast<double>()).norm() <
                1e-4 * out.x.col(2 * i).norm() + 1e-6;
    }
    CHECK(matched);
  }
}

TEST_CASE("sample shards round trip bit-exactly", "[narrowband]") {
  const auto spectra = small_spectra(3, 10);
  Rng rng(4);
  const auto samples = build_narrowband_samples(spectra, 1, rng, {}, "scene_x");
  test::TempDir dir;
  write_sample_shard(dir.path() / "a.shard", samples);
  const auto back = read_sample_shard(dir.path() / "a.shard");
  REQUIRE(back.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(back[i].x == samples[i].x);
    CHECK(back[i].target == samples[i].target);
    CHECK(back[i].frequency_index == samples[i].frequency_index);
    CHECK(back[i].norm_factor == samples[i].norm_factor);
    CHECK(back[i].scene_id == "scene_x");
  }
  CHECK_THROWS(read_sample_shard(dir.path() / "missing.shard"));
}
