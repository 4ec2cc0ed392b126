#include "catch_amalgamated.hpp"

#include <cmath>

#include "fixtures.hpp"
#include "nbdf/enhance.hpp"
#include "nbdf/metrics.hpp"
#include "oracles.hpp"

using namespace nbdf;
using Catch::Approx;

namespace {

constexpr int kRate = 8000;

SceneSample scene_at_0db(int mics, std::uint64_t seed) {
  return test::make_test_scene(make_array(GeometryTag::circular, mics, 0.2, 0), seed, {kRate, 1.5});
}

std::shared_ptr<const Network> small_network(Variant v, int channels) {
  ModelConfig c;
  c.variant = v;
  c.h1 = 8;
  c.h2 = 4;
  c.cc_feature_maps = 4;
  c.max_channels = 4;
  c.input_channels = channels;
  return std::make_shared<Network>(c, 3);
}

double relative_error(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("unit mask reproduces the noisy reference", "[enhance]") {
  const auto scene = scene_at_0db(3, 1);
  const auto cfg = StftConfig::for_sample_rate(kRate);
  const auto out = enhance(scene.mixture, ConstantMaskEstimator(1.0), 2, cfg);
  REQUIRE(out.channels() == 1);
  const auto frames = (scene.mixture.length() - cfg.win_len) / cfg.hop + 1;
  REQUIRE(out.length() == (frames - 1) * cfg.hop + cfg.win_len);
  const auto ref = scene.mixture.channel(2).first(out.length());
  const auto win = static_cast<std::size_t>(cfg.win_len);
  CHECK(test::reconstruction_snr_db(ref, out.channel(0), win, out.length() - win) > 60.0);
}

TEST_CASE("zero mask produces digital silence", "[enhance]") {
  const auto scene = scene_at_0db(2, 2);
  const auto out = enhance(scene.mixture, ConstantMaskEstimator(0.0), 0, StftConfig::for_sample_rate(kRate));
  for (double v : out.channel(0)) REQUIRE(v == 0.0);
}

TEST_CASE("masking keeps the reference phase", "[enhance][property]") {
  const auto scene = scene_at_0db(3, 3);
  const auto spec = stft(scene.mixture, StftConfig::for_sample_rate(kRate));
  const auto out = enhance_spectrogram(spec, ConstantMaskEstimator(0.37), 1);
  for (int k = 1; k < spec.bins(); k += 7) {
    for (int t = 0; t < spec.frames(); t += 5) {
      const Complex x = spec.at(1, k, t);
      const Complex y = out.at(0, k, t);
      CHECK(std::abs(y - 0.37 * x) <= 1e-12 * std::abs(x));
    }
  }
}

TEST_CASE("true magnitude ratio mask improves SI-SDR by at least 8 dB", "[enhance]") {
  const auto cfg = StftConfig::for_sample_rate(kRate);
  double gain = 0.0;
  const int scenes = 3;
  for (int i = 0; i < scenes; ++i) {
    const auto scene = scene_at_0db(4, 10 + static_cast<std::uint64_t>(i));
    const auto spectra = analyze_scene(scene, cfg);
    const FixedMaskEstimator oracle(oracle_mrm(spectra.speech, spectra.mixture, scene.ref_index));
    const auto out = enhance(scene.mixture, oracle, scene.ref_index, cfg);
    const auto clean = scene.speech_image.channel(scene.ref_index).first(out.length());
    const auto noisy = scene.mixture.channel(scene.ref_index).first(out.length());
    gain += si_sdr(clean, out.channel(0)) - si_sdr(clean, noisy);
  }
  CHECK(gain / scenes >= 8.0);
}

TEST_CASE("enhancement is scale covariant", "[enhance][property]") {
  const auto scene = scene_at_0db(3, 4);
  const auto cfg = StftConfig::for_sample_rate(kRate);
  const NetworkMaskEstimator est(small_network(Variant::pw, 3), 16, 1);
  const auto base = enhance(scene.mixture, est, 0, cfg);
  for (double c : {0.1, 10.0}) {
    const auto scaled = enhance(scene.mixture * c, est, 0, cfg);
    const auto expect = base * c;
    CHECK(relative_error(scaled.channel(0), expect.channel(0)) <= 1e-5);
  }
}

TEST_CASE("pair-wise models ignore the order of non-reference channels", "[enhance][property]") {
  const auto scene = scene_at_0db(4, 5);
  const auto cfg = StftConfig::for_sample_rate(kRate);
  const NetworkMaskEstimator est(small_network(Variant::pw, 4), 32, 1);
  const auto base = enhance(scene.mixture, est, 1, cfg);
  const std::vector<int> order{3, 0, 1, 2};
  const auto permuted = enhance(scene.mixture.select(order), est, 2, cfg);
  CHECK(relative_error(permuted.channel(0), base.channel(0)) <= 1e-5);
}

TEST_CASE("network mask estimation is thread independent", "[enhance]") {
  const auto scene = scene_at_0db(3, 6);
  const auto spec = stft(scene.mixture, StftConfig::for_sample_rate(kRate));
  const auto net = small_network(Variant::cc, 3);
  const auto inputs = narrowband_inputs(spec, 0);
  CHECK(NetworkMaskEstimator(net, 10, 1).estimate(inputs) == NetworkMaskEstimator(net, 10, 3).estimate(inputs));
}

TEST_CASE("channel-count violations name the variant constraint", "[enhance]") {
  const auto cfg = StftConfig::for_sample_rate(kRate);
  const auto three = scene_at_0db(3, 7).mixture;
  const auto message = [&](Variant v, int built, const MultichannelWaveform& wave) {
    try {
      enhance(wave, NetworkMaskEstimator(small_network(v, built)), 0, cfg);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK_THAT(message(Variant::basic, 4, three), Catch::Matchers::ContainsSubstring("basic"));
  const std::vector<int> one{0};
  CHECK_THAT(message(Variant::pw, 3, three.select(one)), Catch::Matchers::ContainsSubstring("at least"));
  const auto six = scene_at_0db(6, 8).mixture;
  CHECK_THAT(message(Variant::cp, 3, six), Catch::Matchers::ContainsSubstring("channel bound"));
  CHECK_THROWS_AS(enhance(three, ConstantMaskEstimator(1.0), 3, cfg), std::invalid_argument);
  CHECK_THROWS_AS(enhance(three, ConstantMaskEstimator(1.0), -1, cfg), std::invalid_argument);
}
