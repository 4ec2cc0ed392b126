#include "catch_amalgamated.hpp"

#include <cmath>

#include "fixtures.hpp"
#include "nbdf/dsp.hpp"
#include "nbdf/scene.hpp"
#include "nbdf/sources.hpp"
#include "nbdf/wav_io.hpp"

using namespace nbdf;
using Catch::Approx;

TEST_CASE("synthetic speech is deterministic and bounded", "[sources]") {
  Rng a(4), b(4);
  const auto x = synthesize_speech(16000, 16000, a);
  const auto y = synthesize_speech(16000, 16000, b);
  REQUIRE(x == y);
  CHECK(std::sqrt(mean_power(x)) == Approx(0.05).epsilon(0.01));
  int silent = 0;
  for (std::size_t i = 0; i + 160 <= x.size(); i += 160) {
    double e = 0.0;
    for (std::size_t j = i; j < i + 160; ++j) e += x[j] * x[j];
    silent += e < 1e-8 ? 1 : 0;
  }
  CHECK(silent > 0);
}

TEST_CASE("noise generators have unit power", "[sources]") {
  Rng rng(2);
  CHECK(mean_power(white_noise(32000, rng)) == Approx(1.0).epsilon(0.05));
  CHECK(mean_power(pink_noise(32000, rng)) == Approx(1.0).epsilon(0.05));
  CHECK(mean_power(wind_lf_noise(32000, 16000, rng)) == Approx(1.0).epsilon(0.05));
  const SyntheticSpeechSource speech;
  CHECK(mean_power(babble_noise(speech, 32000, 16000, rng)) == Approx(1.0).epsilon(0.05));
}

TEST_CASE("wind noise concentrates below 500 Hz", "[sources]") {
  Rng rng(8);
  const auto w = wind_lf_noise(64000, 16000, rng);
  const auto low = butterworth_lowpass(w, 16000, 1000.0);
  CHECK(mean_power(low) / mean_power(w) > 0.9);
}

TEST_CASE("corpus source reports the expected layout", "[sources]") {
  test::TempDir dir;
  try {
    CorpusSpeechSource source(dir.path(), 16000);
    FAIL("expected an error for an empty corpus");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find(".wav") != std::string::npos);
  }
  write_wav(dir.path() / "spk1" / "utt1.wav", MultichannelWaveform({std::vector<double>(4000, 0.1)}, 16000));
  CorpusSpeechSource source(dir.path(), 16000);
  CHECK(source.size() == 1);
  Rng rng(1);
  CHECK(source.draw(10000, 16000, rng).size() == 10000);
}

TEST_CASE("mixing sets the reference-channel SNR", "[scene]") {
  Rng rng(6);
  MultichannelWaveform speech(2, 8000, 16000), noise(2, 8000, 16000);
  for (auto& v : speech.data()) v = uniform(rng, -1, 1);
  for (auto& v : noise.data()) v = uniform(rng, -0.1, 0.1);
  for (double snr : {-5.0, 0.0, 7.5}) {
    const auto scene = mix_scene(speech, noise, snr, 1);
    CHECK(10.0 * std::log10(scene.speech_image.power(1) / scene.noise.power(1)) == Approx(snr).margin(1e-9));
    for (std::size_t i = 0; i < 8000; ++i)
      REQUIRE(scene.mixture.at(0, i) == Approx(scene.speech_image.at(0, i) + scene.noise.at(0, i)));
  }
  CHECK_THROWS(mix_scene(speech, MultichannelWaveform(2, 8000, 16000), 0.0, 0));
}

TEST_CASE("scene generator is deterministic per index", "[scene]") {
  const auto array = make_array(GeometryTag::linear, 4, 0.2, 0);
  SceneGeneratorConfig cfg;
  cfg.duration = 0.5;
  SceneGenerator gen(cfg, {array}, std::make_shared<SyntheticSpeechSource>(), 7);
  const auto a = gen.generate(3);
  const auto b = gen.generate(3);
  const auto c = gen.generate(4);
  CHECK(a.scene_id == "scene_000003");
  REQUIRE(a.mixture.length() == 8000);
  CHECK(std::equal(a.mixture.data().begin(), a.mixture.data().end(), b.mixture.data().begin()));
  CHECK_FALSE(std::equal(a.mixture.data().begin(), a.mixture.data().end(), c.mixture.data().begin()));
  CHECK(a.snr_db >= -5.0);
  CHECK(a.snr_db <= 10.0);
  double peak = 0.0;
  for (double v : a.mixture.data()) peak = std::max(peak, std::abs(v));
  CHECK(peak == Approx(0.9));
}

TEST_CASE("scene spectra decompose exactly", "[scene]") {
  const auto scene = test::make_test_scene(make_array(GeometryTag::circular, 3, 0.2, 0), 1);
  const auto spectra = analyze_scene(scene, StftConfig::for_sample_rate(16000));
  const auto mix = spectra.mixture.data();
  const auto s = spectra.speech.data();
  const auto n = spectra.noise.data();
  for (std::size_t i = 0; i < mix.size(); ++i) REQUIRE(mix[i] == s[i] + n[i]);
}
