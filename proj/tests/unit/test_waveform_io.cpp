#include "catch_amalgamated.hpp"

#include <cmath>
#include <fstream>

#include "fixtures.hpp"
#include "nbdf/wav_io.hpp"
#include "nbdf/waveform.hpp"
#include "oracles.hpp"

using namespace nbdf;
using Catch::Approx;

namespace {

MultichannelWaveform random_wave(int channels, std::size_t length, int fs, std::uint64_t seed) {
  Rng rng(seed);
  MultichannelWaveform w(channels, length, fs);
  for (auto& v : w.data()) v = uniform(rng, -0.9, 0.9);
  return w;
}

}  // namespace

TEST_CASE("waveform stores channels contiguously", "[waveform]") {
  MultichannelWaveform w({{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}}, 8000);
  REQUIRE(w.channels() == 2);
  REQUIRE(w.length() == 3);
  CHECK(w.channel(1)[0] == 4.0);
  CHECK(w.at(0, 2) == 3.0);
  CHECK(w.power(0) == Approx(14.0 / 3.0));

  const int order[] = {1, 0};
  const auto swapped = w.select(order);
  CHECK(swapped.at(0, 0) == 4.0);
  CHECK(swapped.at(1, 0) == 1.0);

  const auto part = w.slice(1, 2);
  CHECK(part.length() == 2);
  CHECK(part.at(1, 1) == 6.0);

  const auto sum = w + w * 2.0;
  CHECK(sum.at(1, 2) == Approx(18.0));
}

TEST_CASE("waveform rejects ragged construction", "[waveform]") {
  CHECK_THROWS_AS(MultichannelWaveform({{1.0, 2.0}, {1.0}}, 8000), std::invalid_argument);
  MultichannelWaveform a(2, 4, 8000), b(2, 5, 8000);
  CHECK_THROWS(a += b);
}

TEST_CASE("float32 WAV round trip is exact to float precision", "[wav]") {
  test::TempDir dir;
  const auto w = random_wave(3, 1000, 16000, 1);
  write_wav(dir.path() / "a.wav", w, WavSampleFormat::float32);
  const auto r = read_wav(dir.path() / "a.wav");
  REQUIRE(r.channels() == 3);
  REQUIRE(r.length() == 1000);
  REQUIRE(r.sample_rate() == 16000);
  for (std::size_t i = 0; i < w.data().size(); ++i)
    REQUIRE(r.data()[i] == Approx(static_cast<float>(w.data()[i])).margin(0));
}

TEST_CASE("pcm16 WAV round trip quantizes to 16 bits", "[wav]") {
  test::TempDir dir;
  const auto w = random_wave(2, 500, 8000, 2);
  write_wav(dir.path() / "p.wav", w, WavSampleFormat::pcm16);
  const auto r = read_wav(dir.path() / "p.wav");
  for (std::size_t i = 0; i < w.data().size(); ++i) REQUIRE(std::abs(r.data()[i] - w.data()[i]) <= 1.0 / 32767.0);
}

TEST_CASE("WAV reader enforces the expected sample rate", "[wav]") {
  test::TempDir dir;
  write_wav(dir.path() / "r.wav", random_wave(1, 8000, 8000, 3));
  CHECK_THROWS(read_wav(dir.path() / "r.wav", {16000, false}));
  const auto up = read_wav(dir.path() / "r.wav", {16000, true});
  CHECK(up.sample_rate() == 16000);
  CHECK(up.length() == 16000);
}

TEST_CASE("WAV reader rejects garbage", "[wav]") {
  test::TempDir dir;
  {
    std::ofstream f(dir.path() / "bad.wav", std::ios::binary);
    f << "definitely not a wave file";
  }
  CHECK_THROWS(read_wav(dir.path() / "bad.wav"));
  CHECK_THROWS(read_wav(dir.path() / "missing.wav"));
}
