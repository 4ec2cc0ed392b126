#include "catch_amalgamated.hpp"

#include <cmath>

#include "nbdf/stft.hpp"
#include "oracles.hpp"

using namespace nbdf;
using Catch::Approx;

TEST_CASE("STFT configuration scales with the sample rate", "[stft]") {
  const auto a = StftConfig::for_sample_rate(16000);
  CHECK(a.win_len == 512);
  CHECK(a.hop == 256);
  const auto b = StftConfig::for_sample_rate(8000);
  CHECK(b.win_len == 256);
  CHECK(b.hop == 128);
}

TEST_CASE("periodic Hamming window", "[stft]") {
  const auto w = hamming_window(8);
  CHECK(w[0] == Approx(0.08));
  CHECK(w[4] == Approx(1.0));
  CHECK(w[2] == Approx(w[6]));
}

TEST_CASE("STFT matches a brute-force DFT", "[stft]") {
  Rng rng(11);
  const auto x = test::gaussian_noise(2000, rng);
  MultichannelWaveform w({x}, 16000);
  const StftConfig cfg{256, 128};
  const auto spec = stft(w, cfg);
  const auto ref = test::brute_force_stft(x, 256, 128);
  REQUIRE(spec.frames() == static_cast<int>(ref.size()));
  REQUIRE(spec.frames() == (2000 - 256) / 128 + 1);
  REQUIRE(spec.bins() == 129);
  double worst = 0.0;
  for (int t = 0; t < spec.frames(); ++t)
    for (int k = 0; k < spec.bins(); ++k) worst = std::max(worst, std::abs(spec.at(0, k, t) - ref[t][k]));
  CHECK(worst < 1e-9);
}

TEST_CASE("STFT rejects signals shorter than one window", "[stft]") {
  MultichannelWaveform w(1, 100, 16000);
  CHECK_THROWS_AS(stft(w, {512, 256}), std::invalid_argument);
}

TEST_CASE("STFT round trip reconstructs the interior", "[stft]") {
  for (int fs : {8000, 16000}) {
    const auto cfg = StftConfig::for_sample_rate(fs);
    Rng rng(static_cast<std::uint64_t>(fs));
    MultichannelWaveform w({test::gaussian_noise(3 * fs, rng), test::gaussian_noise(3 * fs, rng)}, fs);
    const auto y = istft(stft(w, cfg));
    const std::size_t frames = (w.length() - cfg.win_len) / cfg.hop + 1;
    REQUIRE(y.length() == (frames - 1) * cfg.hop + cfg.win_len);
    for (int m = 0; m < 2; ++m) {
      const double snr = test::reconstruction_snr_db(w.channel(m), y.channel(m), cfg.win_len, y.length() - cfg.win_len);
      CHECK(snr > 100.0);
    }
  }
}

TEST_CASE("narrowband normalization divides by the mean reference magnitude", "[stft]") {
  ComplexMatrix x(3, 4);
  x << Complex(3, 4), Complex(0, 1), Complex(-2, 0), Complex(0, 0),  //
      Complex(1, 1), Complex(2, 2), Complex(3, 3), Complex(4, 4),    //
      Complex(0, 0), Complex(5, 0), Complex(0, 5), Complex(1, 0);
  const auto n = narrowband_normalize(x, 0);
  CHECK(n.factor == Approx((5.0 + 1.0 + 2.0 + 0.0) / 4.0));
  CHECK(n.values(1, 3).real() == Approx(4.0 / 2.0));
  const auto r = narrowband_normalize(x, 2);
  double mean = 0.0;
  for (int t = 0; t < 4; ++t) mean += std::abs(r.values(2, t));
  CHECK(mean / 4.0 == Approx(1.0));
}

TEST_CASE("narrowband normalization floors silent references", "[stft]") {
  const ComplexMatrix zero = ComplexMatrix::Zero(2, 5);
  const auto n = narrowband_normalize(zero, 0);
  CHECK(n.factor == kMagnitudeFloor);
  CHECK(n.values.allFinite());
}

TEST_CASE("narrowband normalization is scale invariant", "[stft][property]") {
  Rng rng(5);
  ComplexMatrix x(4, 30);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = Complex(uniform(rng, -1, 1), uniform(rng, -1, 1));
  const auto a = narrowband_normalize(x, 1);
  for (double c : {1e-3, 7.0, 1e4}) {
    const auto b = narrowband_normalize(x * c, 1);
    CHECK((a.values - b.values).norm() < 1e-12 * a.values.norm());
  }
}
