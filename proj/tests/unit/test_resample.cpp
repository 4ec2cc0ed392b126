#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>

#include "nbdf/resample.hpp"

using namespace nbdf;
using Catch::Approx;

namespace {

std::vector<double> tone(double freq, int fs, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / fs);
  return x;
}

double tone_error(const std::vector<double>& y, double freq, int fs, std::size_t skip) {
  double err = 0.0, ref = 0.0;
  for (std::size_t i = skip; i + skip < y.size(); ++i) {
    const double e = std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / fs);
    err += (y[i] - e) * (y[i] - e);
    ref += e * e;
  }
  return 10.0 * std::log10(ref / err);
}

}  // namespace

TEST_CASE("resampling preserves a tone", "[resample]") {
  const auto x = tone(1000.0, 16000, 16000);
  const auto down = resample(x, 16000, 10000);
  CHECK(down.size() == 10000);
  CHECK(tone_error(down, 1000.0, 10000, 200) > 40.0);
  const auto up = resample(tone(700.0, 8000, 8000), 8000, 16000);
  CHECK(up.size() == 16000);
  CHECK(tone_error(up, 700.0, 16000, 400) > 40.0);
}

TEST_CASE("resampling removes content above the new Nyquist rate", "[resample]") {
  const auto x = tone(7000.0, 16000, 16000);
  const auto down = resample(x, 16000, 8000);
  double power = 0.0;
  for (std::size_t i = 200; i + 200 < down.size(); ++i) power += down[i] * down[i];
  power /= static_cast<double>(down.size() - 400);
  CHECK(power < 0.01);
}

TEST_CASE("resampling at equal rates is the identity", "[resample]") {
  const std::vector<double> x{0.1, -0.2, 0.3, 0.4};
  CHECK(resample(x, 16000, 16000) == x);
}

TEST_CASE("resampling rejects invalid rates", "[resample]") {
  const std::vector<double> x(10, 0.0);
  CHECK_THROWS(resample(x, 0, 16000));
  CHECK_THROWS(resample(x, 16000, -1));
}
