#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "nbdf/mvdr.hpp"

using namespace nbdf;
using Catch::Approx;

namespace {

constexpr int kRate = 8000;
constexpr int kBins = 65;

std::vector<Point3> linear_mics(int count) {
  return make_array(GeometryTag::linear, count, 0.15 + 0.05 * (count - 2), 0).mic_positions;
}

double band_power(const Spectrogram& s, int m, int k) {
  double p = 0.0;
  for (const auto& v : s.sequence(m, k)) p += std::norm(v);
  return p;
}

// Output power of weights w applied to one channel-stacked component.
double beam_power(const ComplexVector& w, const Spectrogram& s, int k) {
  double p = 0.0;
  for (int t = 0; t < s.frames(); ++t) {
    Complex y = 0.0;
    for (int m = 0; m < s.channels(); ++m) y += std::conj(w(m)) * s.at(m, k, t);
    p += std::norm(y);
  }
  return p;
}

}  // namespace

TEST_CASE("MVDR weights satisfy the distortionless constraint", "[mvdr][property]") {
  for (int mics : {2, 4, 8}) {
    const auto sp = test::plane_wave_spectra(linear_mics(mics), {1.0, 0.6, 0.1}, kBins, 200, kRate, 0.5, 11);
    const auto r = oracle_mvdr(sp.mixture, sp.speech, sp.noise, 1);
    for (int k = 0; k < kBins; ++k) {
      const Complex c = r.weights.col(k).dot(r.steering.col(k));
      CHECK(std::abs(c - 1.0) <= 1e-6);
      CHECK(r.steering(1, k) == Complex(1.0, 0.0));
      CHECK(r.loading[static_cast<std::size_t>(k)] == 1e-6);
    }
  }
}

TEST_CASE("single-channel MVDR passes the mixture through", "[mvdr]") {
  const auto sp = test::plane_wave_spectra({{0.0, 0.0, 0.0}}, {1.0, 0.0, 0.0}, kBins, 50, kRate, 1.0, 2);
  const auto r = oracle_mvdr(sp.mixture, sp.speech, sp.noise, 0);
  for (int k = 0; k < kBins; ++k) {
    CHECK(r.weights(0, k) == Complex(1.0, 0.0));
    for (int t = 0; t < 50; ++t) REQUIRE(r.output.at(0, k, t) == sp.mixture.at(0, k, t));
  }
}

TEST_CASE("plane wave in white noise yields the array gain", "[mvdr]") {
  const Point3 dir{0.8, 0.5, 0.2};
  for (int mics : {2, 4, 8}) {
    const auto positions = linear_mics(mics);
    const auto sp = test::plane_wave_spectra(positions, dir, kBins, 400, kRate, 1.0, 5 + mics);
    const auto r = oracle_mvdr(sp.mixture, sp.speech, sp.noise, 0);
    double s_in = 0.0, n_in = 0.0, s_out = 0.0, n_out = 0.0;
    for (int k = 1; k < kBins; ++k) {
      const ComplexVector w = r.weights.col(k);
      s_in += band_power(sp.speech, 0, k);
      n_in += band_power(sp.noise, 0, k);
      s_out += beam_power(w, sp.speech, k);
      n_out += beam_power(w, sp.noise, k);

      // Estimated steering vector against the true far-field phase ramp.
      const double omega = 2.0 * std::numbers::pi * k * kRate / (2.0 * (kBins - 1));
      const Point3 u = dir.normalized();
      for (int m = 0; m < mics; ++m) {
        const double rel = -(positions[static_cast<std::size_t>(m)] - positions[0]).dot(u) / kSpeedOfSound;
        CHECK(std::abs(r.steering(m, k) - std::polar(1.0, -omega * rel)) < 0.05);
      }
    }
    const double gain = 10.0 * std::log10((s_out / n_out) / (s_in / n_in));
    CAPTURE(mics);
    CHECK(std::abs(gain - 10.0 * std::log10(mics)) <= 1.0);
  }
}

TEST_CASE("MVDR output noise never exceeds the reference noise", "[mvdr][property]") {
  const auto scene = test::make_test_scene(make_array(GeometryTag::circular, 4, 0.2, 0), 3, {kRate, 1.0});
  const auto spectra = analyze_scene(scene, StftConfig::for_sample_rate(kRate));
  const auto r = oracle_mvdr(spectra.mixture, spectra.speech, spectra.noise, scene.ref_index);
  for (int k = 0; k < spectra.mixture.bins(); ++k) {
    const double ref = band_power(spectra.noise, scene.ref_index, k);
    CHECK(beam_power(r.weights.col(k), spectra.noise, k) <= ref * (1.0 + 1e-6) + 1e-18);
  }
}

TEST_CASE("MVDR is deterministic and validates its inputs", "[mvdr]") {
  const auto sp = test::plane_wave_spectra(linear_mics(3), {1.0, 0.0, 0.0}, 9, 40, kRate, 0.3, 4);
  const auto a = oracle_mvdr(sp.mixture, sp.speech, sp.noise, 2);
  const auto b = oracle_mvdr(sp.mixture, sp.speech, sp.noise, 2);
  CHECK(a.weights == b.weights);
  CHECK_THROWS_AS(oracle_mvdr(sp.mixture, sp.speech, sp.noise, 3), std::invalid_argument);
  const auto other = test::plane_wave_spectra(linear_mics(2), {1.0, 0.0, 0.0}, 9, 40, kRate, 0.3, 4);
  CHECK_THROWS_AS(oracle_mvdr(sp.mixture, other.speech, sp.noise, 0), std::invalid_argument);
}

TEST_CASE("silent noise falls back to a delay-and-sum solution", "[mvdr]") {
  auto sp = test::plane_wave_spectra(linear_mics(4), {1.0, 0.2, 0.0}, 9, 40, kRate, 0.0, 6);
  const auto r = oracle_mvdr(sp.mixture, sp.speech, sp.noise, 0);
  for (int k = 0; k < 9; ++k) {
    const ComplexVector d = r.steering.col(k);
    const ComplexVector expect = d / d.squaredNorm();
    CHECK((r.weights.col(k) - expect).norm() <= 1e-9);
  }
}

TEST_CASE("non-finite noise covariance is an error", "[mvdr]") {
  auto sp = test::plane_wave_spectra(linear_mics(3), {1.0, 0.0, 0.0}, 9, 40, kRate, 0.3, 8);
  sp.noise.at(1, 4, 7) = Complex(std::numeric_limits<double>::infinity(), 0.0);
  CHECK_THROWS_AS(oracle_mvdr(sp.mixture, sp.speech, sp.noise, 0), std::runtime_error);
}
