#include "fixtures.hpp"

#include <cmath>
#include <numbers>

#include "nbdf/array_geometry.hpp"
#include "nbdf/random.hpp"
#include "nbdf/sources.hpp"

namespace nbdf::test {

SceneSample make_test_scene(const ArraySpec& array, std::uint64_t seed, const TestSceneOptions& options) {
  SceneGeneratorConfig config;
  config.sample_rate = options.sample_rate;
  config.duration = options.duration;
  config.min_snr_db = options.min_snr_db;
  config.max_snr_db = options.max_snr_db;
  config.noise_kinds = {options.noise};
  config.placement.min_rt60 = options.min_rt60;
  config.placement.max_rt60 = options.max_rt60;
  config.ref_index = options.ref_index;
  SceneGenerator generator(config, {array}, std::make_shared<SyntheticSpeechSource>(), seed);
  return generator.generate(0);
}

SceneSpectra plane_wave_spectra(const std::vector<Point3>& mics, const Point3& direction, int bins, int frames,
                                int sample_rate, double noise_stddev, std::uint64_t seed) {
  const int count = static_cast<int>(mics.size());
  const int win = 2 * (bins - 1);
  SceneSpectra out{Spectrogram(count, bins, frames, sample_rate, win, win / 2),
                   Spectrogram(count, bins, frames, sample_rate, win, win / 2),
                   Spectrogram(count, bins, frames, sample_rate, win, win / 2)};
  Rng rng(seed);
  std::normal_distribution<double> dist(0.0, std::sqrt(0.5));
  const Point3 u = direction.normalized();
  for (int k = 0; k < bins; ++k) {
    const double omega = 2.0 * std::numbers::pi * k * static_cast<double>(sample_rate) / win;
    for (int t = 0; t < frames; ++t) {
      const Complex s(dist(rng), dist(rng));
      for (int m = 0; m < count; ++m) {
        const double tau = -mics[static_cast<std::size_t>(m)].dot(u) / kSpeedOfSound;
        const Complex speech = s * std::polar(1.0, -omega * tau);
        const Complex noise = noise_stddev * Complex(dist(rng), dist(rng));
        out.speech.at(m, k, t) = speech;
        out.noise.at(m, k, t) = noise;
        out.mixture.at(m, k, t) = speech + noise;
      }
    }
  }
  return out;
}

TempDir::TempDir(const std::string& prefix) {
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = base / (prefix + "_" + std::to_string(rd()));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("TempDir: cannot create a unique directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace nbdf::test
