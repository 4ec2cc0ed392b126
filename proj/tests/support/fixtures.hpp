#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "nbdf/narrowband.hpp"
#include "nbdf/nn/tensor.hpp"
#include "nbdf/scene.hpp"
#include "nbdf/spectrogram.hpp"

namespace nbdf::test {

/// Owned storage behind a span of SequenceView. Move-only so the views
/// keep pointing at live buffers.
template <typename S>
struct SequenceBatch {
  std::vector<std::vector<S>> data;
  std::vector<std::pair<int, int>> shapes;  // (frames, width)
  std::vector<nn::SequenceView<S>> views;

  SequenceBatch() = default;
  SequenceBatch(SequenceBatch&&) noexcept = default;
  SequenceBatch& operator=(SequenceBatch&&) noexcept = default;
  SequenceBatch(const SequenceBatch&) = delete;
  SequenceBatch& operator=(const SequenceBatch&) = delete;

  void add(std::vector<S> values, int frames, int width) {
    data.push_back(std::move(values));
    shapes.emplace_back(frames, width);
    views.clear();
    for (std::size_t i = 0; i < data.size(); ++i) views.push_back({data[i].data(), shapes[i].first, shapes[i].second});
  }
};

/// Random Gaussian sequences [frames x 2M] for each channel count in `channels`.
template <typename S>
SequenceBatch<S> random_sequences(const std::vector<int>& channels, int frames, std::mt19937_64& rng, double scale = 1.0) {
  SequenceBatch<S> batch;
  std::normal_distribution<double> dist(0.0, scale);
  for (int m : channels) {
    std::vector<S> values(static_cast<std::size_t>(frames) * 2 * m);
    for (auto& v : values) v = static_cast<S>(dist(rng));
    batch.add(std::move(values), frames, 2 * m);
  }
  return batch;
}

struct TestSceneOptions {
  int sample_rate = 16000;
  double duration = 1.0;
  double min_snr_db = 0.0;
  double max_snr_db = 0.0;
  NoiseKind noise = NoiseKind::white;
  double min_rt60 = 0.2;
  double max_rt60 = 0.4;
  int ref_index = 0;
};

/// One scene from the synthetic speech source and the given array.
SceneSample make_test_scene(const ArraySpec& array, std::uint64_t seed, const TestSceneOptions& options = {});

/// Far-field plane wave plus spatially white noise, built directly in the
/// STFT domain. Returns {mixture, speech, noise}.
SceneSpectra plane_wave_spectra(const std::vector<Point3>& mics, const Point3& direction, int bins, int frames,
                                int sample_rate, double noise_stddev, std::uint64_t seed);

/// Temporary directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "nbdf_test");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace nbdf::test
