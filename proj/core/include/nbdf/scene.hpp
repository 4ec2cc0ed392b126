#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nbdf/array_geometry.hpp"
#include "nbdf/rir.hpp"
#include "nbdf/scene_geometry.hpp"
#include "nbdf/sources.hpp"
#include "nbdf/stft.hpp"

namespace nbdf {

enum class NoiseKind { babble, white, wind_lf };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);

/// One synthesized example. mixture = speech_image + noise sample-wise.
struct SceneSample {
  std::string scene_id;
  MultichannelWaveform mixture;
  MultichannelWaveform speech_image;
  MultichannelWaveform noise;
  ArraySpec array;
  int ref_index = 0;
  double snr_db = 0.0;
  double rt60 = 0.0;
  NoiseKind noise_kind = NoiseKind::white;
  std::uint64_t seed = 0;
};

/// Scales `noise` so the reference-channel SNR over the whole utterance is
/// `snr_db`, then adds it to the speech. Throws std::invalid_argument on shape
/// mismatch or zero reference power in either component.
SceneSample mix_scene(const MultichannelWaveform& speech_image, const MultichannelWaveform& noise, double snr_db,
                      int ref_index);

struct SceneSpectra {
  Spectrogram mixture;
  Spectrogram speech;
  Spectrogram noise;
};

/// STFT of all three scene components. The mixture spectrogram is the sum of
/// the component spectrograms, which keeps the decomposition exact.
SceneSpectra analyze_scene(const SceneSample& scene, const StftConfig& config);

struct SceneGeneratorConfig {
  int sample_rate = 16000;
  double duration = 3.0;  // seconds
  double min_snr_db = -5.0;
  double max_snr_db = 10.0;
  std::vector<NoiseKind> noise_kinds{NoiseKind::babble, NoiseKind::white, NoiseKind::wind_lf};
  std::vector<Point3> rooms = default_rooms();
  PlacementOptions placement;
  RirOptions rir;
  /// Reference channel for the stored scene; -1 draws one uniformly.
  int ref_index = -1;
};

/// Deterministic scene factory: scene `index` depends only on
/// (seed, index) and the configuration.
class SceneGenerator {
 public:
  SceneGenerator(SceneGeneratorConfig config, std::vector<ArraySpec> arrays, std::shared_ptr<const SpeechSource> speech,
                 std::uint64_t seed);

  SceneSample generate(std::size_t index) const;

  const SceneGeneratorConfig& config() const { return config_; }
  const std::vector<ArraySpec>& arrays() const { return arrays_; }

 private:
  SceneGeneratorConfig config_;
  std::vector<ArraySpec> arrays_;
  std::shared_ptr<const SpeechSource> speech_;
  std::uint64_t seed_;
};

/// Convolves a dry source with one RIR per microphone, keeping the source length.
MultichannelWaveform spatialize(std::span<const double> dry, const std::vector<std::vector<double>>& rirs,
                                int sample_rate);

}  // namespace nbdf
