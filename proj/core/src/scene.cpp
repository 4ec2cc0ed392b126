#include "nbdf/scene.hpp"

#include <cmath>
#include <cstdio>

#include "nbdf/diffuse_noise.hpp"
#include "nbdf/dsp.hpp"

namespace nbdf {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::babble: return "babble";
    case NoiseKind::white: return "white";
    case NoiseKind::wind_lf: return "wind_lf";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
  for (auto k : {NoiseKind::babble, NoiseKind::white, NoiseKind::wind_lf})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown noise kind: " + std::string(name));
}

SceneSample mix_scene(const MultichannelWaveform& speech_image, const MultichannelWaveform& noise, double snr_db,
                      int ref_index) {
  if (speech_image.channels() != noise.channels() || speech_image.length() != noise.length()) {
    throw std::invalid_argument("mix_scene: speech and noise shapes differ");
  }
  if (ref_index < 0 || ref_index >= speech_image.channels()) throw std::out_of_range("mix_scene: reference out of range");
  const double ps = speech_image.power(ref_index);
  const double pn = noise.power(ref_index);
  if (!(ps > 0.0)) throw std::invalid_argument("mix_scene: speech has zero power at the reference channel");
  if (!(pn > 0.0)) throw std::invalid_argument("mix_scene: noise has zero power at the reference channel");
  const double gain = std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));

  SceneSample scene;
  scene.speech_image = speech_image;
  scene.noise = noise * gain;
  scene.mixture = scene.speech_image + scene.noise;
  scene.ref_index = ref_index;
  scene.snr_db = snr_db;
  return scene;
}

SceneSpectra analyze_scene(const SceneSample& scene, const StftConfig& config) {
  SceneSpectra out{{}, stft(scene.speech_image, config), stft(scene.noise, config)};
  out.mixture = out.speech;
  auto mix = out.mixture.data();
  const auto noise = out.noise.data();
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] += noise[i];
  return out;
}

MultichannelWaveform spatialize(std::span<const double> dry, const std::vector<std::vector<double>>& rirs,
                                int sample_rate) {
  MultichannelWaveform out(static_cast<int>(rirs.size()), dry.size(), sample_rate);
  for (std::size_t m = 0; m < rirs.size(); ++m) {
    const auto wet = fft_convolve(dry, rirs[m], dry.size());
    std::copy(wet.begin(), wet.end(), out.channel(static_cast<int>(m)).begin());
  }
  return out;
}

SceneGenerator::SceneGenerator(SceneGeneratorConfig config, std::vector<ArraySpec> arrays,
                               std::shared_ptr<const SpeechSource> speech, std::uint64_t seed)
    : config_(std::move(config)), arrays_(std::move(arrays)), speech_(std::move(speech)), seed_(seed) {
  if (arrays_.empty()) throw std::invalid_argument("scene generator: empty array pool");
  if (!speech_) throw std::invalid_argument("scene generator: no speech source");
  if (config_.noise_kinds.empty()) throw std::invalid_argument("scene generator: no noise kinds");
  if (config_.min_snr_db > config_.max_snr_db) throw std::invalid_argument("scene generator: inverted SNR range");
  if (config_.duration <= 0.0) throw std::invalid_argument("scene generator: duration must be positive");
}

SceneSample SceneGenerator::generate(std::size_t index) const {
  Rng rng = derive_stream(seed_, index);
  const int fs = config_.sample_rate;
  const auto length = static_cast<std::size_t>(std::llround(config_.duration * fs));
  const ArraySpec& array = arrays_[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(arrays_.size()) - 1))];
  const int mics = array.channels();

  const ScenePlacement placement = sample_scene_geometry(config_.rooms, array, rng, config_.placement);
  RoomSpec room;
  room.dimensions = placement.room_dimensions;
  room.rt60 = placement.rt60;
  const auto rirs = simulate_rirs(room, placement.source, placement.mic_positions, fs, config_.rir);

  const auto dry = speech_->draw(length, fs, rng);
  const MultichannelWaveform speech_image = spatialize(dry, rirs, fs);

  const NoiseKind kind =
      config_.noise_kinds[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(config_.noise_kinds.size()) - 1))];
  MultichannelWaveform noise;
  switch (kind) {
    case NoiseKind::white: {
      std::vector<std::vector<double>> sources;
      for (int m = 0; m < mics; ++m) sources.push_back(white_noise(length, rng));
      noise = generate_diffuse_noise(placement.mic_positions, sources, fs);
      break;
    }
    case NoiseKind::babble:
      noise = generate_diffuse_noise(array, babble_noise(*speech_, length * mics, fs, rng), length, fs);
      break;
    case NoiseKind::wind_lf:
      noise = generate_diffuse_noise(array, wind_lf_noise(length * mics, fs, rng), length, fs);
      break;
  }

  const double snr = uniform(rng, config_.min_snr_db, config_.max_snr_db);
  const int ref = config_.ref_index >= 0 ? std::min(config_.ref_index, mics - 1) : uniform_int(rng, 0, mics - 1);
  SceneSample scene = mix_scene(speech_image, noise, snr, ref);

  // Common gain keeping the mixture inside [-0.9, 0.9].
  double peak = 0.0;
  for (double v : scene.mixture.data()) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    const double g = 0.9 / peak;
    scene.speech_image *= g;
    scene.noise *= g;
    scene.mixture = scene.speech_image + scene.noise;
  }

  char id[32];
  std::snprintf(id, sizeof id, "scene_%06zu", index);
  scene.scene_id = id;
  scene.array = array;
  scene.rt60 = placement.rt60;
  scene.noise_kind = kind;
  scene.seed = seed_;
  return scene;
}

}  // namespace nbdf
