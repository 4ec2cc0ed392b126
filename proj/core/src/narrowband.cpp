#include "nbdf/narrowband.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace nbdf {

std::vector<int> natural_order(int channels, int ref_index) {
  if (ref_index < 0 || ref_index >= channels) throw std::out_of_range("channel arrangement: reference out of range");
  std::vector<int> order{ref_index};
  for (int m = 0; m < channels; ++m)
    if (m != ref_index) order.push_back(m);
  return order;
}

std::vector<int> shuffled_order(int channels, int ref_index, Rng& rng) {
  auto order = natural_order(channels, ref_index);
  std::shuffle(order.begin() + 1, order.end(), rng);
  return order;
}

ArrangedSpectrogram arrange_channels(const Spectrogram& spec, int ref_index, Rng& rng) {
  auto order = shuffled_order(spec.channels(), ref_index, rng);
  return {spec.select(order), std::move(order)};
}

AugmentedSpectra magnitude_augment(const SceneSpectra& scene, Rng& rng, double lo, double hi, AugmentMode mode) {
  if (!(lo > 0.0) || hi < lo) throw std::invalid_argument("magnitude_augment: require 0 < lo <= hi");
  const int mics = scene.mixture.channels();
  const int bins = scene.mixture.bins();
  if (!scene.speech.same_shape(scene.mixture) || !scene.noise.same_shape(scene.mixture)) {
    throw std::invalid_argument("magnitude_augment: component shapes differ");
  }
  auto draw = [&] { return lo == hi ? lo : uniform(rng, lo, hi); };
  RealMatrix gains(mics, bins);
  for (int m = 0; m < mics; ++m) {
    if (mode == AugmentMode::per_mic) {
      gains.row(m).setConstant(draw());
    } else {
      for (int k = 0; k < bins; ++k) gains(m, k) = draw();
    }
  }
  AugmentedSpectra out{scene, gains};
  for (int m = 0; m < mics; ++m) {
    for (int k = 0; k < bins; ++k) {
      const double g = gains(m, k);
      for (Spectrogram* s : {&out.spectra.mixture, &out.spectra.speech, &out.spectra.noise}) {
        for (auto& v : s->sequence(m, k)) v *= g;
      }
    }
  }
  return out;
}

std::vector<double> compute_mrm(std::span<const Complex> speech_ref, std::span<const Complex> mixture_ref) {
  if (speech_ref.size() != mixture_ref.size()) throw std::invalid_argument("compute_mrm: length mismatch");
  std::vector<double> mask(speech_ref.size());
  for (std::size_t t = 0; t < mask.size(); ++t) {
    mask[t] = std::min(std::abs(speech_ref[t]) / std::max(std::abs(mixture_ref[t]), kMagnitudeFloor), 1.0);
  }
  return mask;
}

std::vector<NarrowbandSample> build_narrowband_samples(const SceneSpectra& scene, int ref_index, Rng& rng,
                                                       const SampleBuildOptions& options, const std::string& scene_id) {
  const SceneSpectra* source = &scene;
  AugmentedSpectra augmented;
  if (options.augment) {
    augmented = magnitude_augment(scene, rng, options.augment_lo, options.augment_hi, options.augment_mode);
    source = &augmented.spectra;
  }
  const int mics = source->mixture.channels();
  const auto order = options.arrangement == ArrangementMode::shuffle ? shuffled_order(mics, ref_index, rng)
                                                                     : natural_order(mics, ref_index);
  const Spectrogram mixture = source->mixture.select(order);
  const int bins = mixture.bins();
  const int frames = mixture.frames();

  double utterance_factor = 0.0;
  if (options.normalization == NormalizationScope::per_utterance) {
    for (int k = 0; k < bins; ++k)
      for (const auto& v : mixture.sequence(0, k)) utterance_factor += std::abs(v);
    utterance_factor = std::max(utterance_factor / (static_cast<double>(bins) * frames), kMagnitudeFloor);
  }

  std::vector<NarrowbandSample> samples(static_cast<std::size_t>(bins));
  for (int k = 0; k < bins; ++k) {
    NarrowbandSample& s = samples[static_cast<std::size_t>(k)];
    const ComplexMatrix nb = mixture.narrowband(k);
    double factor;
    ComplexMatrix normalized;
    if (options.normalization == NormalizationScope::per_frequency) {
      auto n = narrowband_normalize(nb, 0);
      factor = n.factor;
      normalized = std::move(n.values);
    } else {
      factor = utterance_factor;
      normalized = nb / factor;
    }
    s.x.resize(frames, 2 * mics);
    for (int t = 0; t < frames; ++t) {
      for (int m = 0; m < mics; ++m) {
        s.x(t, 2 * m) = static_cast<float>(normalized(m, t).real());
        s.x(t, 2 * m + 1) = static_cast<float>(normalized(m, t).imag());
      }
    }
    const auto mask = compute_mrm(source->speech.sequence(ref_index, k), source->mixture.sequence(ref_index, k));
    s.target.assign(mask.begin(), mask.end());
    s.frequency_index = k;
    s.norm_factor = static_cast<float>(factor);
    s.scene_id = scene_id;
  }
  return samples;
}

NarrowbandSample redraw_sample(const NarrowbandSample& base, Rng& rng, const SampleBuildOptions& options) {
  const int mics = base.channels();
  const int frames = base.frames();
  std::vector<double> gains(static_cast<std::size_t>(mics), 1.0);
  if (options.augment) {
    if (!(options.augment_lo > 0.0) || options.augment_hi < options.augment_lo) {
      throw std::invalid_argument("redraw_sample: require 0 < lo <= hi");
    }
    for (double& g : gains) g = uniform(rng, options.augment_lo, options.augment_hi);
  }
  // Input channel 0 is already the reference, so permute the rest.
  const auto order = options.arrangement == ArrangementMode::shuffle ? shuffled_order(mics, 0, rng)
                                                                     : natural_order(mics, 0);
  // Undo the stored normalization, apply gains, renormalize with the floor.
  double ref_mean = 0.0;
  for (int t = 0; t < frames; ++t) ref_mean += std::hypot(double(base.x(t, 0)), double(base.x(t, 1)));
  ref_mean = ref_mean / frames * base.norm_factor * gains[0];
  const double factor = std::max(ref_mean, kMagnitudeFloor);

  NarrowbandSample out;
  out.x.resize(frames, 2 * mics);
  for (int i = 0; i < mics; ++i) {
    const int src = order[static_cast<std::size_t>(i)];
    const double scale = gains[static_cast<std::size_t>(src)] * base.norm_factor / factor;
    out.x.col(2 * i) = (base.x.col(2 * src).cast<double>() * scale).cast<float>();
    out.x.col(2 * i + 1) = (base.x.col(2 * src + 1).cast<double>() * scale).cast<float>();
  }
  out.target = base.target;
  out.frequency_index = base.frequency_index;
  out.norm_factor = static_cast<float>(factor);
  out.scene_id = base.scene_id;
  return out;
}

namespace {

constexpr char kShardMagic[8] = {'N', 'B', 'D', 'F', 'S', 'H', 'R', 'D'};
constexpr std::uint32_t kShardVersion = 1;
constexpr std::uint32_t kDtypeFloat32 = 1;

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("shard: truncated file");
  return v;
}

}  // namespace

void write_sample_shard(const std::filesystem::path& path, std::span<const NarrowbandSample> samples) {
  if (samples.empty()) throw std::invalid_argument("shard: no samples");
  const int frames = samples[0].frames();
  const int mics = samples[0].channels();
  for (const auto& s : samples) {
    if (s.frames() != frames || s.channels() != mics || static_cast<int>(s.target.size()) != frames) {
      throw std::invalid_argument("shard: samples must share T and M");
    }
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("shard: cannot create " + path.string());
  out.write(kShardMagic, 8);
  put<std::uint32_t>(out, kShardVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(samples.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(frames));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(mics));
  put<std::uint32_t>(out, kDtypeFloat32);
  const std::string& id = samples[0].scene_id;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
  out.write(id.data(), static_cast<std::streamsize>(id.size()));
  for (const auto& s : samples) {
    put<std::int32_t>(out, s.frequency_index);
    put<float>(out, s.norm_factor);
  }
  for (const auto& s : samples) out.write(reinterpret_cast<const char*>(s.x.data()), sizeof(float) * s.x.size());
  for (const auto& s : samples)
    out.write(reinterpret_cast<const char*>(s.target.data()), sizeof(float) * s.target.size());
  if (!out) throw std::runtime_error("shard: write failed for " + path.string());
}

std::vector<NarrowbandSample> read_sample_shard(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("shard: cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kShardMagic, 8) != 0) throw std::runtime_error("shard: bad magic in " + path.string());
  if (get<std::uint32_t>(in) != kShardVersion) throw std::runtime_error("shard: unsupported version");
  const auto count = get<std::uint32_t>(in);
  const auto frames = get<std::uint32_t>(in);
  const auto mics = get<std::uint32_t>(in);
  if (get<std::uint32_t>(in) != kDtypeFloat32) throw std::runtime_error("shard: unsupported dtype");
  std::string id(get<std::uint32_t>(in), '\0');
  in.read(id.data(), static_cast<std::streamsize>(id.size()));
  std::vector<NarrowbandSample> samples(count);
  for (auto& s : samples) {
    s.frequency_index = get<std::int32_t>(in);
    s.norm_factor = get<float>(in);
    s.scene_id = id;
  }
  for (auto& s : samples) {
    s.x.resize(frames, 2 * mics);
    in.read(reinterpret_cast<char*>(s.x.data()), static_cast<std::streamsize>(sizeof(float) * s.x.size()));
  }
  for (auto& s : samples) {
    s.target.resize(frames);
    in.read(reinterpret_cast<char*>(s.target.data()), static_cast<std::streamsize>(sizeof(float) * frames));
  }
  if (!in) throw std::runtime_error("shard: truncated file " + path.string());
  return samples;
}

}  // namespace nbdf
