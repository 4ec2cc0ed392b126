#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nbdf/random.hpp"
#include "nbdf/scene.hpp"
#include "nbdf/spectrogram.hpp"

namespace nbdf {

using RowMatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One per-frequency training unit. Columns 2m and 2m+1 of `x` hold the real
/// and imaginary parts of input channel m; channel 0 is always the reference.
struct NarrowbandSample {
  RowMatrixF x;                // [T x 2M]
  std::vector<float> target;   // [T], magnitude ratio mask in [0, 1]
  int frequency_index = 0;
  float norm_factor = 1.0f;    // divisor applied to the raw mixture
  std::string scene_id;

  int frames() const { return static_cast<int>(x.rows()); }
  int channels() const { return static_cast<int>(x.cols() / 2); }
};

struct ArrangedSpectrogram {
  Spectrogram spec;
  std::vector<int> order;  // output channel i = input channel order[i]
};

/// Reference first, remaining channels uniformly shuffled.
std::vector<int> shuffled_order(int channels, int ref_index, Rng& rng);
/// Reference first, remaining channels in ascending index order.
std::vector<int> natural_order(int channels, int ref_index);

ArrangedSpectrogram arrange_channels(const Spectrogram& spec, int ref_index, Rng& rng);

enum class AugmentMode {
  per_mic_frequency,  // one gain per (microphone, frequency)
  per_mic             // one gain per microphone, shared across frequencies
};

struct AugmentedSpectra {
  SceneSpectra spectra;
  RealMatrix gains;  // [M x K]
};

/// Multiplies speech, noise and mixture by the same random real gain at each
/// (microphone, frequency). Throws std::invalid_argument unless 0 < lo <= hi.
AugmentedSpectra magnitude_augment(const SceneSpectra& scene, Rng& rng, double lo = 0.75, double hi = 1.33,
                                   AugmentMode mode = AugmentMode::per_mic_frequency);

/// min(|S| / max(|X|, eps), 1) per frame.
std::vector<double> compute_mrm(std::span<const Complex> speech_ref, std::span<const Complex> mixture_ref);

enum class ArrangementMode { shuffle, natural };
enum class NormalizationScope { per_frequency, per_utterance };

struct SampleBuildOptions {
  bool augment = false;
  double augment_lo = 0.75;
  double augment_hi = 1.33;
  AugmentMode augment_mode = AugmentMode::per_mic_frequency;
  ArrangementMode arrangement = ArrangementMode::shuffle;
  NormalizationScope normalization = NormalizationScope::per_frequency;
};

/// One sample per frequency bin: optional augmentation, channel arrangement,
/// mixture normalization, MRM target at the reference channel.
std::vector<NarrowbandSample> build_narrowband_samples(const SceneSpectra& scene, int ref_index, Rng& rng,
                                                       const SampleBuildOptions& options = {},
                                                       const std::string& scene_id = {});

/// Redraws the non-reference permutation and, if enabled, the per-microphone
/// gains of an already built sample. Equivalent to rebuilding it from the
/// scene with fresh random draws, because the mask is invariant to coherent
/// gains and the normalization divides out the reference gain.
NarrowbandSample redraw_sample(const NarrowbandSample& base, Rng& rng, const SampleBuildOptions& options);

/// Binary cache of one scene's samples; the layout is given in docs/file_formats.md.
void write_sample_shard(const std::filesystem::path& path, std::span<const NarrowbandSample> samples);
std::vector<NarrowbandSample> read_sample_shard(const std::filesystem::path& path);

}  // namespace nbdf
