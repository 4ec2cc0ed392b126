#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nbdf/manifest.hpp"
#include "nbdf/narrowband.hpp"
#include "nbdf/network.hpp"
#include "nbdf/stft.hpp"

namespace nbdf {

/// Mean of (pred - target)^2 over all elements. Throws on shape mismatch.
template <typename S>
double mse_loss(const nn::Mat<S>& pred, const nn::Mat<S>& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw std::invalid_argument("mse_loss: shape mismatch");
  if (pred.size() == 0) throw std::invalid_argument("mse_loss: empty input");
  return (pred.template cast<double>() - target.template cast<double>()).squaredNorm() / static_cast<double>(pred.size());
}

/// Gradient of mse_loss with respect to `pred`.
template <typename S>
nn::Mat<S> mse_loss_grad(const nn::Mat<S>& pred, const nn::Mat<S>& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw std::invalid_argument("mse_loss: shape mismatch");
  return (pred - target) * static_cast<S>(2.0 / static_cast<double>(pred.size()));
}

struct EpochRecord {
  int epoch = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;
  double wall_time = 0.0;  // seconds since training started
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 128;
  int max_epochs = 100;
  int patience = 10;
  std::uint64_t seed = 0;
  ModelConfig model;
  /// Per-epoch redraw of each training sample's channel permutation and,
  /// when `augment` is set, its magnitude gains.
  bool augment = true;
  double augment_lo = 0.75;
  double augment_hi = 1.33;
  ArrangementMode arrangement = ArrangementMode::shuffle;
  /// Random crop length for training batches (0 keeps whole sequences).
  int crop_frames = 192;
  /// Upper bound on optimizer steps per epoch (0 = one full pass).
  int max_batches_per_epoch = 0;
  int val_batch_size = 256;
  /// Called after every epoch, e.g. to stream the history to disk.
  std::function<void(const EpochRecord&)> on_epoch;

  /// Throws ConfigError on invalid settings.
  void validate() const;
};

struct TrainResult {
  Network model;
  std::vector<EpochRecord> history;
  int best_epoch = -1;
  double best_val_mse = std::numeric_limits<double>::infinity();
  bool early_stopped = false;
};

/// Mean squared error of the model over `samples`, evaluated on whole
/// sequences batched by frame count.
double evaluate_mse(const Network& model, std::span<const NarrowbandSample> samples, int batch_size = 256);

/// Trains `model` and returns the parameters of the best validation epoch.
/// Throws std::runtime_error if the loss becomes non-finite.
TrainResult train(Network model, std::span<const NarrowbandSample> train_set, std::span<const NarrowbandSample> val_set,
                  const TrainConfig& config);

struct NarrowbandSetOptions {
  StftConfig stft;
  SampleBuildOptions build;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  /// Directory for per-scene sample shards; reused when present.
  std::optional<std::filesystem::path> cache_dir;
};

/// Loads every scene of a manifest and converts it to narrowband samples
/// (one per scene and frequency), in manifest order.
std::vector<NarrowbandSample> load_narrowband_set(const std::vector<ManifestEntry>& manifest,
                                                  const NarrowbandSetOptions& options);

}  // namespace nbdf
