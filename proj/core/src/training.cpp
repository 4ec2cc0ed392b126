#include "nbdf/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "nbdf/optim.hpp"
#include "nbdf/parallel.hpp"
#include "nbdf/random.hpp"
#include "nbdf/types.hpp"

namespace nbdf {
namespace {

using Clock = std::chrono::steady_clock;

// FNV-1a over the mixture path and size, separating scenes that share an id.
std::string source_fingerprint(const ManifestEntry& entry) {
  std::uint64_t h = 1469598103934665603ull;
  const auto mix = [&](std::uint64_t byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (unsigned char c : entry.mixture.lexically_normal().string()) mix(c);
  std::error_code ec;
  const auto size = std::filesystem::file_size(entry.mixture, ec);
  for (int i = 0; i < 8; ++i) mix((ec ? 0 : size) >> (8 * i) & 0xff);
  for (int i = 0; i < 8; ++i) mix(entry.seed >> (8 * i) & 0xff);
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

/// Contiguous storage for one batch of equally long sequences.
struct BatchBuffer {
  std::vector<std::vector<float>> inputs;
  std::vector<nn::SequenceView<float>> views;
  nn::Mat<float> target;

  void assign(std::size_t count, int frames) {
    inputs.resize(count);
    views.resize(count);
    target.resize(static_cast<Eigen::Index>(count), frames);
  }

  void set(std::size_t b, const NarrowbandSample& s, int offset, int frames) {
    const int width = static_cast<int>(s.x.cols());
    auto& buf = inputs[b];
    buf.resize(static_cast<std::size_t>(frames) * width);
    Eigen::Map<RowMatrixF>(buf.data(), frames, width) = s.x.middleRows(offset, frames);
    views[b] = {buf.data(), frames, width};
    for (int t = 0; t < frames; ++t) target(static_cast<Eigen::Index>(b), t) = s.target[static_cast<std::size_t>(offset + t)];
  }
};

std::vector<nn::Mat<float>> snapshot(const Network& net) {
  std::vector<nn::Mat<float>> out;
  for (const auto* p : net.parameters()) out.push_back(p->value);
  return out;
}

void restore(Network& net, const std::vector<nn::Mat<float>>& values) {
  auto params = net.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = values[i];
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("train: learning_rate must be >= 0");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (max_epochs < 1) throw ConfigError("train: max_epochs must be >= 1");
  if (patience < 1) throw ConfigError("train: patience must be >= 1");
  if (crop_frames < 0) throw ConfigError("train: crop_frames must be >= 0");
  if (max_batches_per_epoch < 0) throw ConfigError("train: max_batches_per_epoch must be >= 0");
  if (val_batch_size < 1) throw ConfigError("train: val_batch_size must be >= 1");
  if (augment && !(augment_lo > 0.0 && augment_lo <= augment_hi))
    throw ConfigError("train: magnitude augmentation requires 0 < augment_lo <= augment_hi");
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

double evaluate_mse(const Network& model, std::span<const NarrowbandSample> samples, int batch_size) {
  if (samples.empty()) throw std::invalid_argument("evaluate_mse: no samples");
  std::map<int, std::vector<std::size_t>> by_frames;
  for (std::size_t i = 0; i < samples.size(); ++i) by_frames[samples[i].frames()].push_back(i);
  double sum = 0.0;
  double count = 0.0;
  BatchBuffer buffer;
  for (const auto& [frames, indices] : by_frames) {
    for (std::size_t begin = 0; begin < indices.size(); begin += static_cast<std::size_t>(batch_size)) {
      const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(batch_size), indices.size() - begin);
      buffer.assign(n, frames);
      for (std::size_t b = 0; b < n; ++b) buffer.set(b, samples[indices[begin + b]], 0, frames);
      const auto pred = model.forward(buffer.views);
      sum += mse_loss(pred, buffer.target) * static_cast<double>(pred.size());
      count += static_cast<double>(pred.size());
    }
  }
  return sum / count;
}

TrainResult train(Network model, std::span<const NarrowbandSample> train_set, std::span<const NarrowbandSample> val_set,
                  const TrainConfig& config) {
  config.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  if (val_set.empty()) throw std::invalid_argument("train: empty validation set");
  for (const auto* set : {&train_set, &val_set})
    for (const auto& s : *set) model.check_channels(s.channels());

  SampleBuildOptions redraw;
  redraw.augment = config.augment;
  redraw.augment_lo = config.augment_lo;
  redraw.augment_hi = config.augment_hi;
  redraw.arrangement = config.arrangement;
  const bool refresh = config.augment || config.arrangement == ArrangementMode::shuffle;

  Rng rng = derive_stream(config.seed, 0, 0x7472616e);
  Adam<float> adam(model.parameters(), config.learning_rate);
  TrainResult result{model, {}, -1, std::numeric_limits<double>::infinity(), false};
  auto best = snapshot(model);
  int since_best = 0;
  const auto start = Clock::now();

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t bs = static_cast<std::size_t>(config.batch_size);
  std::size_t batches = (order.size() + bs - 1) / bs;
  if (config.max_batches_per_epoch > 0) batches = std::min<std::size_t>(batches, config.max_batches_per_epoch);

  BatchBuffer buffer;
  NetworkWorkspace<float> ws;
  std::vector<NarrowbandSample> drawn;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double sum = 0.0;
    double count = 0.0;
    for (std::size_t bi = 0; bi < batches; ++bi) {
      const std::size_t begin = bi * bs;
      const std::size_t n = std::min(bs, order.size() - begin);
      drawn.clear();
      int frames = std::numeric_limits<int>::max();
      for (std::size_t b = 0; b < n; ++b) {
        const auto& base = train_set[order[begin + b]];
        drawn.push_back(refresh ? redraw_sample(base, rng, redraw) : base);
        frames = std::min(frames, base.frames());
      }
      if (config.crop_frames > 0) frames = std::min(frames, config.crop_frames);
      buffer.assign(n, frames);
      for (std::size_t b = 0; b < n; ++b) {
        const int offset = uniform_int(rng, 0, drawn[b].frames() - frames);
        buffer.set(b, drawn[b], offset, frames);
      }
      model.zero_grad();
      const auto pred = model.forward_train(buffer.views, ws);
      const double loss = mse_loss(pred, buffer.target);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("training diverged: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                 std::to_string(bi + 1) + "; try a lower learning_rate");
      }
      model.backward(ws, mse_loss_grad(pred, buffer.target));
      adam.step();
      sum += loss * static_cast<double>(pred.size());
      count += static_cast<double>(pred.size());
    }
    EpochRecord record;
    record.epoch = epoch;
    record.train_mse = sum / count;
    record.val_mse = evaluate_mse(model, val_set, config.val_batch_size);
    record.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    if (!std::isfinite(record.val_mse))
      throw std::runtime_error("training diverged: non-finite validation loss at epoch " + std::to_string(epoch));
    result.history.push_back(record);
    if (config.on_epoch) config.on_epoch(record);
    if (record.val_mse < result.best_val_mse) {
      result.best_val_mse = record.val_mse;
      result.best_epoch = epoch;
      best = snapshot(model);
      since_best = 0;
    } else if (++since_best >= config.patience) {
      result.early_stopped = true;
      break;
    }
  }
  restore(model, best);
  result.model = std::move(model);
  return result;
}

std::vector<NarrowbandSample> load_narrowband_set(const std::vector<ManifestEntry>& manifest,
                                                  const NarrowbandSetOptions& options) {
  if (manifest.empty()) throw std::invalid_argument("load_narrowband_set: empty manifest");
  std::vector<std::vector<NarrowbandSample>> per_scene(manifest.size());
  char tag[96];
  std::snprintf(tag, sizeof(tag), "w%d-h%d-a%d-r%d-n%d-s%llu", options.stft.win_len, options.stft.hop,
                options.build.augment ? 1 : 0, options.build.arrangement == ArrangementMode::shuffle ? 1 : 0,
                options.build.normalization == NormalizationScope::per_frequency ? 0 : 1,
                static_cast<unsigned long long>(options.seed));
  parallel_for(manifest.size(), options.threads, [&](std::size_t i) {
    const auto& entry = manifest[i];
    std::optional<std::filesystem::path> shard;
    if (options.cache_dir) shard = *options.cache_dir / (entry.scene_id + "-" + source_fingerprint(entry) + "-" + tag + ".shard");
    if (shard && std::filesystem::exists(*shard)) {
      per_scene[i] = read_sample_shard(*shard);
      return;
    }
    const auto scene = load_scene(entry);
    const auto spectra = analyze_scene(scene, options.stft);
    Rng rng = derive_stream(options.seed, i, 0x6e617262);
    per_scene[i] = build_narrowband_samples(spectra, scene.ref_index, rng, options.build, entry.scene_id);
    if (shard) write_sample_shard(*shard, per_scene[i]);
  });
  std::vector<NarrowbandSample> out;
  for (auto& scene : per_scene)
    for (auto& s : scene) out.push_back(std::move(s));
  return out;
}

}  // namespace nbdf
