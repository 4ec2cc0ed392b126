#include <cstdlib>
#include <fstream>
#include <iostream>

#include "nbdf/checkpoint.hpp"
#include "nbdf/manifest.hpp"
#include "nbdf/random.hpp"
#include "nbdf_cli/commands.hpp"
#include "nbdf_cli/config_reader.hpp"

namespace nbdf::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kInitSalt = 0x696e6974;

nn::Activation parse_activation(const std::string& name, const std::string& where) {
  if (name == "relu") return nn::Activation::relu;
  if (name == "tanh") return nn::Activation::tanh;
  if (name == "identity") return nn::Activation::identity;
  throw ConfigError(where + ": expected relu, tanh or identity");
}

std::string activation_name(nn::Activation a) {
  switch (a) {
    case nn::Activation::relu: return "relu";
    case nn::Activation::tanh: return "tanh";
    case nn::Activation::identity: return "identity";
  }
  return "relu";
}

void read_model(ObjectReader r, ModelConfig& m) {
  try {
    m.variant = parse_variant(r.optional<std::string>("variant", std::string(to_string(m.variant))));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(r.where("variant") + ": " + e.what());
  }
  m.h1 = r.optional<int>("h1", m.h1);
  m.h2 = r.optional<int>("h2", m.h2);
  m.max_channels = r.optional<int>("max_channels", m.max_channels);
  m.cc_feature_maps = r.optional<int>("cc_feature_maps", m.cc_feature_maps);
  if (r.has("cc_activation"))
    m.cc_activation = parse_activation(r.required<std::string>("cc_activation"), r.where("cc_activation"));
  m.input_channels = r.optional<int>("input_channels", m.input_channels);
  r.finish();
}

void read_training(ObjectReader r, TrainConfig& t) {
  t.learning_rate = r.optional<double>("learning_rate", t.learning_rate);
  t.batch_size = r.optional<int>("batch_size", t.batch_size);
  t.max_epochs = r.optional<int>("max_epochs", t.max_epochs);
  t.patience = r.optional<int>("patience", t.patience);
  t.augment = r.optional<bool>("augment", t.augment);
  if (r.has("augment_range")) {
    const auto v = r.required<std::vector<double>>("augment_range");
    if (v.size() != 2) throw ConfigError(r.where("augment_range") + ": expected [lo, hi]");
    t.augment_lo = v[0];
    t.augment_hi = v[1];
  }
  const auto arrangement = r.optional<std::string>("arrangement", "shuffle");
  if (arrangement == "shuffle") t.arrangement = ArrangementMode::shuffle;
  else if (arrangement == "natural") t.arrangement = ArrangementMode::natural;
  else throw ConfigError(r.where("arrangement") + ": expected shuffle or natural");
  t.crop_frames = r.optional<int>("crop_frames", t.crop_frames);
  t.max_batches_per_epoch = r.optional<int>("max_batches_per_epoch", t.max_batches_per_epoch);
  t.val_batch_size = r.optional<int>("val_batch_size", t.val_batch_size);
  r.finish();
}

std::vector<ManifestEntry> read_manifest_checked(const fs::path& path, const char* what) {
  auto m = read_manifest(path);
  if (m.empty()) throw std::runtime_error(std::string(what) + " manifest " + path.string() + " is empty");
  return m;
}

}  // namespace

TrainCommandConfig parse_train_config(const json& doc, const fs::path& base_dir,
                                      std::optional<std::uint64_t> seed_override) {
  ObjectReader r(doc, "");
  TrainCommandConfig c;
  c.train_manifest = resolve_path(base_dir, r.required<fs::path>("train_manifest"));
  c.val_manifest = resolve_path(base_dir, r.required<fs::path>("val_manifest"));
  c.output = resolve_path(base_dir, r.required<fs::path>("output"));
  c.history = r.has("history") ? resolve_path(base_dir, r.required<fs::path>("history"))
                               : fs::path(c.output.string() + ".history.jsonl");
  c.seed = r.optional<std::uint64_t>("seed", 0);
  if (seed_override) c.seed = *seed_override;
  c.threads = r.optional<unsigned>("threads", 0);
  if (r.has("model")) read_model(r.object("model"), c.train.model);
  if (r.has("training")) read_training(r.object("training"), c.train);
  r.finish();
  c.train.seed = c.seed;
  c.train.validate();
  return c;
}

json TrainCommandConfig::to_json() const {
  const auto& m = train.model;
  return {{"train_manifest", train_manifest.string()},
          {"val_manifest", val_manifest.string()},
          {"output", output.string()},
          {"history", history.string()},
          {"seed", seed},
          {"threads", threads},
          {"model",
           {{"variant", std::string(to_string(m.variant))},
            {"h1", m.h1},
            {"h2", m.h2},
            {"max_channels", m.max_channels},
            {"cc_feature_maps", m.cc_feature_maps},
            {"cc_activation", activation_name(m.cc_activation)},
            {"input_channels", m.input_channels}}},
          {"training",
           {{"learning_rate", train.learning_rate},
            {"batch_size", train.batch_size},
            {"max_epochs", train.max_epochs},
            {"patience", train.patience},
            {"augment", train.augment},
            {"augment_range", {train.augment_lo, train.augment_hi}},
            {"arrangement", train.arrangement == ArrangementMode::shuffle ? "shuffle" : "natural"},
            {"crop_frames", train.crop_frames},
            {"max_batches_per_epoch", train.max_batches_per_epoch},
            {"val_batch_size", train.val_batch_size}}}};
}

TrainResult run_train(const TrainCommandConfig& config) {
  const auto train_manifest = read_manifest_checked(config.train_manifest, "train");
  const auto val_manifest = read_manifest_checked(config.val_manifest, "validation");
  const int rate = train_manifest.front().sample_rate;
  for (const auto* m : {&train_manifest, &val_manifest})
    for (const auto& e : *m)
      if (e.sample_rate != rate)
        throw std::runtime_error("train: scene " + e.scene_id + " has sample rate " + std::to_string(e.sample_rate) +
                                 ", expected " + std::to_string(rate));

  TrainCommandConfig resolved = config;
  const auto& model = resolved.train.model;

  NarrowbandSetOptions load;
  load.stft = StftConfig::for_sample_rate(rate);
  load.build.augment = false;
  load.build.arrangement = ArrangementMode::natural;
  load.seed = config.seed;
  load.threads = config.threads;
  if (const char* dir = std::getenv(kCacheDirEnv); dir && *dir) {
    load.cache_dir = fs::path(dir);
    fs::create_directories(*load.cache_dir);
  }
  const auto train_set = load_narrowband_set(train_manifest, load);
  const auto val_set = load_narrowband_set(val_manifest, load);
  std::cerr << "train: " << train_set.size() << " training and " << val_set.size() << " validation samples\n";

  if (config.output.has_parent_path()) fs::create_directories(config.output.parent_path());
  if (config.history.has_parent_path()) fs::create_directories(config.history.parent_path());
  std::ofstream history(config.history, std::ios::trunc);
  if (!history) throw std::runtime_error("cannot write history file " + config.history.string());
  resolved.train.on_epoch = [&](const EpochRecord& r) {
    history << json{{"epoch", r.epoch}, {"train_mse", r.train_mse}, {"val_mse", r.val_mse}, {"wall_time", r.wall_time}}
                   .dump()
            << "\n";
    history.flush();
    std::cerr << "train: epoch " << r.epoch << " train_mse " << r.train_mse << " val_mse " << r.val_mse << "\n";
  };

  auto result = train(Network(model, derive_stream(config.seed, 0, kInitSalt)()), train_set, val_set, resolved.train);

  CheckpointInfo info;
  info.seed = config.seed;
  info.sample_rate = rate;
  info.win_len = load.stft.win_len;
  info.hop = load.stft.hop;
  info.best_epoch = result.best_epoch;
  info.best_val_mse = result.best_val_mse;
  info.epochs_run = static_cast<int>(result.history.size());
  info.metadata["train_manifest"] = config.train_manifest.string();
  info.metadata["val_manifest"] = config.val_manifest.string();
  info.metadata["history"] = config.history.string();
  info.metadata["early_stopped"] = result.early_stopped ? "true" : "false";
  info.metadata["config"] = resolved.to_json().dump();
  save_checkpoint(config.output, result.model, info);
  return result;
}

}  // namespace nbdf::cli
