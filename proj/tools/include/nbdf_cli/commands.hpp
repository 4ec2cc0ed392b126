#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nbdf/array_geometry.hpp"
#include "nbdf/metrics.hpp"
#include "nbdf/scene.hpp"
#include "nbdf/training.hpp"

namespace nbdf::cli {

/// Exit codes of the nbdf tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

/// Environment variable naming the narrowband sample cache directory.
inline constexpr const char* kCacheDirEnv = "NBDF_CACHE_DIR";

struct ArrayChoice {
  GeometryTag tag = GeometryTag::circular;
  int channels = 2;
  double diameter = 0.2;

  std::string key_prefix() const;
};

struct SplitConfig {
  std::string name;  // train, val or test
  std::size_t count = 0;
  std::optional<std::pair<double, double>> snr_db;
  /// Explicit arrays; empty draws from the pool.
  std::vector<ArrayChoice> arrays;
};

struct DatasetGenConfig {
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  int sample_rate = 16000;
  double duration = 3.0;
  std::string speech_source = "synthetic";
  std::filesystem::path corpus_dir;
  std::vector<NoiseKind> noise_kinds{NoiseKind::babble, NoiseKind::white, NoiseKind::wind_lf};
  std::pair<double, double> snr_db{-5.0, 10.0};
  std::pair<double, double> rt60{0.14, 1.0};
  int ref_index = -1;
  ArrayPoolOptions pool;
  /// Keys or "tag/M" prefixes never placed in the train or val splits.
  std::vector<std::string> holdout;
  std::vector<SplitConfig> splits;
  unsigned threads = 0;

  nlohmann::json to_json() const;
};

struct TrainCommandConfig {
  std::filesystem::path train_manifest;
  std::filesystem::path val_manifest;
  std::filesystem::path output;
  std::filesystem::path history;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  TrainConfig train;

  nlohmann::json to_json() const;
};

struct EnhanceArgs {
  std::filesystem::path model;
  std::filesystem::path input;
  std::filesystem::path output;
  int ref_channel = 0;
  int batch_size = 64;
  unsigned threads = 0;
  bool resample = false;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

struct ModelSystem {
  std::string name;
  std::filesystem::path checkpoint;
};

struct EvaluateArgs {
  std::filesystem::path manifest;
  std::vector<std::string> baselines;
  std::vector<ModelSystem> models;
  std::filesystem::path output_csv;
  std::optional<std::filesystem::path> output_json;
  std::optional<std::filesystem::path> pesq;
  int batch_size = 64;
  unsigned threads = 1;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

/// Each parser validates the whole document before returning and throws
/// ConfigError on unknown keys, wrong types or out-of-range values. Relative
/// paths are resolved against the config file's directory. A present
/// `seed_override` replaces the file's seed.
DatasetGenConfig parse_dataset_gen_config(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                                          std::optional<std::uint64_t> seed_override = std::nullopt);
TrainCommandConfig parse_train_config(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                                      std::optional<std::uint64_t> seed_override = std::nullopt);

/// Throws ConfigError on inconsistent arguments.
void validate(const EnhanceArgs& args);
void validate(const EvaluateArgs& args);

struct DatasetGenSummary {
  std::size_t generated = 0;
  std::size_t reused = 0;
};

/// Writes <output_dir>/<split>.jsonl, the scene WAVs under <output_dir>/<split>/wav
/// and <output_dir>/dataset.json. Scenes already listed with their WAVs present
/// are kept, so an interrupted run can be resumed.
DatasetGenSummary run_dataset_gen(const DatasetGenConfig& config);

/// Trains, streams the epoch history to JSONL and writes the best checkpoint.
TrainResult run_train(const TrainCommandConfig& config);

void run_enhance(const EnhanceArgs& args);
EvaluationReport run_evaluate(const EvaluateArgs& args);

/// Entry point shared by the executable and the tests. Maps ConfigError to
/// kExitConfigError and every other exception to kExitRuntimeError.
int run_cli(int argc, char** argv);

}  // namespace nbdf::cli
