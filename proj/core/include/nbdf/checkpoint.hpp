#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <string>

#include "nbdf/network.hpp"

namespace nbdf {

/// Everything stored next to the weights. `metadata` holds free-form
/// training-run information as string pairs.
struct CheckpointInfo {
  std::uint64_t seed = 0;
  int sample_rate = 16000;
  int win_len = 512;
  int hop = 256;
  int best_epoch = -1;
  double best_val_mse = std::numeric_limits<double>::quiet_NaN();
  int epochs_run = 0;
  std::map<std::string, std::string> metadata;
};

struct LoadedCheckpoint {
  Network network;
  CheckpointInfo info;
};

/// Writes magic, a JSON header and raw little-endian float32 tensors; the
/// layout is given in docs/file_formats.md.
void save_checkpoint(const std::filesystem::path& path, const Network& network, const CheckpointInfo& info);

/// Throws std::runtime_error on a malformed file or a tensor whose name or
/// shape disagrees with the stored configuration.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace nbdf
