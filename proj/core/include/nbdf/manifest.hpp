#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nbdf/scene.hpp"

namespace nbdf {

/// One line of a dataset manifest. WAV paths are stored relative to the
/// manifest's directory and resolved to absolute paths on read.
struct ManifestEntry {
  std::string scene_id;
  std::filesystem::path mixture;
  std::filesystem::path speech;
  std::filesystem::path noise;
  ArraySpec array;
  int ref_index = 0;
  double snr_db = 0.0;
  double rt60 = 0.0;
  NoiseKind noise_kind = NoiseKind::white;
  std::uint64_t seed = 0;
  int sample_rate = 16000;
};

std::string manifest_line(const ManifestEntry& entry, const std::filesystem::path& base_dir);
ManifestEntry parse_manifest_line(const std::string& line, const std::filesystem::path& base_dir);

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

/// Loads the three component WAVs of a manifest entry.
SceneSample load_scene(const ManifestEntry& entry);

/// Writes component WAVs next to `dir` and returns the corresponding entry.
ManifestEntry save_scene(const SceneSample& scene, const std::filesystem::path& dir);

}  // namespace nbdf
