#include "nbdf/manifest.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "nbdf/wav_io.hpp"

namespace nbdf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json array_to_json(const ArraySpec& a) {
  json positions = json::array();
  for (const auto& p : a.mic_positions) positions.push_back({p.x(), p.y(), p.z()});
  return {{"tag", std::string(to_string(a.tag))}, {"diameter", a.diameter}, {"positions", positions}};
}

ArraySpec array_from_json(const json& j) {
  ArraySpec a;
  a.tag = parse_geometry_tag(j.at("tag").get<std::string>());
  a.diameter = j.at("diameter").get<double>();
  for (const auto& p : j.at("positions")) {
    if (p.size() != 3) throw std::runtime_error("manifest: positions must be 3-vectors");
    a.mic_positions.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
  }
  return a;
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  if (base.empty()) return p.generic_string();
  return fs::path(p).lexically_relative(base).generic_string();
}

}  // namespace

std::string manifest_line(const ManifestEntry& e, const fs::path& base_dir) {
  json j = {{"scene_id", e.scene_id},
            {"mixture", relative_to(e.mixture, base_dir)},
            {"speech", relative_to(e.speech, base_dir)},
            {"noise", relative_to(e.noise, base_dir)},
            {"array", array_to_json(e.array)},
            {"ref_index", e.ref_index},
            {"snr_db", e.snr_db},
            {"rt60", e.rt60},
            {"noise_kind", std::string(to_string(e.noise_kind))},
            {"seed", e.seed},
            {"sample_rate", e.sample_rate}};
  return j.dump();
}

ManifestEntry parse_manifest_line(const std::string& line, const fs::path& base_dir) {
  const json j = json::parse(line);
  ManifestEntry e;
  e.scene_id = j.at("scene_id").get<std::string>();
  auto resolve = [&](const char* key) {
    fs::path p = j.at(key).get<std::string>();
    return p.is_absolute() ? p : base_dir / p;
  };
  e.mixture = resolve("mixture");
  e.speech = resolve("speech");
  e.noise = resolve("noise");
  e.array = array_from_json(j.at("array"));
  e.ref_index = j.at("ref_index").get<int>();
  e.snr_db = j.at("snr_db").get<double>();
  e.rt60 = j.at("rt60").get<double>();
  e.noise_kind = parse_noise_kind(j.at("noise_kind").get<std::string>());
  e.seed = j.at("seed").get<std::uint64_t>();
  e.sample_rate = j.value("sample_rate", 16000);
  if (e.ref_index < 0 || e.ref_index >= e.array.channels()) {
    throw std::runtime_error("manifest: ref_index out of range for scene " + e.scene_id);
  }
  return e;
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("manifest: cannot open " + path.string());
  const fs::path base = fs::absolute(path).parent_path();
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_manifest_line(line, base));
    } catch (const std::exception& ex) {
      throw std::runtime_error("manifest " + path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return out;
}

void write_manifest(const fs::path& path, const std::vector<ManifestEntry>& entries) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path base = fs::absolute(path).parent_path();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("manifest: cannot create " + path.string());
  for (const auto& e : entries) out << manifest_line(e, base) << '\n';
}

SceneSample load_scene(const ManifestEntry& e) {
  WavReadOptions opts;
  opts.expected_sample_rate = e.sample_rate;
  SceneSample s;
  s.scene_id = e.scene_id;
  s.mixture = read_wav(e.mixture, opts);
  s.speech_image = read_wav(e.speech, opts);
  s.noise = read_wav(e.noise, opts);
  if (s.mixture.channels() != e.array.channels()) {
    throw std::runtime_error("scene " + e.scene_id + ": WAV channel count does not match the array");
  }
  s.array = e.array;
  s.ref_index = e.ref_index;
  s.snr_db = e.snr_db;
  s.rt60 = e.rt60;
  s.noise_kind = e.noise_kind;
  s.seed = e.seed;
  return s;
}

ManifestEntry save_scene(const SceneSample& scene, const fs::path& dir) {
  ManifestEntry e;
  e.scene_id = scene.scene_id;
  e.mixture = fs::absolute(dir / "wav" / (scene.scene_id + "_mixture.wav"));
  e.speech = fs::absolute(dir / "wav" / (scene.scene_id + "_speech.wav"));
  e.noise = fs::absolute(dir / "wav" / (scene.scene_id + "_noise.wav"));
  write_wav(e.mixture, scene.mixture);
  write_wav(e.speech, scene.speech_image);
  write_wav(e.noise, scene.noise);
  e.array = scene.array;
  e.ref_index = scene.ref_index;
  e.snr_db = scene.snr_db;
  e.rt60 = scene.rt60;
  e.noise_kind = scene.noise_kind;
  e.seed = scene.seed;
  e.sample_rate = scene.mixture.sample_rate();
  return e;
}

}  // namespace nbdf
