#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>

#include "nbdf/manifest.hpp"
#include "nbdf/parallel.hpp"
#include "nbdf/random.hpp"
#include "nbdf/sources.hpp"
#include "nbdf_cli/commands.hpp"
#include "nbdf_cli/config_reader.hpp"

namespace nbdf::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kSplitNames[] = {"train", "val", "test"};
constexpr std::uint64_t kSceneSalt = 0x7363656e;
constexpr std::uint64_t kPoolSalt = 0x706f6f6c;
constexpr std::uint64_t kArraySalt = 0x61727279;

std::uint64_t split_ordinal(const std::string& name) {
  for (std::uint64_t i = 0; i < 3; ++i)
    if (name == kSplitNames[i]) return i;
  throw ConfigError("unknown split " + name);
}

std::pair<double, double> read_range(ObjectReader& r, std::string_view key, std::pair<double, double> fallback) {
  if (!r.has(key)) return fallback;
  const auto where = r.where(key);
  const auto v = ObjectReader::convert<std::vector<double>>(r.raw(key), where);
  if (v.size() != 2) throw ConfigError(where + ": expected [lo, hi]");
  if (!(v[0] <= v[1])) throw ConfigError(where + ": lo must not exceed hi");
  return {v[0], v[1]};
}

template <typename Enum, typename Parse>
Enum parse_enum(const std::string& name, const std::string& where, Parse parse) {
  try {
    return parse(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

ArrayChoice read_array_choice(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  ArrayChoice a;
  a.tag = parse_enum<GeometryTag>(r.required<std::string>("tag"), r.where("tag"),
                                  [](const std::string& s) { return parse_geometry_tag(s); });
  a.channels = r.required<int>("channels");
  a.diameter = r.required<double>("diameter");
  r.finish();
  try {
    make_array(a.tag, a.channels, a.diameter, 0).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return a;
}

void check_exclusion_entry(const std::string& e, const std::string& where) {
  const auto slash = e.find('/');
  if (slash == std::string::npos) throw ConfigError(where + ": expected \"tag/M\" or \"tag/M/diameter\", got " + e);
  parse_enum<GeometryTag>(e.substr(0, slash), where, [](const std::string& s) { return parse_geometry_tag(s); });
}

json array_choice_json(const ArrayChoice& a) {
  return {{"tag", std::string(to_string(a.tag))}, {"channels", a.channels}, {"diameter", a.diameter}};
}

// Pool of arrays available to one split.
std::vector<ArraySpec> split_arrays(const DatasetGenConfig& config, const SplitConfig& split) {
  if (!split.arrays.empty()) {
    std::vector<ArraySpec> out;
    const auto ordinal = split_ordinal(split.name);
    for (std::size_t i = 0; i < split.arrays.size(); ++i) {
      const auto& a = split.arrays[i];
      out.push_back(make_array(a.tag, a.channels, a.diameter, derive_stream(config.seed, ordinal * 1000 + i, kArraySalt)()));
    }
    return out;
  }
  ArrayPoolOptions pool = config.pool;
  if (split.name != "test") pool.exclude.insert(pool.exclude.end(), config.holdout.begin(), config.holdout.end());
  return make_array_pool(pool, derive_stream(config.seed, 0, kPoolSalt)());
}

std::vector<std::string> sorted_keys(const std::vector<ArraySpec>& arrays) {
  std::set<std::string> keys;
  for (const auto& a : arrays) keys.insert(a.key());
  return {keys.begin(), keys.end()};
}

// Entries of an earlier run whose WAVs are all present. A torn final line is dropped.
std::map<std::string, ManifestEntry> reusable_entries(const fs::path& manifest) {
  std::map<std::string, ManifestEntry> out;
  std::ifstream in(manifest);
  if (!in) return out;
  const auto base = manifest.parent_path();
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    try {
      auto e = parse_manifest_line(line, base);
      if (fs::exists(e.mixture) && fs::exists(e.speech) && fs::exists(e.noise)) out.emplace(e.scene_id, std::move(e));
    } catch (const std::exception&) {
      continue;
    }
  }
  return out;
}

std::string scene_id(const std::string& split, std::size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_scene_%06zu", split.c_str(), index);
  return buf;
}

void write_json_atomic(const fs::path& path, const json& doc) {
  const auto tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << doc.dump(2) << "\n";
  }
  fs::rename(tmp, path);
}

json comparable_config(json config) {
  config.erase("threads");
  return config;
}

}  // namespace

std::string ArrayChoice::key_prefix() const { return std::string(to_string(tag)) + "/" + std::to_string(channels); }

DatasetGenConfig parse_dataset_gen_config(const json& doc, const fs::path& base_dir,
                                          std::optional<std::uint64_t> seed_override) {
  ObjectReader r(doc, "");
  DatasetGenConfig c;
  c.output_dir = resolve_path(base_dir, r.required<fs::path>("output_dir"));
  c.seed = r.optional<std::uint64_t>("seed", 0);
  if (seed_override) c.seed = *seed_override;
  c.sample_rate = r.optional<int>("sample_rate", c.sample_rate);
  if (c.sample_rate < 1000 || c.sample_rate > 96000) throw ConfigError("sample_rate: must be in [1000, 96000]");
  c.duration = r.optional<double>("duration", c.duration);
  if (!(c.duration > 0.1 && c.duration <= 60.0)) throw ConfigError("duration: must be in (0.1, 60] seconds");
  c.threads = r.optional<unsigned>("threads", 0);
  c.ref_index = r.optional<int>("ref_index", -1);
  if (c.ref_index < -1 || c.ref_index > 7) throw ConfigError("ref_index: must be -1 (random) or in [0, 7]");

  if (r.has("speech")) {
    auto s = r.object("speech");
    c.speech_source = s.required<std::string>("source");
    if (c.speech_source == "corpus") {
      c.corpus_dir = resolve_path(base_dir, s.required<fs::path>("dir"));
    } else if (c.speech_source != "synthetic") {
      throw ConfigError("speech.source: expected \"synthetic\" or \"corpus\"");
    }
    s.finish();
  }

  if (r.has("noise_kinds")) {
    c.noise_kinds.clear();
    for (const auto& name : r.required<std::vector<std::string>>("noise_kinds"))
      c.noise_kinds.push_back(
          parse_enum<NoiseKind>(name, "noise_kinds", [](const std::string& s) { return parse_noise_kind(s); }));
    if (c.noise_kinds.empty()) throw ConfigError("noise_kinds: must not be empty");
  }
  c.snr_db = read_range(r, "snr_db", c.snr_db);
  c.rt60 = read_range(r, "rt60", c.rt60);
  if (!(c.rt60.first > 0.0)) throw ConfigError("rt60: lower bound must be positive");

  if (r.has("array_pool")) {
    auto p = r.object("array_pool");
    if (p.has("tags")) {
      c.pool.tags.clear();
      for (const auto& t : p.required<std::vector<std::string>>("tags"))
        c.pool.tags.push_back(
            parse_enum<GeometryTag>(t, p.where("tags"), [](const std::string& s) { return parse_geometry_tag(s); }));
    }
    if (p.has("channels")) {
      const auto ch = p.required<std::vector<int>>("channels");
      if (ch.size() != 2 || ch[0] < 2 || ch[1] > 8 || ch[0] > ch[1])
        throw ConfigError(p.where("channels") + ": expected [lo, hi] within [2, 8]");
      c.pool.min_channels = ch[0];
      c.pool.max_channels = ch[1];
    }
    c.pool.diameters = p.optional<std::vector<double>>("diameters", c.pool.diameters);
    for (double d : c.pool.diameters)
      if (!(d >= 0.15 && d <= 0.5)) throw ConfigError(p.where("diameters") + ": diameters must be in [0.15, 0.5] m");
    c.pool.exclude = p.optional<std::vector<std::string>>("exclude", {});
    for (const auto& e : c.pool.exclude) check_exclusion_entry(e, p.where("exclude"));
    c.pool.max_arrays = p.optional<int>("max_arrays", 0);
    if (c.pool.max_arrays < 0) throw ConfigError(p.where("max_arrays") + ": must be non-negative");
    if (c.pool.tags.empty() || c.pool.diameters.empty()) throw ConfigError("array_pool: tags and diameters must not be empty");
    p.finish();
  }
  c.holdout = r.optional<std::vector<std::string>>("holdout", {});
  for (const auto& e : c.holdout) check_exclusion_entry(e, "holdout");

  auto splits = r.object("splits");
  for (const char* name : kSplitNames) {
    if (!splits.has(name)) continue;
    auto s = splits.object(name);
    SplitConfig split;
    split.name = name;
    split.count = s.required<std::size_t>("count");
    if (s.has("snr_db")) split.snr_db = read_range(s, "snr_db", {});
    if (s.has("arrays")) {
      const auto& list = s.raw("arrays");
      if (!list.is_array() || list.empty()) throw ConfigError(s.where("arrays") + ": expected a non-empty array");
      for (std::size_t i = 0; i < list.size(); ++i)
        split.arrays.push_back(read_array_choice(list[i], s.where("arrays") + "[" + std::to_string(i) + "]"));
    }
    s.finish();
    if (split.name != "test") {
      for (const auto& a : split.arrays) {
        const auto key = make_array(a.tag, a.channels, a.diameter, 0).key();
        if (matches_exclusion(key, c.holdout))
          throw ConfigError("splits." + split.name + ": array " + key + " is held out and cannot be used for " +
                            split.name);
      }
    }
    c.splits.push_back(std::move(split));
  }
  splits.finish();
  if (c.splits.empty()) throw ConfigError("splits: at least one of train, val, test is required");
  r.finish();
  return c;
}

json DatasetGenConfig::to_json() const {
  json j;
  j["output_dir"] = output_dir.string();
  j["seed"] = seed;
  j["sample_rate"] = sample_rate;
  j["duration"] = duration;
  j["speech"] = speech_source == "corpus" ? json{{"source", "corpus"}, {"dir", corpus_dir.string()}}
                                          : json{{"source", "synthetic"}};
  j["noise_kinds"] = json::array();
  for (auto k : noise_kinds) j["noise_kinds"].push_back(std::string(to_string(k)));
  j["snr_db"] = {snr_db.first, snr_db.second};
  j["rt60"] = {rt60.first, rt60.second};
  j["ref_index"] = ref_index;
  json tags = json::array();
  for (auto t : pool.tags) tags.push_back(std::string(to_string(t)));
  j["array_pool"] = {{"tags", tags},
                     {"channels", {pool.min_channels, pool.max_channels}},
                     {"diameters", pool.diameters},
                     {"exclude", pool.exclude},
                     {"max_arrays", pool.max_arrays}};
  j["holdout"] = holdout;
  j["splits"] = json::object();
  for (const auto& s : splits) {
    json sj{{"count", s.count}};
    if (s.snr_db) sj["snr_db"] = {s.snr_db->first, s.snr_db->second};
    if (!s.arrays.empty()) {
      sj["arrays"] = json::array();
      for (const auto& a : s.arrays) sj["arrays"].push_back(array_choice_json(a));
    }
    j["splits"][s.name] = sj;
  }
  j["threads"] = threads;
  return j;
}

DatasetGenSummary run_dataset_gen(const DatasetGenConfig& config) {
  std::shared_ptr<const SpeechSource> speech;
  if (config.speech_source == "corpus") {
    speech = std::make_shared<CorpusSpeechSource>(config.corpus_dir, config.sample_rate);
  } else {
    speech = std::make_shared<SyntheticSpeechSource>();
  }

  // Arrays are built before any file is touched so that geometry errors leave no partial output.
  std::vector<std::vector<ArraySpec>> arrays;
  for (const auto& split : config.splits) {
    arrays.push_back(split_arrays(config, split));
    if (arrays.back().empty()) throw ConfigError("splits." + split.name + ": the array pool is empty");
    if (split.name != "test") {
      for (const auto& a : arrays.back())
        if (matches_exclusion(a.key(), config.holdout))
          throw std::logic_error("dataset-gen: held-out array " + a.key() + " reached split " + split.name);
    }
  }
  SplitConfig train_pool_split;
  train_pool_split.name = "train";
  const auto train_keys = sorted_keys(split_arrays(config, train_pool_split));

  const auto meta_path = config.output_dir / "dataset.json";
  if (fs::exists(meta_path)) {
    const auto previous = read_json_file(meta_path);
    if (!previous.contains("config") || comparable_config(previous["config"]) != comparable_config(config.to_json()))
      throw ConfigError(config.output_dir.string() + " holds a dataset generated with a different configuration");
  }
  fs::create_directories(config.output_dir);

  json meta{{"format", "nbdf-dataset"}, {"version", 1}, {"config", config.to_json()}, {"complete", false}};
  meta["holdout"] = config.holdout;
  meta["train_pool"] = train_keys;
  meta["splits"] = json::object();
  for (std::size_t s = 0; s < config.splits.size(); ++s) {
    const auto& split = config.splits[s];
    const auto keys = sorted_keys(arrays[s]);
    std::vector<std::string> unseen;
    for (const auto& k : keys)
      if (!std::binary_search(train_keys.begin(), train_keys.end(), k)) unseen.push_back(k);
    std::vector<std::string> held_out;
    for (const auto& k : keys)
      if (matches_exclusion(k, config.holdout)) held_out.push_back(k);
    meta["splits"][split.name] = {{"manifest", split.name + ".jsonl"},
                                  {"count", split.count},
                                  {"arrays", keys},
                                  {"held_out_arrays", held_out},
                                  {"unseen_arrays", unseen},
                                  {"unseen_geometry", split.name != "train" && unseen.size() == keys.size()}};
  }
  write_json_atomic(meta_path, meta);

  DatasetGenSummary summary;
  for (std::size_t s = 0; s < config.splits.size(); ++s) {
    const auto& split = config.splits[s];
    SceneGeneratorConfig gen;
    gen.sample_rate = config.sample_rate;
    gen.duration = config.duration;
    const auto snr = split.snr_db.value_or(config.snr_db);
    gen.min_snr_db = snr.first;
    gen.max_snr_db = snr.second;
    gen.noise_kinds = config.noise_kinds;
    gen.placement.min_rt60 = config.rt60.first;
    gen.placement.max_rt60 = config.rt60.second;
    gen.ref_index = config.ref_index;
    const SceneGenerator generator(gen, arrays[s], speech,
                                   derive_stream(config.seed, split_ordinal(split.name), kSceneSalt)());

    const auto manifest_path = config.output_dir / (split.name + ".jsonl");
    const auto wav_dir = config.output_dir / split.name;
    auto previous = reusable_entries(manifest_path);
    std::vector<std::optional<ManifestEntry>> entries(split.count);
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < split.count; ++i) {
      auto it = previous.find(scene_id(split.name, i));
      if (it != previous.end()) {
        entries[i] = std::move(it->second);
        ++summary.reused;
      } else {
        todo.push_back(i);
      }
    }

    // Rewrite the kept entries, then append each new scene as soon as its WAVs exist.
    std::vector<ManifestEntry> kept;
    for (const auto& e : entries)
      if (e) kept.push_back(*e);
    write_manifest(manifest_path, kept);
    std::ofstream log(manifest_path, std::ios::app);
    if (!log) throw std::runtime_error("cannot append to " + manifest_path.string());
    std::mutex mutex;
    std::size_t done = 0;
    parallel_for(todo.size(), config.threads, [&](std::size_t t) {
      const std::size_t i = todo[t];
      auto scene = generator.generate(i);
      scene.scene_id = scene_id(split.name, i);
      auto entry = save_scene(scene, wav_dir);
      entry.sample_rate = config.sample_rate;
      const std::lock_guard lock(mutex);
      log << manifest_line(entry, manifest_path.parent_path()) << "\n";
      log.flush();
      entries[i] = std::move(entry);
      ++done;
      if (done % 50 == 0 || done == todo.size())
        std::cerr << "dataset-gen: " << split.name << " " << done << "/" << todo.size() << " new scenes\n";
    });
    log.close();
    summary.generated += todo.size();

    std::vector<ManifestEntry> ordered;
    for (auto& e : entries) ordered.push_back(std::move(*e));
    const auto tmp = fs::path(manifest_path.string() + ".tmp");
    write_manifest(tmp, ordered);
    fs::rename(tmp, manifest_path);
  }

  meta["complete"] = true;
  write_json_atomic(meta_path, meta);
  return summary;
}

}  // namespace nbdf::cli
