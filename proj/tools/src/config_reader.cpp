#include "nbdf_cli/config_reader.hpp"

#include <fstream>
#include <sstream>

namespace nbdf::cli {

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  try {
    return nlohmann::json::parse(text.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ObjectReader::ObjectReader(const nlohmann::json& value, std::string path) : value_(value), path_(std::move(path)) {
  if (!value_.is_object()) throw ConfigError((path_.empty() ? std::string("config") : path_) + ": expected an object");
}

bool ObjectReader::has(std::string_view key) const { return value_.contains(key); }

std::string ObjectReader::where(std::string_view key) const {
  return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
}

const nlohmann::json& ObjectReader::take(std::string_view key) {
  used_.emplace(key);
  return value_.at(std::string(key));
}

ObjectReader ObjectReader::object(std::string_view key) {
  if (!has(key)) throw ConfigError(where(key) + ": required key is missing");
  return ObjectReader(take(key), where(key));
}

const nlohmann::json& ObjectReader::raw(std::string_view key) {
  if (!has(key)) throw ConfigError(where(key) + ": required key is missing");
  return take(key);
}

void ObjectReader::finish() const {
  std::string unknown;
  for (const auto& [key, value] : value_.items()) {
    if (used_.count(key)) continue;
    unknown += unknown.empty() ? "" : ", ";
    unknown += where(key);
  }
  if (!unknown.empty()) throw ConfigError("unknown config key(s): " + unknown);
}

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::filesystem::path& p) {
  return (p.is_absolute() ? p : base / p).lexically_normal();
}

}  // namespace nbdf::cli
