#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "nbdf/types.hpp"

namespace nbdf::cli {

/// Parses a JSON file and throws ConfigError on a missing file or a syntax error.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Strict view of one JSON object. Every accessed key is recorded and finish()
/// rejects the rest, so a misspelled key is an error instead of a silent default.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& value, std::string path);

  bool has(std::string_view key) const;

  template <typename T>
  T required(std::string_view key) {
    if (!has(key)) throw ConfigError(where(key) + ": required key is missing");
    return convert<T>(take(key), where(key));
  }

  template <typename T>
  T optional(std::string_view key, T fallback) {
    return has(key) ? convert<T>(take(key), where(key)) : std::move(fallback);
  }

  ObjectReader object(std::string_view key);
  const nlohmann::json& raw(std::string_view key);

  /// Throws ConfigError listing every key that was never read.
  void finish() const;

  const std::string& path() const { return path_; }
  std::string where(std::string_view key) const;

  template <typename T>
  static T convert(const nlohmann::json& v, const std::string& where);

 private:
  const nlohmann::json& take(std::string_view key);

  const nlohmann::json& value_;
  std::string path_;
  std::set<std::string, std::less<>> used_;
};

template <typename>
inline constexpr bool kIsVector = false;
template <typename T>
inline constexpr bool kIsVector<std::vector<T>> = true;

template <typename T>
T ObjectReader::convert(const nlohmann::json& v, const std::string& where) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError(where + ": expected a boolean");
    return v.get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)
        throw ConfigError(where + ": expected a non-negative integer");
      const auto u = v.is_number_unsigned() ? v.get<std::uint64_t>() : static_cast<std::uint64_t>(v.get<std::int64_t>());
      if (u > std::numeric_limits<T>::max()) throw ConfigError(where + ": integer out of range");
      return static_cast<T>(u);
    } else {
      const auto i = v.get<std::int64_t>();
      if (i < std::numeric_limits<T>::min() || i > std::numeric_limits<T>::max())
        throw ConfigError(where + ": integer out of range");
      return static_cast<T>(i);
    }
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    return v.get<T>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw ConfigError(where + ": expected a string");
    return v.get<std::string>();
  } else if constexpr (std::is_same_v<T, std::filesystem::path>) {
    if (!v.is_string()) throw ConfigError(where + ": expected a path string");
    return std::filesystem::path(v.get<std::string>());
  } else if constexpr (kIsVector<T>) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array");
    T out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(convert<typename T::value_type>(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
  } else {
    static_assert(sizeof(T) == 0, "unsupported config value type");
  }
}

/// Resolves `p` against `base` unless it is absolute.
std::filesystem::path resolve_path(const std::filesystem::path& base, const std::filesystem::path& p);

}  // namespace nbdf::cli
