#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "nbdf/types.hpp"

namespace nbdf {

using Point3 = Eigen::Vector3d;

enum class GeometryTag { linear, circular, circular_center, nonuniform_linear, adhoc };

std::string_view to_string(GeometryTag tag);
GeometryTag parse_geometry_tag(std::string_view name);

/// Microphone layout relative to the array centroid, in meters.
struct ArraySpec {
  std::vector<Point3> mic_positions;
  GeometryTag tag = GeometryTag::linear;
  double diameter = 0.0;

  int channels() const { return static_cast<int>(mic_positions.size()); }
  double distance(int i, int j) const { return (mic_positions[i] - mic_positions[j]).norm(); }
  double max_pairwise_distance() const;
  double min_pairwise_distance() const;

  /// Throws std::invalid_argument unless positions are distinct and fit the diameter.
  void validate() const;

  /// Stable identifier such as "circular/6/0.2000", used for split bookkeeping.
  std::string key() const;
};

inline constexpr double kMinRandomSpacing = 0.02;

/// Builds a virtual array. nonuniform_linear draws random gaps of at least
/// kMinRandomSpacing; adhoc uses rejection sampling with the same spacing and
/// throws std::runtime_error when no layout is found within the retry budget.
ArraySpec make_array(GeometryTag tag, int channels, double diameter, std::uint64_t seed);

/// Five evenly spaced diameters covering [0.15, 0.5] m.
std::vector<double> default_diameters();

struct ArrayPoolOptions {
  std::vector<GeometryTag> tags{GeometryTag::linear, GeometryTag::circular, GeometryTag::circular_center,
                                GeometryTag::nonuniform_linear, GeometryTag::adhoc};
  int min_channels = 2;
  int max_channels = 8;
  std::vector<double> diameters = default_diameters();
  /// Keys (ArraySpec::key) or "tag/M" prefixes to leave out of the pool.
  std::vector<std::string> exclude;
  /// Keep at most this many arrays (0 keeps all), chosen by seeded shuffle.
  int max_arrays = 0;
};

std::vector<ArraySpec> make_array_pool(const ArrayPoolOptions& options, std::uint64_t seed);

/// True when `key` is excluded by an entry that is either an exact key or a "tag/M" prefix.
bool matches_exclusion(const std::string& key, const std::vector<std::string>& exclude);

}  // namespace nbdf
