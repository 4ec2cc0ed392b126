#include "nbdf/array_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "nbdf/random.hpp"

namespace nbdf {

namespace {

constexpr int kMaxLayoutRetries = 10000;

bool spacing_ok(const std::vector<Point3>& points, const Point3& candidate) {
  return std::all_of(points.begin(), points.end(),
                     [&](const Point3& p) { return (p - candidate).norm() >= kMinRandomSpacing; });
}

void center(std::vector<Point3>& points) {
  Point3 c = Point3::Zero();
  for (const auto& p : points) c += p;
  c /= static_cast<double>(points.size());
  for (auto& p : points) p -= c;
}

}  // namespace

std::string_view to_string(GeometryTag tag) {
  switch (tag) {
    case GeometryTag::linear: return "linear";
    case GeometryTag::circular: return "circular";
    case GeometryTag::circular_center: return "circular_center";
    case GeometryTag::nonuniform_linear: return "nonuniform_linear";
    case GeometryTag::adhoc: return "adhoc";
  }
  return "unknown";
}

GeometryTag parse_geometry_tag(std::string_view name) {
  for (auto tag : {GeometryTag::linear, GeometryTag::circular, GeometryTag::circular_center,
                   GeometryTag::nonuniform_linear, GeometryTag::adhoc}) {
    if (to_string(tag) == name) return tag;
  }
  throw std::invalid_argument("unknown geometry tag: " + std::string(name));
}

double ArraySpec::max_pairwise_distance() const {
  double best = 0.0;
  for (int i = 0; i < channels(); ++i)
    for (int j = i + 1; j < channels(); ++j) best = std::max(best, distance(i, j));
  return best;
}

double ArraySpec::min_pairwise_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < channels(); ++i)
    for (int j = i + 1; j < channels(); ++j) best = std::min(best, distance(i, j));
  return best;
}

void ArraySpec::validate() const {
  if (channels() < 1) throw std::invalid_argument("array: no microphones");
  if (channels() > 1 && min_pairwise_distance() <= 0.0) throw std::invalid_argument("array: coincident microphones");
  if (max_pairwise_distance() > diameter + 1e-6) throw std::invalid_argument("array: microphones exceed diameter");
}

std::string ArraySpec::key() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s/%d/%.4f", std::string(to_string(tag)).c_str(), channels(), diameter);
  return buf;
}

ArraySpec make_array(GeometryTag tag, int channels, double diameter, std::uint64_t seed) {
  if (channels < 2 || channels > 8) throw std::invalid_argument("make_array: channel count must be in [2, 8]");
  if (!(diameter >= 0.15 - 1e-12 && diameter <= 0.5 + 1e-12)) {
    throw std::invalid_argument("make_array: diameter must be in [0.15, 0.5] m");
  }
  ArraySpec spec;
  spec.tag = tag;
  spec.diameter = diameter;
  auto& pos = spec.mic_positions;
  const double radius = diameter / 2.0;
  Rng rng = derive_stream(seed, static_cast<std::uint64_t>(tag), static_cast<std::uint64_t>(channels));

  switch (tag) {
    case GeometryTag::linear:
      for (int m = 0; m < channels; ++m) pos.emplace_back(-radius + diameter * m / (channels - 1), 0.0, 0.0);
      break;
    case GeometryTag::circular:
      for (int m = 0; m < channels; ++m) {
        const double a = 2.0 * std::numbers::pi * m / channels;
        pos.emplace_back(radius * std::cos(a), radius * std::sin(a), 0.0);
      }
      break;
    case GeometryTag::circular_center:
      for (int m = 0; m < channels - 1; ++m) {
        const double a = 2.0 * std::numbers::pi * m / (channels - 1);
        pos.emplace_back(radius * std::cos(a), radius * std::sin(a), 0.0);
      }
      pos.emplace_back(0.0, 0.0, 0.0);
      break;
    case GeometryTag::nonuniform_linear: {
      if ((channels - 1) * kMinRandomSpacing > diameter) throw std::runtime_error("make_array: infeasible spacing");
      // Gaps are the minimum spacing plus a Dirichlet share of the remaining length.
      std::exponential_distribution<double> share(1.0);
      std::vector<double> gaps(static_cast<std::size_t>(channels - 1));
      double total = 0.0;
      for (auto& g : gaps) total += (g = share(rng));
      const double slack = diameter - (channels - 1) * kMinRandomSpacing;
      double x = -radius;
      pos.emplace_back(x, 0.0, 0.0);
      for (double g : gaps) {
        x += kMinRandomSpacing + slack * g / total;
        pos.emplace_back(x, 0.0, 0.0);
      }
      pos.back().x() = radius;
      break;
    }
    case GeometryTag::adhoc: {
      for (int attempt = 0;; ++attempt) {
        if (attempt == kMaxLayoutRetries) throw std::runtime_error("make_array: no ad-hoc layout found");
        pos.clear();
        int draws = 0;
        while (static_cast<int>(pos.size()) < channels && draws < 100 * channels) {
          ++draws;
          Point3 p(uniform(rng, -radius, radius), uniform(rng, -radius, radius), uniform(rng, -radius, radius));
          if (p.norm() > radius) continue;
          if (spacing_ok(pos, p)) pos.push_back(p);
        }
        if (static_cast<int>(pos.size()) == channels) break;
      }
      // Shift so the centroid is the origin while staying within the bounding sphere's diameter.
      center(pos);
      break;
    }
  }
  spec.validate();
  return spec;
}

std::vector<double> default_diameters() { return {0.15, 0.2375, 0.325, 0.4125, 0.5}; }

bool matches_exclusion(const std::string& key, const std::vector<std::string>& exclude) {
  return std::any_of(exclude.begin(), exclude.end(), [&](const std::string& e) {
    if (key == e) return true;
    // "tag/M" prefix excludes every diameter of that shape and size.
    return key.size() > e.size() && key.compare(0, e.size(), e) == 0 && key[e.size()] == '/';
  });
}

std::vector<ArraySpec> make_array_pool(const ArrayPoolOptions& options, std::uint64_t seed) {
  std::vector<ArraySpec> pool;
  std::uint64_t index = 0;
  for (auto tag : options.tags) {
    for (int m = options.min_channels; m <= options.max_channels; ++m) {
      if (tag == GeometryTag::circular_center && m < 3) continue;
      if (tag == GeometryTag::nonuniform_linear && m < 3) continue;  // identical to linear
      for (double d : options.diameters) {
        auto spec = make_array(tag, m, d, seed + 7919 * index++);
        if (!matches_exclusion(spec.key(), options.exclude)) pool.push_back(std::move(spec));
      }
    }
  }
  if (options.max_arrays > 0 && static_cast<int>(pool.size()) > options.max_arrays) {
    Rng rng = derive_stream(seed, 0xA11A);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(static_cast<std::size_t>(options.max_arrays));
  }
  return pool;
}

}  // namespace nbdf
