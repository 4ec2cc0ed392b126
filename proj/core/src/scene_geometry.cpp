#include "nbdf/scene_geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace nbdf {

std::vector<Point3> default_rooms() { return {{6.0, 5.0, 3.0}, {8.0, 6.0, 3.5}, {5.0, 4.0, 2.8}}; }

namespace {

// Largest t with center + t * dir inside the box shrunk by `margin`.
double max_extent(const Point3& room, const Point3& center, const Point3& dir, double margin) {
  double t = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (dir[a] > 1e-12) t = std::min(t, (room[a] - margin - center[a]) / dir[a]);
    if (dir[a] < -1e-12) t = std::min(t, (margin - center[a]) / dir[a]);
  }
  return t;
}

}  // namespace

ScenePlacement sample_scene_geometry(std::span<const Point3> rooms, const ArraySpec& array, Rng& rng,
                                     const PlacementOptions& options) {
  if (rooms.empty()) throw std::invalid_argument("placement: empty room pool");
  ScenePlacement out;
  out.room_index = uniform_int(rng, 0, static_cast<int>(rooms.size()) - 1);
  out.room_dimensions = rooms[static_cast<std::size_t>(out.room_index)];
  out.rt60 = uniform(rng, options.min_rt60, options.max_rt60);
  const Point3& room = out.room_dimensions;

  for (int array_try = 0; array_try < options.max_array_retries; ++array_try) {
    out.array_rotation = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double c = std::cos(out.array_rotation), s = std::sin(out.array_rotation);
    std::vector<Point3> offsets;
    Point3 reach = Point3::Zero();
    for (const auto& p : array.mic_positions) {
      Point3 q(c * p.x() - s * p.y(), s * p.x() + c * p.y(), p.z());
      reach = reach.cwiseMax(q.cwiseAbs());
      offsets.push_back(q);
    }
    const Point3 lo = Point3::Constant(options.wall_margin) + reach;
    const Point3 hi = room - Point3::Constant(options.wall_margin) - reach;
    if (lo.x() > hi.x() || lo.y() > hi.y() || options.array_height < lo.z() || options.array_height > hi.z()) {
      throw std::invalid_argument("placement: array does not fit inside the room margin");
    }
    out.array_center = Point3(uniform(rng, lo.x(), hi.x()), uniform(rng, lo.y(), hi.y()), options.array_height);
    out.mic_positions.clear();
    for (const auto& q : offsets) out.mic_positions.push_back(out.array_center + q);

    for (int src_try = 0; src_try < options.max_source_retries; ++src_try) {
      const double azimuth = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      double distance = uniform(rng, options.min_distance, options.max_distance);
      const Point3 dir(std::cos(azimuth), std::sin(azimuth), 0.0);
      const double limit = max_extent(room, out.array_center, dir, options.wall_margin);
      if (limit <= options.min_distance) continue;
      distance = std::min(distance, limit);
      out.azimuth = azimuth;
      out.distance = distance;
      out.source = out.array_center + distance * dir;
      return out;
    }
  }
  throw std::runtime_error("placement: no valid source position found");
}

}  // namespace nbdf
