#pragma once

#include <span>
#include <vector>

#include "nbdf/array_geometry.hpp"
#include "nbdf/random.hpp"

namespace nbdf {

struct PlacementOptions {
  double wall_margin = 0.3;
  double array_height = 1.0;
  double min_distance = 0.5;
  double max_distance = 4.5;
  double min_rt60 = 0.14;
  double max_rt60 = 1.0;
  int max_source_retries = 64;
  int max_array_retries = 64;
};

struct ScenePlacement {
  int room_index = 0;
  Point3 room_dimensions;
  Point3 array_center;
  double array_rotation = 0.0;  // radians about the vertical axis
  std::vector<Point3> mic_positions;
  Point3 source;
  double azimuth = 0.0;  // radians, [0, 2 pi)
  double distance = 0.0;
  double rt60 = 0.0;
};

/// The three rooms used for synthesis: 6x5x3, 8x6x3.5 and 5x4x2.8 m.
std::vector<Point3> default_rooms();

/// Random array placement and source position for one scene.
ScenePlacement sample_scene_geometry(std::span<const Point3> rooms, const ArraySpec& array, Rng& rng,
                                     const PlacementOptions& options = {});

}  // namespace nbdf
