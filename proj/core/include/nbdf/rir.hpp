#pragma once

#include <optional>
#include <vector>

#include "nbdf/array_geometry.hpp"

namespace nbdf {

struct RoomSpec {
  Point3 dimensions{6.0, 5.0, 3.0};
  double rt60 = 0.5;
  double speed_of_sound = kSpeedOfSound;
  /// Overrides the RT60 inversion; 1.0 gives an anechoic (direct path only) response.
  std::optional<double> absorption;
};

/// sabine and eyring use the classical reverberation formulas. image_fit
/// solves for the absorption whose image-source energy decay, averaged over
/// propagation directions and truncated like the response, has the target
/// T20-based RT60.
enum class AbsorptionModel { sabine, eyring, image_fit };

struct RirOptions {
  /// Maximum reflection order, -1 for every image inside the truncation window.
  int max_order = -1;
  /// Response length in units of RT60.
  double truncation_factor = 1.25;
  /// Half-width of the Hann-windowed sinc fractional-delay kernel, in samples.
  int sinc_half_width = 8;
  /// Allen-Berkley 100 Hz high-pass post filter.
  bool high_pass = true;
  AbsorptionModel absorption_model = AbsorptionModel::image_fit;
};

/// Uniform wall energy absorption coefficient that yields `room.rt60`.
/// Values above 1 are clamped to 1 (anechoic); `clamped` reports it.
double wall_absorption(const RoomSpec& room, AbsorptionModel model, bool* clamped = nullptr,
                       double truncation_factor = 1.25);

/// Image-source room impulse response between a source and one microphone.
std::vector<double> simulate_rir(const RoomSpec& room, const Point3& source, const Point3& mic, int sample_rate,
                                 const RirOptions& options = {});

std::vector<std::vector<double>> simulate_rirs(const RoomSpec& room, const Point3& source,
                                               const std::vector<Point3>& mics, int sample_rate,
                                               const RirOptions& options = {});

}  // namespace nbdf
