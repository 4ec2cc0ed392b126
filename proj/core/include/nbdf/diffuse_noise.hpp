#pragma once

#include <span>
#include <vector>

#include "nbdf/array_geometry.hpp"
#include "nbdf/waveform.hpp"

namespace nbdf {

/// Spherically isotropic coherence sinc(2 pi f d / c) between two sensors d meters apart.
double diffuse_coherence(double frequency, double distance, double speed_of_sound = kSpeedOfSound);

/// Mixes M mutually independent single-channel noises so that the output
/// cross-spectrum follows the diffuse-field coherence of `mic_positions`.
/// Every output channel is rescaled to the mean input power.
MultichannelWaveform generate_diffuse_noise(const std::vector<Point3>& mic_positions,
                                            std::span<const std::vector<double>> independent_sources,
                                            int sample_rate, double speed_of_sound = kSpeedOfSound);

/// Cuts M non-overlapping segments of `length` samples from `mono_noise`
/// and mixes them as above. Throws if the noise is too short.
MultichannelWaveform generate_diffuse_noise(const ArraySpec& array, std::span<const double> mono_noise,
                                            std::size_t length, int sample_rate);

}  // namespace nbdf
