#pragma once

#include <span>
#include <vector>

#include "nbdf/waveform.hpp"

namespace nbdf {

/// Rational-ratio polyphase resampling with a Kaiser-windowed sinc
/// anti-aliasing filter (beta = 5, 10 zero crossings per side).
/// Output length is ceil(len * to / from).
std::vector<double> resample(std::span<const double> x, int from_rate, int to_rate);

MultichannelWaveform resample(const MultichannelWaveform& wave, int to_rate);

}  // namespace nbdf
