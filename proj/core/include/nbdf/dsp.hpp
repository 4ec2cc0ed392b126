#pragma once

#include <span>
#include <vector>

namespace nbdf {

/// Linear convolution truncated to `out_len` samples, computed via FFT.
std::vector<double> fft_convolve(std::span<const double> x, std::span<const double> h, std::size_t out_len);

/// Butterworth low-pass of the given even order, applied as cascaded biquads.
std::vector<double> butterworth_lowpass(std::span<const double> x, int sample_rate, double cutoff, int order = 4);

double mean_power(std::span<const double> x);

}  // namespace nbdf
