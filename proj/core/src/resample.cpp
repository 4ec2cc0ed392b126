#include "nbdf/resample.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace nbdf {

namespace {

double bessel_i0(double x) {
  double sum = 1.0;
  double term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

std::vector<double> design_lowpass(int up, int down) {
  const int ratio = std::max(up, down);
  const int half = 10 * ratio;
  const double cutoff = 1.0 / ratio;  // relative to the upsampled Nyquist
  const double beta = 5.0;
  std::vector<double> h(2 * half + 1);
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double x = cutoff * i;
    const double sinc = i == 0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double r = static_cast<double>(i) / half;
    const double win = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / bessel_i0(beta);
    h[i + half] = cutoff * sinc * win;
    sum += h[i + half];
  }
  for (double& v : h) v *= up / sum;
  return h;
}

}  // namespace

std::vector<double> resample(std::span<const double> x, int from_rate, int to_rate) {
  if (from_rate <= 0 || to_rate <= 0) throw std::invalid_argument("resample: rates must be positive");
  if (from_rate == to_rate) return {x.begin(), x.end()};
  const int g = std::gcd(from_rate, to_rate);
  const int up = to_rate / g;
  const int down = from_rate / g;
  const auto h = design_lowpass(up, down);
  const long half = static_cast<long>(h.size() / 2);
  const long n_in = static_cast<long>(x.size());
  const long n_out = (n_in * up + down - 1) / down;
  std::vector<double> y(static_cast<std::size_t>(n_out), 0.0);
  const long filt_len = static_cast<long>(h.size());
  for (long j = 0; j < n_out; ++j) {
    // Position in the upsampled, filtered stream with the filter delay removed.
    const long p = j * down + half;
    const long first = p - filt_len + 1;
    const long i_lo = first > 0 ? (first + up - 1) / up : 0;
    const long i_hi = std::min(p / up, n_in - 1);
    double acc = 0.0;
    for (long i = i_lo; i <= i_hi; ++i) acc += x[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(p - i * up)];
    y[static_cast<std::size_t>(j)] = acc;
  }
  return y;
}

MultichannelWaveform resample(const MultichannelWaveform& wave, int to_rate) {
  if (wave.sample_rate() == to_rate) return wave;
  std::vector<std::vector<double>> channels;
  for (int m = 0; m < wave.channels(); ++m) channels.push_back(resample(wave.channel(m), wave.sample_rate(), to_rate));
  return MultichannelWaveform(std::move(channels), to_rate);
}

}  // namespace nbdf
