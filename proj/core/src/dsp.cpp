#include "nbdf/dsp.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "fft.hpp"

namespace nbdf {

namespace {

std::size_t next_fast_size(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

std::vector<double> fft_convolve(std::span<const double> x, std::span<const double> h, std::size_t out_len) {
  if (x.empty() || h.empty()) return std::vector<double>(out_len, 0.0);
  const std::size_t n = next_fast_size(x.size() + h.size() - 1);
  detail::RealFft fft(static_cast<int>(n));
  std::vector<double> a(n, 0.0), b(n, 0.0);
  std::copy(x.begin(), x.end(), a.begin());
  std::copy(h.begin(), h.end(), b.begin());
  std::vector<std::complex<double>> fa(fft.bins()), fb(fft.bins());
  fft.forward(a, fa);
  fft.forward(b, fb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  fft.inverse(fa, a);
  a.resize(out_len, 0.0);
  return a;
}

std::vector<double> butterworth_lowpass(std::span<const double> x, int sample_rate, double cutoff, int order) {
  if (order < 2 || order % 2 != 0) throw std::invalid_argument("butterworth: order must be even and >= 2");
  if (!(cutoff > 0.0 && cutoff < sample_rate / 2.0)) throw std::invalid_argument("butterworth: cutoff out of range");
  std::vector<double> y(x.begin(), x.end());
  const double w0 = 2.0 * std::numbers::pi * cutoff / sample_rate;
  const double cw = std::cos(w0);
  for (int stage = 0; stage < order / 2; ++stage) {
    // Pole-pair quality factor of a Butterworth prototype.
    const double q = 1.0 / (2.0 * std::cos(std::numbers::pi * (2.0 * stage + 1.0) / (2.0 * order)));
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha;
    const double b0 = (1.0 - cw) / 2.0 / a0, b1 = (1.0 - cw) / a0, b2 = b0;
    const double a1 = -2.0 * cw / a0, a2 = (1.0 - alpha) / a0;
    double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
    for (double& v : y) {
      const double in = v;
      const double out = b0 * in + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
      x2 = x1;
      x1 = in;
      y2 = y1;
      y1 = out;
      v = out;
    }
  }
  return y;
}

double mean_power(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0) / static_cast<double>(x.size());
}

}  // namespace nbdf
