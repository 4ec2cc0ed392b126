#include "nbdf/stft.hpp"

#include <cmath>
#include <numbers>

#include "fft.hpp"

namespace nbdf {

StftConfig StftConfig::for_sample_rate(int sample_rate) {
  if (sample_rate <= 0) throw std::invalid_argument("stft: sample rate must be positive");
  const int win = static_cast<int>(std::lround(0.032 * sample_rate));
  return {win, win / 2};
}

std::vector<double> hamming_window(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

Spectrogram stft(const MultichannelWaveform& wave, const StftConfig& config) {
  if (config.win_len < 2 || config.hop < 1) throw std::invalid_argument("stft: invalid window/hop");
  if (wave.length() < static_cast<std::size_t>(config.win_len)) {
    throw std::invalid_argument("stft: signal shorter than one analysis window");
  }
  const int n = config.win_len;
  const int frames = static_cast<int>((wave.length() - n) / config.hop) + 1;
  const int bins = n / 2 + 1;
  Spectrogram spec(wave.channels(), bins, frames, wave.sample_rate(), n, config.hop);

  const auto window = hamming_window(n);
  detail::RealFft fft(n);
  std::vector<double> frame(n);
  std::vector<Complex> out(bins);
  for (int m = 0; m < wave.channels(); ++m) {
    const auto x = wave.channel(m);
    for (int t = 0; t < frames; ++t) {
      const std::size_t offset = static_cast<std::size_t>(t) * config.hop;
      for (int i = 0; i < n; ++i) frame[i] = window[i] * x[offset + i];
      fft.forward(frame, out);
      for (int k = 0; k < bins; ++k) spec.at(m, k, t) = out[k];
    }
  }
  return spec;
}

MultichannelWaveform istft(const Spectrogram& spec) {
  const int n = spec.win_len();
  const int hop = spec.hop();
  if (n < 2 || hop < 1 || spec.bins() != n / 2 + 1) throw std::invalid_argument("istft: inconsistent spectrogram");
  if (spec.frames() < 1) throw std::invalid_argument("istft: no frames");
  const std::size_t length = static_cast<std::size_t>(spec.frames() - 1) * hop + n;
  MultichannelWaveform out(spec.channels(), length, spec.sample_rate());

  const auto window = hamming_window(n);
  std::vector<double> coverage(length, 0.0);
  for (int t = 0; t < spec.frames(); ++t) {
    for (int i = 0; i < n; ++i) coverage[static_cast<std::size_t>(t) * hop + i] += window[i] * window[i];
  }

  detail::RealFft fft(n);
  std::vector<Complex> bins(spec.bins());
  std::vector<double> frame(n);
  for (int m = 0; m < spec.channels(); ++m) {
    auto y = out.channel(m);
    for (int t = 0; t < spec.frames(); ++t) {
      for (int k = 0; k < spec.bins(); ++k) bins[k] = spec.at(m, k, t);
      fft.inverse(bins, frame);
      const std::size_t offset = static_cast<std::size_t>(t) * hop;
      for (int i = 0; i < n; ++i) y[offset + i] += window[i] * frame[i];
    }
    for (std::size_t i = 0; i < length; ++i) y[i] = coverage[i] > 1e-12 ? y[i] / coverage[i] : 0.0;
  }
  return out;
}

NormalizedNarrowband narrowband_normalize(const ComplexMatrix& x, int ref) {
  if (x.cols() < 1) throw std::invalid_argument("narrowband_normalize: empty sequence");
  if (ref < 0 || ref >= x.rows()) throw std::out_of_range("narrowband_normalize: reference out of range");
  const double mean_mag = x.row(ref).cwiseAbs().mean();
  const double factor = std::max(mean_mag, kMagnitudeFloor);
  return {x / factor, factor};
}

}  // namespace nbdf
