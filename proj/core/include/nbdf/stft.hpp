#pragma once

#include <vector>

#include "nbdf/spectrogram.hpp"
#include "nbdf/waveform.hpp"

namespace nbdf {

struct StftConfig {
  int win_len = 512;
  int hop = 256;

  /// 32 ms window with 50% overlap at the given rate (512/256 at 16 kHz).
  static StftConfig for_sample_rate(int sample_rate);
};

/// Periodic Hamming window of length n.
std::vector<double> hamming_window(int n);

/// One-sided STFT with a periodic Hamming window and no edge padding:
/// T = floor((L - win_len) / hop) + 1 frames, K = win_len / 2 + 1 bins.
/// Throws std::invalid_argument if the signal is shorter than one window.
Spectrogram stft(const MultichannelWaveform& wave, const StftConfig& config = {});

/// Weighted overlap-add inverse. Each output sample is divided by the sum of
/// squared analysis windows covering it; uncovered samples are zero.
/// Output length is (T - 1) * hop + win_len.
MultichannelWaveform istft(const Spectrogram& spec);

struct NormalizedNarrowband {
  ComplexMatrix values;  // [M x T]
  double factor = 1.0;
};

/// Divides every channel of an [M x T] narrowband sequence by the mean
/// reference-channel magnitude, floored at kMagnitudeFloor.
NormalizedNarrowband narrowband_normalize(const ComplexMatrix& x, int ref);

}  // namespace nbdf
