#pragma once

#include <span>
#include <vector>

#include "nbdf/types.hpp"

namespace nbdf {

/// Complex one-sided STFT tensor indexed (channel, frequency, frame).
/// Frames of one (channel, frequency) pair are contiguous, so narrowband
/// sequences can be read without copying.
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(int channels, int bins, int frames, int sample_rate, int win_len, int hop);

  int channels() const { return channels_; }
  int bins() const { return bins_; }
  int frames() const { return frames_; }
  int sample_rate() const { return sample_rate_; }
  int win_len() const { return win_len_; }
  int hop() const { return hop_; }

  Complex& at(int m, int k, int t) { return data_[index(m, k, t)]; }
  const Complex& at(int m, int k, int t) const { return data_[index(m, k, t)]; }

  std::span<Complex> sequence(int m, int k) { return {data_.data() + index(m, k, 0), std::size_t(frames_)}; }
  std::span<const Complex> sequence(int m, int k) const {
    return {data_.data() + index(m, k, 0), std::size_t(frames_)};
  }

  /// All channels at frequency k as an [M x T] matrix.
  ComplexMatrix narrowband(int k) const;
  void set_narrowband(int k, const ComplexMatrix& x);

  /// Copy with channels reordered: output channel i = input channel order[i].
  Spectrogram select(std::span<const int> order) const;

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  bool same_shape(const Spectrogram& other) const;

 private:
  std::size_t index(int m, int k, int t) const {
    return (static_cast<std::size_t>(m) * bins_ + k) * frames_ + t;
  }

  int channels_ = 0;
  int bins_ = 0;
  int frames_ = 0;
  int sample_rate_ = 0;
  int win_len_ = 0;
  int hop_ = 0;
  std::vector<Complex> data_;
};

}  // namespace nbdf
