#include "nbdf/spectrogram.hpp"

namespace nbdf {

Spectrogram::Spectrogram(int channels, int bins, int frames, int sample_rate, int win_len, int hop)
    : channels_(channels), bins_(bins), frames_(frames), sample_rate_(sample_rate), win_len_(win_len), hop_(hop) {
  if (channels < 0 || bins < 0 || frames < 0) throw std::invalid_argument("spectrogram: negative extent");
  data_.assign(static_cast<std::size_t>(channels) * bins * frames, Complex{});
}

ComplexMatrix Spectrogram::narrowband(int k) const {
  ComplexMatrix x(channels_, frames_);
  for (int m = 0; m < channels_; ++m) {
    const auto seq = sequence(m, k);
    for (int t = 0; t < frames_; ++t) x(m, t) = seq[t];
  }
  return x;
}

void Spectrogram::set_narrowband(int k, const ComplexMatrix& x) {
  if (x.rows() != channels_ || x.cols() != frames_) throw std::invalid_argument("spectrogram: narrowband shape");
  for (int m = 0; m < channels_; ++m) {
    auto seq = sequence(m, k);
    for (int t = 0; t < frames_; ++t) seq[t] = x(m, t);
  }
}

Spectrogram Spectrogram::select(std::span<const int> order) const {
  Spectrogram out(static_cast<int>(order.size()), bins_, frames_, sample_rate_, win_len_, hop_);
  const std::size_t plane = static_cast<std::size_t>(bins_) * frames_;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] < 0 || order[i] >= channels_) throw std::out_of_range("spectrogram: channel index out of range");
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(order[i] * plane), plane,
                out.data_.begin() + static_cast<std::ptrdiff_t>(i * plane));
  }
  return out;
}

bool Spectrogram::same_shape(const Spectrogram& other) const {
  return channels_ == other.channels_ && bins_ == other.bins_ && frames_ == other.frames_;
}

}  // namespace nbdf
