#include "nbdf/waveform.hpp"

#include <cmath>
#include <numeric>

namespace nbdf {

MultichannelWaveform::MultichannelWaveform(int channels, std::size_t length, int sample_rate)
    : channels_(channels), length_(length), sample_rate_(sample_rate) {
  if (channels < 0) throw std::invalid_argument("waveform: negative channel count");
  if (sample_rate <= 0) throw std::invalid_argument("waveform: sample rate must be positive");
  data_.assign(static_cast<std::size_t>(channels) * length, 0.0);
}

MultichannelWaveform::MultichannelWaveform(std::vector<std::vector<double>> channels, int sample_rate)
    : MultichannelWaveform(static_cast<int>(channels.size()), channels.empty() ? 0 : channels[0].size(),
                           sample_rate) {
  for (int m = 0; m < channels_; ++m) {
    if (channels[m].size() != length_) throw std::invalid_argument("waveform: ragged channel lengths");
    std::copy(channels[m].begin(), channels[m].end(), channel(m).begin());
  }
}

std::span<double> MultichannelWaveform::channel(int m) {
  return {data_.data() + static_cast<std::size_t>(m) * length_, length_};
}

std::span<const double> MultichannelWaveform::channel(int m) const {
  return {data_.data() + static_cast<std::size_t>(m) * length_, length_};
}

MultichannelWaveform MultichannelWaveform::select(std::span<const int> channel_order) const {
  MultichannelWaveform out(static_cast<int>(channel_order.size()), length_, sample_rate_);
  for (std::size_t i = 0; i < channel_order.size(); ++i) {
    const int src = channel_order[i];
    if (src < 0 || src >= channels_) throw std::out_of_range("waveform: channel index out of range");
    std::copy_n(channel(src).begin(), length_, out.channel(static_cast<int>(i)).begin());
  }
  return out;
}

MultichannelWaveform MultichannelWaveform::slice(std::size_t begin, std::size_t count) const {
  if (begin + count > length_) throw std::out_of_range("waveform: slice beyond end");
  MultichannelWaveform out(channels_, count, sample_rate_);
  for (int m = 0; m < channels_; ++m) {
    std::copy_n(channel(m).begin() + static_cast<std::ptrdiff_t>(begin), count, out.channel(m).begin());
  }
  return out;
}

MultichannelWaveform& MultichannelWaveform::operator*=(double gain) {
  for (double& v : data_) v *= gain;
  return *this;
}

MultichannelWaveform& MultichannelWaveform::operator+=(const MultichannelWaveform& other) {
  if (other.channels_ != channels_ || other.length_ != length_) {
    throw std::invalid_argument("waveform: shape mismatch in addition");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

double MultichannelWaveform::power(int m) const {
  if (length_ == 0) return 0.0;
  const auto x = channel(m);
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0) / static_cast<double>(length_);
}

bool MultichannelWaveform::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

MultichannelWaveform operator+(MultichannelWaveform a, const MultichannelWaveform& b) {
  a += b;
  return a;
}

MultichannelWaveform operator*(MultichannelWaveform a, double gain) {
  a *= gain;
  return a;
}

}  // namespace nbdf
