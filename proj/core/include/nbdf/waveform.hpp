#pragma once

#include <span>
#include <vector>

#include "nbdf/types.hpp"

namespace nbdf {

/// Time-domain multichannel signal. Samples are stored channel-major so a
/// single channel is a contiguous span.
class MultichannelWaveform {
 public:
  MultichannelWaveform() = default;
  MultichannelWaveform(int channels, std::size_t length, int sample_rate);
  MultichannelWaveform(std::vector<std::vector<double>> channels, int sample_rate);

  int channels() const { return channels_; }
  std::size_t length() const { return length_; }
  int sample_rate() const { return sample_rate_; }
  bool empty() const { return channels_ == 0 || length_ == 0; }

  std::span<double> channel(int m);
  std::span<const double> channel(int m) const;

  double& at(int m, std::size_t n) { return data_[static_cast<std::size_t>(m) * length_ + n]; }
  double at(int m, std::size_t n) const { return data_[static_cast<std::size_t>(m) * length_ + n]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Copy of a subset of channels, in the given order.
  MultichannelWaveform select(std::span<const int> channel_order) const;
  /// Copy of samples [begin, begin + count).
  MultichannelWaveform slice(std::size_t begin, std::size_t count) const;

  MultichannelWaveform& operator*=(double gain);
  MultichannelWaveform& operator+=(const MultichannelWaveform& other);

  /// Mean power of one channel.
  double power(int m) const;
  bool all_finite() const;

 private:
  int channels_ = 0;
  std::size_t length_ = 0;
  int sample_rate_ = 0;
  std::vector<double> data_;
};

MultichannelWaveform operator+(MultichannelWaveform a, const MultichannelWaveform& b);
MultichannelWaveform operator*(MultichannelWaveform a, double gain);

}  // namespace nbdf
