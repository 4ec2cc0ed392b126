#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nbdf/nn/tensor.hpp"

namespace nbdf::nn {

enum class Activation { relu, tanh, identity };

template <typename S>
struct ConvStageCache {
  Mat<S> windows;  // [T*(E-1) x 2C] unfolded inputs
  Mat<S> output;   // [T*(E-1) x N] post-activation
};

template <typename S>
struct ChannelConvCache {
  std::vector<ConvStageCache<S>> stages;
  int frames = 0;
  int channels = 0;
};

/// Time-distributed convolution along the channel axis with kernel 2 and
/// stride 1. The first layer maps 2 features per channel to N feature maps;
/// one weight-tied layer (N -> N) is then applied until a single channel
/// position remains, i.e. M - 2 times for M input channels.
template <typename S>
class ChannelConv {
 public:
  ChannelConv() = default;
  ChannelConv(const std::string& name, int feature_maps, Activation activation)
      : maps_(feature_maps),
        activation_(activation),
        w_first_(name + ".first.weight", feature_maps, 4),
        b_first_(name + ".first.bias", 1, feature_maps),
        w_shared_(name + ".shared.weight", feature_maps, 2 * feature_maps),
        b_shared_(name + ".shared.bias", 1, feature_maps) {}

  int feature_maps() const { return maps_; }

  template <typename Rng>
  void init(Rng& rng) {
    w_first_.init_uniform(rng, 1.0 / std::sqrt(4.0));
    b_first_.init_uniform(rng, 1.0 / std::sqrt(4.0));
    w_shared_.init_uniform(rng, 1.0 / std::sqrt(2.0 * maps_));
    b_shared_.init_uniform(rng, 1.0 / std::sqrt(2.0 * maps_));
  }

  template <typename Out>
  void collect(Out& out) {
    out.push_back(&w_first_);
    out.push_back(&b_first_);
    out.push_back(&w_shared_);
    out.push_back(&b_shared_);
  }
  template <typename Out>
  void collect(Out& out) const {
    out.push_back(&w_first_);
    out.push_back(&b_first_);
    out.push_back(&w_shared_);
    out.push_back(&b_shared_);
  }

  /// `x` is one sequence [T x 2M] (channel-major real/imag pairs). Returns [T x N].
  Mat<S> forward(const SequenceView<S>& x, ChannelConvCache<S>* cache) const {
    const int frames = x.frames;
    const int channels = x.width / 2;
    if (channels < 2) throw std::invalid_argument("channel conv: needs at least two channels");
    // Current feature map, row-major [T x E*C].
    Mat<S> features(frames, x.width);
    for (int t = 0; t < frames; ++t)
      for (int c = 0; c < x.width; ++c) features(t, c) = x(t, c);
    int extent = channels;
    int width = 2;
    if (cache) {
      cache->stages.clear();
      cache->frames = frames;
      cache->channels = channels;
    }
    bool first = true;
    while (extent > 1) {
      const auto& w = first ? w_first_.value : w_shared_.value;
      const auto& b = first ? b_first_.value : b_shared_.value;
      const Eigen::Index rows = static_cast<Eigen::Index>(frames) * (extent - 1);
      Mat<S> windows(rows, 2 * width);
      for (int t = 0; t < frames; ++t)
        for (int j = 0; j < extent - 1; ++j)
          windows.row(static_cast<Eigen::Index>(t) * (extent - 1) + j) = features.block(t, j * width, 1, 2 * width);
      Mat<S> out(rows, maps_);
      out.noalias() = windows * w.transpose();
      out.rowwise() += b.row(0);
      activate(out);
      // [T*(E-1) x N] is exactly the row-major layout of [T x (E-1)*N].
      features = Eigen::Map<const Mat<S>>(out.data(), frames, static_cast<Eigen::Index>(extent - 1) * maps_);
      if (cache) cache->stages.push_back({std::move(windows), std::move(out)});
      --extent;
      width = maps_;
      first = false;
    }
    return features;
  }

  /// Accumulates gradients from dL/d(output) [T x N].
  void backward(const ChannelConvCache<S>& cache, const Mat<S>& d_out) {
    const int frames = cache.frames;
    Mat<S> d_features = d_out;  // [T x (E-1)*N] at the current stage
    for (int stage = static_cast<int>(cache.stages.size()) - 1; stage >= 0; --stage) {
      const auto& st = cache.stages[static_cast<std::size_t>(stage)];
      const int out_extent = static_cast<int>(st.output.rows() / frames);
      const int in_extent = out_extent + 1;
      const int in_width = stage == 0 ? 2 : maps_;
      Mat<S> d_pre = Eigen::Map<const Mat<S>>(d_features.data(), st.output.rows(), maps_);
      activation_grad(st.output, d_pre);
      auto& w = stage == 0 ? w_first_ : w_shared_;
      auto& b = stage == 0 ? b_first_ : b_shared_;
      w.grad.noalias() += d_pre.transpose() * st.windows;
      b.grad.row(0) += d_pre.colwise().sum();
      if (stage == 0) break;
      Mat<S> d_windows(st.windows.rows(), st.windows.cols());
      d_windows.noalias() = d_pre * w.value;
      d_features = Mat<S>::Zero(frames, static_cast<Eigen::Index>(in_extent) * in_width);
      for (int t = 0; t < frames; ++t)
        for (int j = 0; j < out_extent; ++j)
          d_features.block(t, j * in_width, 1, 2 * in_width) +=
              d_windows.row(static_cast<Eigen::Index>(t) * out_extent + j);
    }
  }

 private:
  void activate(Mat<S>& m) const {
    switch (activation_) {
      case Activation::relu: m = m.cwiseMax(S(0)); break;
      case Activation::tanh: m = m.array().tanh(); break;
      case Activation::identity: break;
    }
  }

  void activation_grad(const Mat<S>& post, Mat<S>& grad) const {
    switch (activation_) {
      case Activation::relu: grad = (post.array() > S(0)).select(grad, S(0)); break;
      case Activation::tanh: grad.array() *= S(1) - post.array().square(); break;
      case Activation::identity: break;
    }
  }

  int maps_ = 0;
  Activation activation_ = Activation::relu;
  Parameter<S> w_first_;
  Parameter<S> b_first_;
  Parameter<S> w_shared_;
  Parameter<S> b_shared_;
};

}  // namespace nbdf::nn
