#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nbdf/nn/channel_conv.hpp"
#include "nbdf/nn/lstm.hpp"
#include "nbdf/nn/tensor.hpp"

namespace nbdf {

enum class Variant { basic, cp, cc, pw };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

struct ModelConfig {
  Variant variant = Variant::pw;
  int h1 = 256;  // BLSTM-1 units per direction
  int h2 = 128;  // BLSTM-2 units per direction
  int max_channels = 8;      // cp: padded input width is 2 * max_channels
  int cc_feature_maps = 64;  // cc: N
  int cc_kernel = 2;         // cc: only 2 is supported
  nn::Activation cc_activation = nn::Activation::relu;
  int input_channels = 0;  // basic: fixed channel count M

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  /// Range of channel counts the variant accepts.
  int min_supported_channels() const;
  int max_supported_channels() const;  // 0 = unbounded
};

/// Closed-form trainable parameter count.
std::int64_t param_count(const ModelConfig& config);

/// Activations retained by forward_train(). Layer caches borrow matrices
/// owned here, so a workspace must stay in place between forward and backward.
template <typename S>
struct NetworkWorkspace {
  int frames = 0;
  int batch = 0;
  std::vector<int> channels;
  std::vector<nn::ChannelConvCache<S>> conv;
  nn::Mat<S> input1;
  nn::BlstmCache<S> blstm1;
  nn::Mat<S> out1;
  std::vector<int> pair_offset;  // pw: first pair row of each sequence
  int pairs = 0;
  nn::Mat<S> input2;
  nn::BlstmCache<S> blstm2;
  nn::Mat<S> out2;
  nn::Mat<S> mask;  // [T*B x 1]
};

/// Narrowband deep-filtering network. Input sequences are [T x 2M] with the
/// reference channel in the first two columns; the output is a mask in (0, 1)
/// per frame. A batch may mix channel counts for the cp, cc and pw variants,
/// but every sequence in a batch must have the same number of frames.
template <typename S>
class NbdfNetwork {
 public:
  NbdfNetwork(ModelConfig config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }

  std::vector<nn::Parameter<S>*> parameters();
  std::vector<const nn::Parameter<S>*> parameters() const;
  std::int64_t parameter_count() const;

  /// Inference. Returns masks [B x T].
  nn::Mat<S> forward(std::span<const nn::SequenceView<S>> batch) const;

  /// Forward pass retaining activations in `ws` for backward().
  nn::Mat<S> forward_train(std::span<const nn::SequenceView<S>> batch, NetworkWorkspace<S>& ws) const;
  /// Accumulates parameter gradients given dL/dmask [B x T].
  void backward(const NetworkWorkspace<S>& ws, const nn::Mat<S>& d_mask);
  void zero_grad();

  /// Sets the output affine map to zero (mask 0.5 everywhere).
  void zero_head();

  /// Throws if the channel count is outside the variant's supported range.
  void check_channels(int channels) const;

 private:
  nn::Mat<S> run(std::span<const nn::SequenceView<S>> batch, NetworkWorkspace<S>* ws) const;

  ModelConfig config_;
  nn::ChannelConv<S> conv_;
  nn::Blstm<S> blstm1_;
  nn::Blstm<S> blstm2_;
  nn::Parameter<S> head_w_;
  nn::Parameter<S> head_b_;
};

using Network = NbdfNetwork<float>;

extern template class NbdfNetwork<float>;
extern template class NbdfNetwork<double>;

/// Converts parameters between precisions (same configuration).
template <typename To, typename From>
NbdfNetwork<To> convert_network(const NbdfNetwork<From>& src) {
  NbdfNetwork<To> out(src.config(), 0);
  auto dst = out.parameters();
  auto from = src.parameters();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i]->value = from[i]->value.template cast<To>();
  return out;
}

}  // namespace nbdf
