#include "nbdf/network.hpp"

#include <random>

namespace nbdf {

using nn::Mat;

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::basic: return "basic";
    case Variant::cp: return "cp";
    case Variant::cc: return "cc";
    case Variant::pw: return "pw";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (auto v : {Variant::basic, Variant::cp, Variant::cc, Variant::pw})
    if (to_string(v) == name) return v;
  throw std::invalid_argument("unknown model variant: " + std::string(name));
}

void ModelConfig::validate() const {
  if (h1 < 1 || h2 < 1) throw std::invalid_argument("model: hidden sizes must be positive");
  switch (variant) {
    case Variant::basic:
      if (input_channels < 1) throw std::invalid_argument("model: basic variant needs input_channels >= 1");
      break;
    case Variant::cp:
      if (max_channels < 1) throw std::invalid_argument("model: max_channels must be positive");
      break;
    case Variant::cc:
      if (cc_feature_maps < 1) throw std::invalid_argument("model: cc_feature_maps must be positive");
      if (cc_kernel != 2) throw std::invalid_argument("model: only a channel kernel of 2 is supported");
      break;
    case Variant::pw: break;
  }
}

int ModelConfig::min_supported_channels() const {
  switch (variant) {
    case Variant::basic: return input_channels;
    case Variant::cp:
    case Variant::cc:
    case Variant::pw: return 2;
  }
  return 1;
}

int ModelConfig::max_supported_channels() const {
  switch (variant) {
    case Variant::basic: return input_channels;
    case Variant::cp: return max_channels;
    default: return 0;
  }
}

namespace {

std::int64_t blstm_params(std::int64_t in, std::int64_t h) { return 2 * 4 * (in * h + h * h + h); }

int first_input_width(const ModelConfig& c) {
  switch (c.variant) {
    case Variant::basic: return 2 * c.input_channels;
    case Variant::cp: return 2 * c.max_channels;
    case Variant::cc: return c.cc_feature_maps;
    case Variant::pw: return 4;
  }
  return 0;
}

}  // namespace

std::int64_t param_count(const ModelConfig& c) {
  c.validate();
  std::int64_t total = blstm_params(first_input_width(c), c.h1) + blstm_params(2 * c.h1, c.h2) + 2 * c.h2 + 1;
  if (c.variant == Variant::cc) {
    const std::int64_t n = c.cc_feature_maps;
    total += n * 4 + n + n * 2 * n + n;
  }
  return total;
}

template <typename S>
NbdfNetwork<S>::NbdfNetwork(ModelConfig config, std::uint64_t seed)
    : config_(config),
      blstm1_("blstm1", first_input_width(config_), config_.h1),
      blstm2_("blstm2", 2 * config_.h1, config_.h2),
      head_w_("head.weight", 1, 2 * config_.h2),
      head_b_("head.bias", 1, 1) {
  config_.validate();
  if (config_.variant == Variant::cc) conv_ = nn::ChannelConv<S>("conv", config_.cc_feature_maps, config_.cc_activation);
  std::mt19937_64 rng(seed);
  if (config_.variant == Variant::cc) conv_.init(rng);
  blstm1_.init(rng);
  blstm2_.init(rng);
  const double bound = 1.0 / std::sqrt(2.0 * config_.h2);
  head_w_.init_uniform(rng, bound);
  head_b_.init_uniform(rng, bound);
}

template <typename S>
std::vector<nn::Parameter<S>*> NbdfNetwork<S>::parameters() {
  std::vector<nn::Parameter<S>*> out;
  if (config_.variant == Variant::cc) conv_.collect(out);
  blstm1_.collect(out);
  blstm2_.collect(out);
  out.push_back(&head_w_);
  out.push_back(&head_b_);
  return out;
}

template <typename S>
std::vector<const nn::Parameter<S>*> NbdfNetwork<S>::parameters() const {
  std::vector<const nn::Parameter<S>*> out;
  if (config_.variant == Variant::cc) conv_.collect(out);
  blstm1_.collect(out);
  blstm2_.collect(out);
  out.push_back(&head_w_);
  out.push_back(&head_b_);
  return out;
}

template <typename S>
std::int64_t NbdfNetwork<S>::parameter_count() const {
  std::int64_t n = 0;
  for (const auto* p : parameters()) n += p->size();
  return n;
}

template <typename S>
void NbdfNetwork<S>::check_channels(int channels) const {
  const int lo = config_.min_supported_channels();
  const int hi = config_.max_supported_channels();
  const std::string name(to_string(config_.variant));
  if (config_.variant == Variant::basic && channels != lo) {
    throw std::invalid_argument("basic model was built for " + std::to_string(lo) + " channels, got " +
                                std::to_string(channels));
  }
  if (channels < lo) {
    throw std::invalid_argument(name + " model needs at least " + std::to_string(lo) + " channels, got " +
                                std::to_string(channels));
  }
  if (hi > 0 && channels > hi) {
    throw std::invalid_argument(name + " model: " + std::to_string(channels) + " channels exceeds channel bound " +
                                std::to_string(hi));
  }
}

template <typename S>
Mat<S> NbdfNetwork<S>::forward(std::span<const nn::SequenceView<S>> batch) const {
  return run(batch, nullptr);
}

template <typename S>
Mat<S> NbdfNetwork<S>::forward_train(std::span<const nn::SequenceView<S>> batch, NetworkWorkspace<S>& ws) const {
  return run(batch, &ws);
}

template <typename S>
Mat<S> NbdfNetwork<S>::run(std::span<const nn::SequenceView<S>> batch, NetworkWorkspace<S>* ws) const {
  if (batch.empty()) throw std::invalid_argument("network: empty batch");
  const int frames = batch[0].frames;
  const int nb = static_cast<int>(batch.size());
  std::vector<int> channels(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    if (batch[b].frames != frames) throw std::invalid_argument("network: sequences in a batch must share frame count");
    if (batch[b].width % 2 != 0) throw std::invalid_argument("network: input width must be 2 * channels");
    channels[b] = batch[b].width / 2;
    check_channels(channels[b]);
  }
  if (frames < 1) throw std::invalid_argument("network: empty sequence");

  NetworkWorkspace<S> local;
  NetworkWorkspace<S>& w = ws ? *ws : local;
  const bool keep = ws != nullptr;
  w.frames = frames;
  w.batch = nb;
  w.channels = channels;

  int rows1 = nb;
  switch (config_.variant) {
    case Variant::basic:
    case Variant::cp: {
      const int width = first_input_width(config_);
      w.input1 = Mat<S>::Zero(static_cast<Eigen::Index>(frames) * nb, width);
      for (int b = 0; b < nb; ++b)
        for (int t = 0; t < frames; ++t)
          for (int c = 0; c < batch[b].width; ++c) w.input1(static_cast<Eigen::Index>(t) * nb + b, c) = batch[b](t, c);
      break;
    }
    case Variant::cc: {
      const int maps = config_.cc_feature_maps;
      w.input1.resize(static_cast<Eigen::Index>(frames) * nb, maps);
      w.conv.assign(keep ? batch.size() : 0, {});
      for (int b = 0; b < nb; ++b) {
        const Mat<S> feat = conv_.forward(batch[b], keep ? &w.conv[static_cast<std::size_t>(b)] : nullptr);
        for (int t = 0; t < frames; ++t) w.input1.row(static_cast<Eigen::Index>(t) * nb + b) = feat.row(t);
      }
      break;
    }
    case Variant::pw: {
      w.pair_offset.assign(batch.size(), 0);
      int pairs = 0;
      for (int b = 0; b < nb; ++b) {
        w.pair_offset[static_cast<std::size_t>(b)] = pairs;
        pairs += channels[b] - 1;
      }
      w.pairs = pairs;
      rows1 = pairs;
      w.input1.resize(static_cast<Eigen::Index>(frames) * pairs, 4);
      for (int b = 0; b < nb; ++b) {
        for (int t = 0; t < frames; ++t) {
          const S* row = batch[b].row(t);
          for (int m = 1; m < channels[b]; ++m) {
            auto r = w.input1.row(static_cast<Eigen::Index>(t) * pairs + w.pair_offset[b] + m - 1);
            r << row[0], row[1], row[2 * m], row[2 * m + 1];
          }
        }
      }
      break;
    }
  }

  w.out1 = blstm1_.forward(w.input1, frames, rows1, keep ? &w.blstm1 : nullptr);

  if (config_.variant == Variant::pw) {
    const int h = blstm1_.output_size();
    w.input2 = Mat<S>::Zero(static_cast<Eigen::Index>(frames) * nb, h);
    for (int t = 0; t < frames; ++t) {
      for (int b = 0; b < nb; ++b) {
        auto dst = w.input2.row(static_cast<Eigen::Index>(t) * nb + b);
        const Eigen::Index first = static_cast<Eigen::Index>(t) * w.pairs + w.pair_offset[b];
        dst = w.out1.middleRows(first, channels[b] - 1).colwise().sum() / static_cast<S>(channels[b] - 1);
      }
    }
  } else {
    w.input2 = std::move(w.out1);
    w.out1.resize(0, 0);
  }

  w.out2 = blstm2_.forward(w.input2, frames, nb, keep ? &w.blstm2 : nullptr);
  Mat<S> z = w.out2 * head_w_.value.transpose();
  z.array() += head_b_.value(0, 0);
  w.mask = z.array().logistic();

  Mat<S> result(nb, frames);
  for (int t = 0; t < frames; ++t)
    for (int b = 0; b < nb; ++b) result(b, t) = w.mask(static_cast<Eigen::Index>(t) * nb + b, 0);
  return result;
}

template <typename S>
void NbdfNetwork<S>::backward(const NetworkWorkspace<S>& ws, const Mat<S>& d_mask) {
  const int frames = ws.frames;
  const int nb = ws.batch;
  if (d_mask.rows() != nb || d_mask.cols() != frames) throw std::invalid_argument("network: gradient shape mismatch");
  Mat<S> dz(static_cast<Eigen::Index>(frames) * nb, 1);
  for (int t = 0; t < frames; ++t) {
    for (int b = 0; b < nb; ++b) {
      const Eigen::Index r = static_cast<Eigen::Index>(t) * nb + b;
      const S m = ws.mask(r, 0);
      dz(r, 0) = d_mask(b, t) * m * (S(1) - m);
    }
  }
  head_w_.grad.noalias() += dz.transpose() * ws.out2;
  head_b_.grad(0, 0) += dz.sum();
  const Mat<S> d_out2 = dz * head_w_.value;
  const Mat<S> d_in2 = blstm2_.backward(ws.blstm2, d_out2, true);

  Mat<S> d_out1;
  if (config_.variant == Variant::pw) {
    d_out1.resize(static_cast<Eigen::Index>(frames) * ws.pairs, d_in2.cols());
    for (int t = 0; t < frames; ++t) {
      for (int b = 0; b < nb; ++b) {
        const int count = ws.channels[static_cast<std::size_t>(b)] - 1;
        const auto src = d_in2.row(static_cast<Eigen::Index>(t) * nb + b) / static_cast<S>(count);
        const Eigen::Index first = static_cast<Eigen::Index>(t) * ws.pairs + ws.pair_offset[static_cast<std::size_t>(b)];
        for (int p = 0; p < count; ++p) d_out1.row(first + p) = src;
      }
    }
  } else {
    d_out1 = d_in2;
  }

  const bool need_input = config_.variant == Variant::cc;
  const Mat<S> d_in1 = blstm1_.backward(ws.blstm1, d_out1, need_input);
  if (need_input) {
    Mat<S> d_feat(frames, config_.cc_feature_maps);
    for (int b = 0; b < nb; ++b) {
      for (int t = 0; t < frames; ++t) d_feat.row(t) = d_in1.row(static_cast<Eigen::Index>(t) * nb + b);
      conv_.backward(ws.conv[static_cast<std::size_t>(b)], d_feat);
    }
  }
}

template <typename S>
void NbdfNetwork<S>::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

template <typename S>
void NbdfNetwork<S>::zero_head() {
  head_w_.value.setZero();
  head_b_.value.setZero();
}

template class NbdfNetwork<float>;
template class NbdfNetwork<double>;

}  // namespace nbdf
