#include "nbdf/enhance.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "nbdf/parallel.hpp"

namespace nbdf {

NetworkMaskEstimator::NetworkMaskEstimator(std::shared_ptr<const Network> network, int batch_size, unsigned threads)
    : network_(std::move(network)), batch_size_(batch_size), threads_(threads) {
  if (!network_) throw std::invalid_argument("NetworkMaskEstimator: null network");
  if (batch_size_ < 1) throw std::invalid_argument("NetworkMaskEstimator: batch_size must be >= 1");
}

RealMatrix NetworkMaskEstimator::estimate(const std::vector<RowMatrixF>& inputs) const {
  if (inputs.empty()) return {};
  const auto bins = static_cast<Eigen::Index>(inputs.size());
  const auto frames = inputs.front().rows();
  RealMatrix mask(bins, frames);
  const std::size_t bs = static_cast<std::size_t>(batch_size_);
  const std::size_t chunks = (inputs.size() + bs - 1) / bs;
  parallel_for(chunks, threads_, [&](std::size_t c) {
    const std::size_t begin = c * bs;
    const std::size_t end = std::min(inputs.size(), begin + bs);
    std::vector<nn::SequenceView<float>> views;
    for (std::size_t k = begin; k < end; ++k)
      views.push_back({inputs[k].data(), static_cast<int>(inputs[k].rows()), static_cast<int>(inputs[k].cols())});
    const auto out = network_->forward(views);
    for (std::size_t k = begin; k < end; ++k)
      mask.row(static_cast<Eigen::Index>(k)) = out.row(static_cast<Eigen::Index>(k - begin)).cast<double>();
  });
  return mask;
}

RealMatrix ConstantMaskEstimator::estimate(const std::vector<RowMatrixF>& inputs) const {
  const auto frames = inputs.empty() ? 0 : inputs.front().rows();
  return RealMatrix::Constant(static_cast<Eigen::Index>(inputs.size()), frames, value_);
}

RealMatrix FixedMaskEstimator::estimate(const std::vector<RowMatrixF>& inputs) const {
  const auto frames = inputs.empty() ? 0 : inputs.front().rows();
  if (mask_.rows() != static_cast<Eigen::Index>(inputs.size()) || mask_.cols() != frames)
    throw std::invalid_argument("FixedMaskEstimator: mask shape does not match the input");
  return mask_;
}

RealMatrix oracle_mrm(const Spectrogram& speech, const Spectrogram& mixture, int ref_index) {
  if (!speech.same_shape(mixture)) throw std::invalid_argument("oracle_mrm: shape mismatch");
  RealMatrix mask(speech.bins(), speech.frames());
  for (int k = 0; k < speech.bins(); ++k) {
    const auto m = compute_mrm(speech.sequence(ref_index, k), mixture.sequence(ref_index, k));
    for (int t = 0; t < speech.frames(); ++t) mask(k, t) = m[static_cast<std::size_t>(t)];
  }
  return mask;
}

std::vector<RowMatrixF> narrowband_inputs(const Spectrogram& mixture, int ref_index) {
  const int mics = mixture.channels();
  const auto order = natural_order(mics, ref_index);
  std::vector<RowMatrixF> inputs(static_cast<std::size_t>(mixture.bins()));
  for (int k = 0; k < mixture.bins(); ++k) {
    const auto norm = narrowband_normalize(mixture.narrowband(k), ref_index);
    auto& x = inputs[static_cast<std::size_t>(k)];
    x.resize(mixture.frames(), 2 * mics);
    for (int i = 0; i < mics; ++i) {
      const auto row = norm.values.row(order[static_cast<std::size_t>(i)]);
      x.col(2 * i) = row.real().transpose().cast<float>();
      x.col(2 * i + 1) = row.imag().transpose().cast<float>();
    }
  }
  return inputs;
}

Spectrogram enhance_spectrogram(const Spectrogram& mixture, const MaskEstimator& estimator, int ref_index) {
  if (ref_index < 0 || ref_index >= mixture.channels()) {
    throw std::invalid_argument("enhance: reference channel " + std::to_string(ref_index) + " out of range for " +
                                std::to_string(mixture.channels()) + " channels");
  }
  estimator.check_channels(mixture.channels());
  const auto mask = estimator.estimate(narrowband_inputs(mixture, ref_index));
  if (mask.rows() != mixture.bins() || mask.cols() != mixture.frames())
    throw std::runtime_error("enhance: mask estimator returned the wrong shape");
  Spectrogram out(1, mixture.bins(), mixture.frames(), mixture.sample_rate(), mixture.win_len(), mixture.hop());
  for (int k = 0; k < mixture.bins(); ++k)
    for (int t = 0; t < mixture.frames(); ++t) out.at(0, k, t) = mask(k, t) * mixture.at(ref_index, k, t);
  return out;
}

MultichannelWaveform enhance(const MultichannelWaveform& wave, const MaskEstimator& estimator, int ref_index,
                             const StftConfig& config) {
  if (ref_index < 0 || ref_index >= wave.channels()) {
    throw std::invalid_argument("enhance: reference channel " + std::to_string(ref_index) + " out of range for " +
                                std::to_string(wave.channels()) + " channels");
  }
  estimator.check_channels(wave.channels());
  return istft(enhance_spectrogram(stft(wave, config), estimator, ref_index));
}

}  // namespace nbdf
