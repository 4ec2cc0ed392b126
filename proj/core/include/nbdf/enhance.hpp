#pragma once

#include <memory>
#include <vector>

#include "nbdf/narrowband.hpp"
#include "nbdf/network.hpp"
#include "nbdf/spectrogram.hpp"
#include "nbdf/stft.hpp"
#include "nbdf/waveform.hpp"

namespace nbdf {

/// Source of per-frequency masks for enhance().
class MaskEstimator {
 public:
  virtual ~MaskEstimator() = default;

  /// Throws std::invalid_argument if `channels` is unsupported.
  virtual void check_channels(int channels) const { (void)channels; }

  /// `inputs[k]` is the normalized [T x 2M] sequence of bin k with the
  /// reference channel first. Returns masks [K x T].
  virtual RealMatrix estimate(const std::vector<RowMatrixF>& inputs) const = 0;
};

/// Runs a trained network over every frequency bin.
class NetworkMaskEstimator final : public MaskEstimator {
 public:
  explicit NetworkMaskEstimator(std::shared_ptr<const Network> network, int batch_size = 64, unsigned threads = 0);

  void check_channels(int channels) const override { network_->check_channels(channels); }
  RealMatrix estimate(const std::vector<RowMatrixF>& inputs) const override;

 private:
  std::shared_ptr<const Network> network_;
  int batch_size_;
  unsigned threads_;
};

/// Emits the same value everywhere.
class ConstantMaskEstimator final : public MaskEstimator {
 public:
  explicit ConstantMaskEstimator(double value) : value_(value) {}
  RealMatrix estimate(const std::vector<RowMatrixF>& inputs) const override;

 private:
  double value_;
};

/// Emits a fixed precomputed mask [K x T], such as the true MRM of a scene.
class FixedMaskEstimator final : public MaskEstimator {
 public:
  explicit FixedMaskEstimator(RealMatrix mask) : mask_(std::move(mask)) {}
  RealMatrix estimate(const std::vector<RowMatrixF>& inputs) const override;

 private:
  RealMatrix mask_;
};

/// True magnitude ratio mask [K x T] of a scene at the reference channel.
RealMatrix oracle_mrm(const Spectrogram& speech, const Spectrogram& mixture, int ref_index);

/// Per-frequency normalized network inputs with `ref_index` moved to
/// channel 0 and the others in natural order.
std::vector<RowMatrixF> narrowband_inputs(const Spectrogram& mixture, int ref_index);

/// Masks the original reference-channel STFT. Returns a 1-channel spectrogram.
Spectrogram enhance_spectrogram(const Spectrogram& mixture, const MaskEstimator& estimator, int ref_index);

/// STFT, mask estimation, masking of the noisy reference and inverse STFT.
/// The output has (T - 1) * hop + win_len samples.
MultichannelWaveform enhance(const MultichannelWaveform& wave, const MaskEstimator& estimator, int ref_index,
                             const StftConfig& config);

}  // namespace nbdf
