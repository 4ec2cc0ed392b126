#pragma once

#include <filesystem>

#include "nbdf/waveform.hpp"

namespace nbdf {

enum class WavSampleFormat { pcm16, float32 };

struct WavReadOptions {
  /// Expected rate; 0 accepts any rate.
  int expected_sample_rate = 0;
  /// Resample to expected_sample_rate instead of rejecting a mismatch.
  bool allow_resample = false;
};

/// Reads PCM 16-bit or IEEE float 32-bit RIFF/WAVE files.
MultichannelWaveform read_wav(const std::filesystem::path& path, const WavReadOptions& options = {});

void write_wav(const std::filesystem::path& path, const MultichannelWaveform& wave,
               WavSampleFormat format = WavSampleFormat::float32);

}  // namespace nbdf
