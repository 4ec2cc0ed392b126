#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "nbdf/random.hpp"

namespace nbdf {

struct SpeechSynthOptions {
  double min_f0 = 90.0;
  double max_f0 = 250.0;
  double min_syllable = 0.12;  // seconds
  double max_syllable = 0.32;
  double max_pause = 0.30;
  double unvoiced_probability = 0.2;
};

/// Speech-like test signal: syllables of formant-shaped harmonic complexes
/// with gliding pitch, fricative noise bursts and pauses. Used when no
/// recorded speech corpus is available.
std::vector<double> synthesize_speech(std::size_t length, int sample_rate, Rng& rng,
                                      const SpeechSynthOptions& options = {});

std::vector<double> white_noise(std::size_t length, Rng& rng);
std::vector<double> pink_noise(std::size_t length, Rng& rng);

/// Source of clean single-channel utterances.
class SpeechSource {
 public:
  virtual ~SpeechSource() = default;
  virtual std::vector<double> draw(std::size_t length, int sample_rate, Rng& rng) const = 0;
};

class SyntheticSpeechSource final : public SpeechSource {
 public:
  explicit SyntheticSpeechSource(SpeechSynthOptions options = {}) : options_(options) {}
  std::vector<double> draw(std::size_t length, int sample_rate, Rng& rng) const override;

 private:
  SpeechSynthOptions options_;
};

/// Utterances from a directory tree of mono WAV files at the target rate.
/// Short files are looped; longer ones are cropped at a random offset.
class CorpusSpeechSource final : public SpeechSource {
 public:
  CorpusSpeechSource(const std::filesystem::path& root, int sample_rate);
  std::vector<double> draw(std::size_t length, int sample_rate, Rng& rng) const override;
  std::size_t size() const { return utterances_.size(); }

 private:
  std::vector<std::vector<double>> utterances_;
};

/// Sum of `talkers` independent utterances, normalized to unit power.
std::vector<double> babble_noise(const SpeechSource& speech, std::size_t length, int sample_rate, Rng& rng,
                                 int talkers = 6);

/// Low-frequency wind-like noise: pink noise low-passed at 500 Hz, unit power.
std::vector<double> wind_lf_noise(std::size_t length, int sample_rate, Rng& rng);

}  // namespace nbdf
