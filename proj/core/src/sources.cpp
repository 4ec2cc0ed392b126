#include "nbdf/sources.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "nbdf/dsp.hpp"
#include "nbdf/wav_io.hpp"

namespace nbdf {

namespace {

void normalize_power(std::vector<double>& x, double target = 1.0) {
  const double p = mean_power(x);
  if (p <= 0.0) return;
  const double g = std::sqrt(target / p);
  for (double& v : x) v *= g;
}

struct Formants {
  std::array<double, 3> freq;
  std::array<double, 3> bandwidth;
};

Formants draw_formants(Rng& rng) {
  return {{uniform(rng, 300.0, 850.0), uniform(rng, 900.0, 2300.0), uniform(rng, 2300.0, 3300.0)},
          {uniform(rng, 60.0, 120.0), uniform(rng, 80.0, 160.0), uniform(rng, 120.0, 220.0)}};
}

double formant_gain(double f, const Formants& a, const Formants& b, double blend) {
  double g = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double fc = (1.0 - blend) * a.freq[i] + blend * b.freq[i];
    const double bw = (1.0 - blend) * a.bandwidth[i] + blend * b.bandwidth[i];
    const double r = (f - fc) / bw;
    g += (i == 0 ? 1.0 : 0.6) / std::sqrt(1.0 + r * r);
  }
  // Glottal source roll-off.
  return g * std::pow(std::max(f, 100.0) / 100.0, -0.7);
}

void add_voiced(std::vector<double>& out, std::size_t begin, std::size_t count, int fs, Rng& rng,
                const SpeechSynthOptions& options) {
  const double f0_start = uniform(rng, options.min_f0, options.max_f0);
  const double f0_end = f0_start * uniform(rng, 0.8, 1.2);
  const Formants from = draw_formants(rng);
  const Formants to = draw_formants(rng);
  const double vibrato_rate = uniform(rng, 4.0, 6.0);
  const double vibrato_depth = uniform(rng, 0.005, 0.02);
  const double nyquist_guard = 0.45 * fs;
  const int max_harmonics = static_cast<int>(nyquist_guard / options.min_f0) + 1;
  std::vector<double> phase(static_cast<std::size_t>(max_harmonics), 0.0);
  for (double& p : phase) p = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  std::vector<double> amp(static_cast<std::size_t>(max_harmonics), 0.0);
  constexpr std::size_t kBlock = 32;

  double base_phase = 0.0;
  for (std::size_t n = 0; n < count; ++n) {
    const double u = static_cast<double>(n) / static_cast<double>(count);
    const double time = static_cast<double>(n) / fs;
    const double f0 = ((1.0 - u) * f0_start + u * f0_end) *
                      (1.0 + vibrato_depth * std::sin(2.0 * std::numbers::pi * vibrato_rate * time));
    const int harmonics = std::min(max_harmonics, static_cast<int>(nyquist_guard / f0));
    if (n % kBlock == 0) {
      for (int h = 0; h < harmonics; ++h) amp[h] = formant_gain((h + 1) * f0, from, to, u);
    }
    base_phase += 2.0 * std::numbers::pi * f0 / fs;
    double s = 0.0;
    for (int h = 0; h < harmonics; ++h) s += amp[h] * std::sin((h + 1) * base_phase + phase[h]);
    out[begin + n] += s;
  }
}

void add_unvoiced(std::vector<double>& out, std::size_t begin, std::size_t count, int fs, Rng& rng) {
  std::vector<double> noise = white_noise(count + 256, rng);
  const double upper = std::min(6500.0, 0.45 * fs);
  const double lower = std::min(2000.0, 0.3 * fs);
  auto hi = butterworth_lowpass(noise, fs, upper, 4);
  auto lo = butterworth_lowpass(noise, fs, lower, 4);
  const double level = uniform(rng, 0.5, 1.2);
  for (std::size_t n = 0; n < count; ++n) out[begin + n] += level * (hi[n + 256] - lo[n + 256]);
}

}  // namespace

std::vector<double> white_noise(std::size_t length, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> x(length);
  for (double& v : x) v = dist(rng);
  return x;
}

std::vector<double> pink_noise(std::size_t length, Rng& rng) {
  if (length < 2) return white_noise(length, rng);
  auto x = white_noise(length, rng);
  detail::RealFft fft(static_cast<int>(length));
  std::vector<Complex> spec(fft.bins());
  fft.forward(x, spec);
  spec[0] = 0.0;
  for (std::size_t k = 1; k < spec.size(); ++k) spec[k] /= std::sqrt(static_cast<double>(k));
  fft.inverse(spec, x);
  normalize_power(x);
  return x;
}

std::vector<double> synthesize_speech(std::size_t length, int sample_rate, Rng& rng, const SpeechSynthOptions& options) {
  std::vector<double> out(length, 0.0);
  std::size_t pos = static_cast<std::size_t>(uniform(rng, 0.0, 0.15) * sample_rate);
  while (pos < length) {
    const double dur = uniform(rng, options.min_syllable, options.max_syllable);
    const std::size_t count = std::min(length - pos, static_cast<std::size_t>(dur * sample_rate));
    if (count < 16) break;
    std::vector<double> syl(count, 0.0);
    const bool unvoiced = uniform(rng, 0.0, 1.0) < options.unvoiced_probability;
    if (unvoiced) add_unvoiced(syl, 0, count, sample_rate, rng);
    else add_voiced(syl, 0, count, sample_rate, rng, options);
    normalize_power(syl);

    const double gain = uniform(rng, 0.4, 1.0);
    const double attack = 0.02 * sample_rate;
    const double release = 0.05 * sample_rate;
    for (std::size_t n = 0; n < count; ++n) {
      double env = 1.0;
      if (n < attack) env = 0.5 - 0.5 * std::cos(std::numbers::pi * n / attack);
      const double tail = static_cast<double>(count - n);
      if (tail < release) env *= 0.5 - 0.5 * std::cos(std::numbers::pi * tail / release);
      out[pos + n] += gain * env * syl[n];
    }
    pos += count;
    double pause = uniform(rng, 0.02, options.max_pause);
    if (uniform(rng, 0.0, 1.0) < 0.1) pause += uniform(rng, 0.1, 0.4);
    pos += static_cast<std::size_t>(pause * sample_rate);
  }
  normalize_power(out, 0.05 * 0.05);
  return out;
}

std::vector<double> SyntheticSpeechSource::draw(std::size_t length, int sample_rate, Rng& rng) const {
  return synthesize_speech(length, sample_rate, rng, options_);
}

CorpusSpeechSource::CorpusSpeechSource(const std::filesystem::path& root, int sample_rate) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) {
    throw std::runtime_error("speech corpus not found at " + root.string() +
                             ": expected a directory tree of mono 16-bit PCM or float WAV files (*.wav) at " +
                             std::to_string(sample_rate) + " Hz");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw std::runtime_error("speech corpus at " + root.string() + " contains no *.wav files (expected mono WAVs at " +
                             std::to_string(sample_rate) + " Hz, any subdirectory layout)");
  }
  WavReadOptions opts;
  opts.expected_sample_rate = sample_rate;
  for (const auto& f : files) {
    auto w = read_wav(f, opts);
    utterances_.emplace_back(w.channel(0).begin(), w.channel(0).end());
  }
}

std::vector<double> CorpusSpeechSource::draw(std::size_t length, int /*sample_rate*/, Rng& rng) const {
  std::vector<double> out;
  out.reserve(length);
  while (out.size() < length) {
    const auto& u = utterances_[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(utterances_.size()) - 1))];
    const std::size_t need = length - out.size();
    std::size_t offset = 0;
    if (u.size() > need) offset = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(u.size() - need)));
    const std::size_t take = std::min(need, u.size() - offset);
    out.insert(out.end(), u.begin() + static_cast<std::ptrdiff_t>(offset),
               u.begin() + static_cast<std::ptrdiff_t>(offset + take));
  }
  return out;
}

std::vector<double> babble_noise(const SpeechSource& speech, std::size_t length, int sample_rate, Rng& rng,
                                 int talkers) {
  std::vector<double> out(length, 0.0);
  for (int i = 0; i < talkers; ++i) {
    auto u = speech.draw(length, sample_rate, rng);
    normalize_power(u);
    for (std::size_t n = 0; n < length; ++n) out[n] += u[n];
  }
  normalize_power(out);
  return out;
}

std::vector<double> wind_lf_noise(std::size_t length, int sample_rate, Rng& rng) {
  auto x = butterworth_lowpass(pink_noise(length, rng), sample_rate, 500.0, 4);
  normalize_power(x);
  return x;
}

}  // namespace nbdf
