#include "nbdf/wav_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "nbdf/resample.hpp"

namespace nbdf {

namespace {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T read_le(const std::vector<char>& buf, std::size_t offset) {
  T v;
  std::memcpy(&v, buf.data() + offset, sizeof(T));
  return v;
}

template <typename T>
void write_le(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

MultichannelWaveform read_wav(const std::filesystem::path& path, const WavReadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("wav: cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 || std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw std::runtime_error("wav: not a RIFF/WAVE file: " + path.string());
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_offset = 0, data_size = 0;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::string id(buf.data() + pos, 4);
    const auto size = read_le<std::uint32_t>(buf, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      if (size < 16 || body + size > buf.size()) throw std::runtime_error("wav: truncated fmt chunk");
      format = read_le<std::uint16_t>(buf, body);
      channels = read_le<std::uint16_t>(buf, body + 2);
      rate = read_le<std::uint32_t>(buf, body + 4);
      bits = read_le<std::uint16_t>(buf, body + 14);
      if (format == kFormatExtensible && size >= 26) format = read_le<std::uint16_t>(buf, body + 24);
      have_fmt = true;
    } else if (id == "data") {
      data_offset = body;
      data_size = std::min<std::size_t>(size, buf.size() - body);
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt || data_offset == 0) throw std::runtime_error("wav: missing fmt or data chunk: " + path.string());
  if (channels == 0) throw std::runtime_error("wav: zero channels");
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32) throw std::runtime_error("wav: only 16-bit PCM and 32-bit float are supported");

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frames = data_size / (bytes_per_sample * channels);
  MultichannelWaveform wave(channels, frames, static_cast<int>(rate));
  for (std::size_t n = 0; n < frames; ++n) {
    for (int m = 0; m < channels; ++m) {
      const std::size_t off = data_offset + (n * channels + m) * bytes_per_sample;
      wave.at(m, n) = pcm16 ? read_le<std::int16_t>(buf, off) / 32768.0 : static_cast<double>(read_le<float>(buf, off));
    }
  }

  if (options.expected_sample_rate > 0 && wave.sample_rate() != options.expected_sample_rate) {
    if (!options.allow_resample) {
      throw std::runtime_error("wav: " + path.string() + " has sample rate " + std::to_string(wave.sample_rate()) +
                               ", expected " + std::to_string(options.expected_sample_rate));
    }
    return resample(wave, options.expected_sample_rate);
  }
  return wave;
}

void write_wav(const std::filesystem::path& path, const MultichannelWaveform& wave, WavSampleFormat format) {
  if (wave.channels() < 1) throw std::invalid_argument("wav: nothing to write");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("wav: cannot create " + path.string());

  const bool pcm = format == WavSampleFormat::pcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint16_t channels = static_cast<std::uint16_t>(wave.channels());
  const std::uint32_t rate = static_cast<std::uint32_t>(wave.sample_rate());
  const std::uint16_t block_align = static_cast<std::uint16_t>(channels * bits / 8);
  const std::uint32_t data_size = static_cast<std::uint32_t>(wave.length() * block_align);

  out.write("RIFF", 4);
  write_le<std::uint32_t>(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_le<std::uint32_t>(out, 16);
  write_le<std::uint16_t>(out, pcm ? kFormatPcm : kFormatFloat);
  write_le<std::uint16_t>(out, channels);
  write_le<std::uint32_t>(out, rate);
  write_le<std::uint32_t>(out, rate * block_align);
  write_le<std::uint16_t>(out, block_align);
  write_le<std::uint16_t>(out, bits);
  out.write("data", 4);
  write_le<std::uint32_t>(out, data_size);

  std::vector<char> frame(block_align);
  for (std::size_t n = 0; n < wave.length(); ++n) {
    for (int m = 0; m < channels; ++m) {
      const double v = wave.at(m, n);
      if (pcm) {
        const auto s = static_cast<std::int16_t>(std::clamp(std::lround(v * 32768.0), -32768L, 32767L));
        std::memcpy(frame.data() + m * 2, &s, 2);
      } else {
        const auto f = static_cast<float>(v);
        std::memcpy(frame.data() + m * 4, &f, 4);
      }
    }
    out.write(frame.data(), block_align);
  }
  if (!out) throw std::runtime_error("wav: write failed for " + path.string());
}

}  // namespace nbdf
