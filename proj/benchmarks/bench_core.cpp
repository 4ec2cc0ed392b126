#include <benchmark/benchmark.h>

#include <random>

#include "nbdf/metrics.hpp"
#include "nbdf/mvdr.hpp"
#include "nbdf/network.hpp"
#include "nbdf/rir.hpp"
#include "nbdf/scene.hpp"
#include "nbdf/sources.hpp"
#include "nbdf/stft.hpp"

using namespace nbdf;

namespace {

MultichannelWaveform noise_wave(int channels, int rate, double seconds) {
  Rng rng(1);
  std::vector<std::vector<double>> data;
  for (int m = 0; m < channels; ++m) data.push_back(white_noise(static_cast<std::size_t>(seconds * rate), rng));
  return MultichannelWaveform(std::move(data), rate);
}

// Random network inputs [frames x 2M] for `batch` sequences.
std::vector<std::vector<float>> random_inputs(int batch, int frames, int channels) {
  std::mt19937_64 rng(2);
  std::normal_distribution<float> dist(0.0f, 1.0f);
  std::vector<std::vector<float>> data(static_cast<std::size_t>(batch));
  for (auto& seq : data) {
    seq.resize(static_cast<std::size_t>(frames) * 2 * channels);
    for (auto& v : seq) v = dist(rng);
  }
  return data;
}

}  // namespace

static void BM_Stft(benchmark::State& state) {
  const auto wave = noise_wave(static_cast<int>(state.range(0)), 16000, 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(stft(wave, StftConfig::for_sample_rate(16000)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(wave.data().size()));
}
BENCHMARK(BM_Stft)->Arg(1)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_StftRoundTrip(benchmark::State& state) {
  const auto wave = noise_wave(6, 16000, 3.0);
  const auto cfg = StftConfig::for_sample_rate(16000);
  for (auto _ : state) benchmark::DoNotOptimize(istft(stft(wave, cfg)));
}
BENCHMARK(BM_StftRoundTrip)->Unit(benchmark::kMillisecond);

static void BM_NetworkForward(benchmark::State& state) {
  ModelConfig cfg;
  cfg.variant = static_cast<Variant>(state.range(0));
  cfg.input_channels = 6;
  const Network net(cfg, 3);
  const int batch = 16, frames = 64, channels = 6;
  const auto data = random_inputs(batch, frames, channels);
  std::vector<nn::SequenceView<float>> views;
  for (const auto& seq : data) views.push_back({seq.data(), frames, 2 * channels});
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(views));
  state.SetLabel(std::string(to_string(cfg.variant)));
  state.SetItemsProcessed(state.iterations() * batch * frames);
}
BENCHMARK(BM_NetworkForward)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

static void BM_Rir(benchmark::State& state) {
  RoomSpec room;
  room.dimensions = {6.0, 5.0, 3.0};
  room.rt60 = static_cast<double>(state.range(0)) / 10.0;
  const Point3 source{1.5, 1.2, 1.4};
  const Point3 mic{3.6, 2.7, 1.6};
  for (auto _ : state) benchmark::DoNotOptimize(simulate_rir(room, source, mic, 16000));
}
BENCHMARK(BM_Rir)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_OracleMvdr(benchmark::State& state) {
  const int channels = static_cast<int>(state.range(0));
  const auto speech = noise_wave(channels, 16000, 3.0);
  auto noise = noise_wave(channels, 16000, 3.0);
  noise *= 0.5;
  const auto cfg = StftConfig::for_sample_rate(16000);
  const auto s = stft(speech, cfg);
  const auto n = stft(noise, cfg);
  const auto x = stft(speech + noise, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_mvdr(x, s, n, 0));
}
BENCHMARK(BM_OracleMvdr)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_Stoi(benchmark::State& state) {
  Rng rng(4);
  const auto clean = synthesize_speech(3 * 16000, 16000, rng);
  auto noisy = clean;
  const auto n = white_noise(clean.size(), rng);
  for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] += 0.1 * n[i];
  for (auto _ : state) benchmark::DoNotOptimize(stoi(clean, noisy, 16000));
}
BENCHMARK(BM_Stoi)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
