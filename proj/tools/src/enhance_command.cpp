#include <algorithm>
#include <iostream>

#include "nbdf/checkpoint.hpp"
#include "nbdf/enhance.hpp"
#include "nbdf/wav_io.hpp"
#include "nbdf_cli/commands.hpp"

namespace nbdf::cli {

void validate(const EnhanceArgs& args) {
  if (args.model.empty()) throw ConfigError("enhance: --model is required");
  if (args.input.empty()) throw ConfigError("enhance: --input is required");
  if (args.output.empty()) throw ConfigError("enhance: --output is required");
  if (args.ref_channel < 0) throw ConfigError("enhance: --ref-channel must be non-negative");
  if (args.batch_size < 1) throw ConfigError("enhance: --batch-size must be positive");
}

nlohmann::json EnhanceArgs::to_json() const {
  return {{"model", model.string()},       {"input", input.string()},   {"output", output.string()},
          {"ref_channel", ref_channel},    {"batch_size", batch_size},  {"threads", threads},
          {"resample", resample},          {"seed", seed}};
}

void run_enhance(const EnhanceArgs& args) {
  validate(args);
  auto checkpoint = load_checkpoint(args.model);
  WavReadOptions read;
  read.expected_sample_rate = checkpoint.info.sample_rate;
  read.allow_resample = args.resample;
  const auto input = read_wav(args.input, read);
  if (args.ref_channel >= input.channels())
    throw std::invalid_argument("enhance: --ref-channel " + std::to_string(args.ref_channel) + " but the input has " +
                                std::to_string(input.channels()) + " channels");

  const auto network = std::make_shared<const Network>(std::move(checkpoint.network));
  const NetworkMaskEstimator estimator(network, args.batch_size, args.threads);
  const StftConfig stft{checkpoint.info.win_len, checkpoint.info.hop};
  const auto enhanced = enhance(input, estimator, args.ref_channel, stft);

  MultichannelWaveform out(1, input.length(), input.sample_rate());
  const auto n = std::min(enhanced.length(), input.length());
  std::copy_n(enhanced.channel(0).begin(), n, out.channel(0).begin());
  if (args.output.has_parent_path()) std::filesystem::create_directories(args.output.parent_path());
  write_wav(args.output, out);
  std::cerr << "enhance: wrote " << args.output.string() << " (" << out.length() << " samples)\n";
}

}  // namespace nbdf::cli
