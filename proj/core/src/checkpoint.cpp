#include "nbdf/checkpoint.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace nbdf {
namespace {

constexpr std::array<char, 8> kMagic{'N', 'B', 'D', 'F', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

nlohmann::json config_to_json(const ModelConfig& c) {
  const char* act = c.cc_activation == nn::Activation::relu   ? "relu"
                    : c.cc_activation == nn::Activation::tanh ? "tanh"
                                                              : "identity";
  return {{"variant", std::string(to_string(c.variant))},
          {"h1", c.h1},
          {"h2", c.h2},
          {"max_channels", c.max_channels},
          {"cc_feature_maps", c.cc_feature_maps},
          {"cc_kernel", c.cc_kernel},
          {"cc_activation", act},
          {"input_channels", c.input_channels}};
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.variant = parse_variant(j.at("variant").get<std::string>());
  c.h1 = j.at("h1").get<int>();
  c.h2 = j.at("h2").get<int>();
  c.max_channels = j.at("max_channels").get<int>();
  c.cc_feature_maps = j.at("cc_feature_maps").get<int>();
  c.cc_kernel = j.at("cc_kernel").get<int>();
  const auto act = j.at("cc_activation").get<std::string>();
  if (act == "relu") c.cc_activation = nn::Activation::relu;
  else if (act == "tanh") c.cc_activation = nn::Activation::tanh;
  else if (act == "identity") c.cc_activation = nn::Activation::identity;
  else throw std::runtime_error("checkpoint: unknown activation " + act);
  c.input_channels = j.at("input_channels").get<int>();
  return c;
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Network& network, const CheckpointInfo& info) {
  nlohmann::json header;
  header["format"] = "nbdf-checkpoint";
  header["config"] = config_to_json(network.config());
  header["seed"] = info.seed;
  header["stft"] = {{"sample_rate", info.sample_rate}, {"win_len", info.win_len}, {"hop", info.hop}};
  header["training"] = {{"best_epoch", info.best_epoch},
                        {"best_val_mse", std::isfinite(info.best_val_mse) ? nlohmann::json(info.best_val_mse)
                                                                         : nlohmann::json(nullptr)},
                        {"epochs_run", info.epochs_run}};
  header["metadata"] = info.metadata;
  auto tensors = nlohmann::json::array();
  std::uint64_t offset = 0;
  const auto params = network.parameters();
  for (const auto* p : params) {
    tensors.push_back({{"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}, {"offset", offset}});
    offset += static_cast<std::uint64_t>(p->value.size()) * sizeof(float);
  }
  header["tensors"] = tensors;
  const std::string text = header.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint64_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto* p : params)
    out.write(reinterpret_cast<const char*>(p->value.data()), static_cast<std::streamsize>(p->value.size() * sizeof(float)));
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

namespace {

LoadedCheckpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("checkpoint: bad magic in " + path.string());
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kVersion) throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  const auto header_len = read_pod<std::uint64_t>(in);
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw std::runtime_error("checkpoint: truncated header");
  const auto header = nlohmann::json::parse(text);

  LoadedCheckpoint out{Network(config_from_json(header.at("config")), 0), {}};
  auto& info = out.info;
  info.seed = header.at("seed").get<std::uint64_t>();
  info.sample_rate = header.at("stft").at("sample_rate").get<int>();
  info.win_len = header.at("stft").at("win_len").get<int>();
  info.hop = header.at("stft").at("hop").get<int>();
  const auto& training = header.at("training");
  info.best_epoch = training.at("best_epoch").get<int>();
  info.best_val_mse = training.at("best_val_mse").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                            : training.at("best_val_mse").get<double>();
  info.epochs_run = training.at("epochs_run").get<int>();
  info.metadata = header.at("metadata").get<std::map<std::string, std::string>>();

  const auto& tensors = header.at("tensors");
  auto params = out.network.parameters();
  if (tensors.size() != params.size()) throw std::runtime_error("checkpoint: tensor count mismatch");
  const auto data_start = in.tellg();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& t = tensors[i];
    auto* p = params[i];
    if (t.at("name").get<std::string>() != p->name || t.at("rows").get<Eigen::Index>() != p->value.rows() ||
        t.at("cols").get<Eigen::Index>() != p->value.cols()) {
      throw std::runtime_error("checkpoint: tensor " + t.at("name").get<std::string>() + " does not match the model");
    }
    in.seekg(data_start + static_cast<std::streamoff>(t.at("offset").get<std::uint64_t>()));
    in.read(reinterpret_cast<char*>(p->value.data()), static_cast<std::streamsize>(p->value.size() * sizeof(float)));
    if (!in) throw std::runtime_error("checkpoint: truncated tensor data");
  }
  return out;
}

}  // namespace

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  try {
    return read_checkpoint(path);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("checkpoint: malformed header in " + path.string() + ": " + e.what());
  }
}

}  // namespace nbdf
