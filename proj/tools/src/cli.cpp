#include <iostream>

#include <CLI11.hpp>

#include "nbdf_cli/commands.hpp"
#include "nbdf_cli/config_reader.hpp"

namespace nbdf::cli {
namespace {

namespace fs = std::filesystem;

void print_resolved(const std::string& command, const nlohmann::json& config) {
  std::cout << nlohmann::json{{"command", command}, {"config", config}}.dump(2) << std::endl;
}

fs::path config_dir(const fs::path& config) {
  const auto parent = fs::absolute(config).parent_path();
  return parent.empty() ? fs::current_path() : parent;
}

ModelSystem parse_model_system(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) return {fs::path(spec).stem().string(), spec};
  return {spec.substr(0, eq), spec.substr(eq + 1)};
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Narrowband deep filtering for multichannel speech enhancement", "nbdf"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool dry_run = false;

  auto* gen = app.add_subcommand("dataset-gen", "Synthesize scenes and write manifests");
  gen->add_option("--config", config_path, "JSON dataset configuration")->required();
  gen->add_option("--seed", seed, "Override the configured seed");
  gen->add_option("--threads", threads, "Worker threads (0 = all cores)");
  gen->add_flag("--dry-run", dry_run, "Validate and print the configuration only");

  auto* tr = app.add_subcommand("train", "Train a mask estimation network");
  tr->add_option("--config", config_path, "JSON training configuration")->required();
  tr->add_option("--seed", seed, "Override the configured seed");
  tr->add_option("--threads", threads, "Loader threads (0 = all cores)");
  tr->add_flag("--dry-run", dry_run, "Validate and print the configuration only");

  EnhanceArgs enh;
  auto* en = app.add_subcommand("enhance", "Enhance one multichannel WAV file");
  en->add_option("--model", enh.model, "Checkpoint file")->required();
  en->add_option("--input", enh.input, "Multichannel input WAV")->required();
  en->add_option("--output", enh.output, "Mono output WAV")->required();
  en->add_option("--ref-channel", enh.ref_channel, "Reference microphone index");
  en->add_option("--batch-size", enh.batch_size, "Frequency bins per network batch");
  en->add_option("--threads", enh.threads, "Worker threads (0 = all cores)");
  en->add_flag("--resample", enh.resample, "Resample input to the model rate instead of failing");
  en->add_option("--seed", enh.seed, "Recorded for provenance; inference is deterministic");

  EvaluateArgs ev;
  std::vector<std::string> model_specs;
  auto* eva = app.add_subcommand("evaluate", "Score systems on a test manifest");
  eva->add_option("--manifest", ev.manifest, "Test manifest (JSONL)")->required();
  eva->add_option("--baseline", ev.baselines, "oracle-mvdr or oracle-mrm (repeatable)");
  eva->add_option("--model", model_specs, "[NAME=]CHECKPOINT (repeatable)");
  eva->add_option("--output", ev.output_csv, "Per-scene CSV report")->required();
  eva->add_option("--json", ev.output_json, "Optional JSON report with condition summaries");
  eva->add_option("--pesq", ev.pesq, "External PESQ scorer executable");
  eva->add_option("--batch-size", ev.batch_size, "Frequency bins per network batch");
  eva->add_option("--threads", ev.threads, "Scenes scored in parallel");
  eva->add_option("--seed", ev.seed, "Recorded for provenance; evaluation is deterministic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (gen->parsed()) {
      auto config = parse_dataset_gen_config(read_json_file(config_path), config_dir(config_path), seed);
      if (threads) config.threads = *threads;
      print_resolved("dataset-gen", config.to_json());
      if (dry_run) return kExitOk;
      const auto summary = run_dataset_gen(config);
      std::cerr << "dataset-gen: " << summary.generated << " scenes generated, " << summary.reused << " reused\n";
    } else if (tr->parsed()) {
      auto config = parse_train_config(read_json_file(config_path), config_dir(config_path), seed);
      if (threads) config.threads = *threads;
      print_resolved("train", config.to_json());
      if (dry_run) return kExitOk;
      const auto result = run_train(config);
      std::cerr << "train: best epoch " << result.best_epoch << " val_mse " << result.best_val_mse << "\n";
    } else if (en->parsed()) {
      validate(enh);
      print_resolved("enhance", enh.to_json());
      run_enhance(enh);
    } else if (eva->parsed()) {
      for (const auto& spec : model_specs) ev.models.push_back(parse_model_system(spec));
      validate(ev);
      print_resolved("evaluate", ev.to_json());
      run_evaluate(ev);
    }
  } catch (const ConfigError& e) {
    std::cerr << "nbdf: configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "nbdf: error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}

}  // namespace nbdf::cli
