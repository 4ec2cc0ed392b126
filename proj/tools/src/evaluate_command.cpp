#include <iostream>
#include <set>

#include "nbdf/checkpoint.hpp"
#include "nbdf/enhance.hpp"
#include "nbdf/manifest.hpp"
#include "nbdf/mvdr.hpp"
#include "nbdf_cli/commands.hpp"

namespace nbdf::cli {
namespace {

using Output = std::optional<std::vector<double>>;

std::vector<double> first_channel(const MultichannelWaveform& w) {
  const auto ch = w.channel(0);
  return {ch.begin(), ch.end()};
}

SystemSpec unprocessed_system() {
  return {"unprocessed", [](const ManifestEntry&, const SceneSample& scene) -> Output {
            const auto ch = scene.mixture.channel(scene.ref_index);
            return std::vector<double>(ch.begin(), ch.end());
          }};
}

SystemSpec baseline_system(const std::string& name) {
  if (name == "oracle-mvdr") {
    return {name, [](const ManifestEntry&, const SceneSample& scene) -> Output {
              const auto spectra = analyze_scene(scene, StftConfig::for_sample_rate(scene.mixture.sample_rate()));
              const auto r = oracle_mvdr(spectra.mixture, spectra.speech, spectra.noise, scene.ref_index);
              return first_channel(istft(r.output));
            }};
  }
  return {name, [](const ManifestEntry&, const SceneSample& scene) -> Output {
            const auto cfg = StftConfig::for_sample_rate(scene.mixture.sample_rate());
            const auto spectra = analyze_scene(scene, cfg);
            const FixedMaskEstimator oracle(oracle_mrm(spectra.speech, spectra.mixture, scene.ref_index));
            return first_channel(enhance(scene.mixture, oracle, scene.ref_index, cfg));
          }};
}

SystemSpec model_system(const ModelSystem& model, int manifest_rate, int batch_size) {
  auto checkpoint = load_checkpoint(model.checkpoint);
  if (checkpoint.info.sample_rate != manifest_rate)
    throw std::runtime_error("evaluate: checkpoint " + model.checkpoint.string() + " was trained at " +
                             std::to_string(checkpoint.info.sample_rate) + " Hz but the manifest is at " +
                             std::to_string(manifest_rate) + " Hz");
  const StftConfig stft{checkpoint.info.win_len, checkpoint.info.hop};
  auto estimator = std::make_shared<const NetworkMaskEstimator>(
      std::make_shared<const Network>(std::move(checkpoint.network)), batch_size, 1);
  return {model.name, [estimator, stft](const ManifestEntry&, const SceneSample& scene) -> Output {
            return first_channel(enhance(scene.mixture, *estimator, scene.ref_index, stft));
          }};
}

}  // namespace

void validate(const EvaluateArgs& args) {
  if (args.manifest.empty()) throw ConfigError("evaluate: --manifest is required");
  if (args.output_csv.empty()) throw ConfigError("evaluate: --output is required");
  if (args.batch_size < 1) throw ConfigError("evaluate: --batch-size must be positive");
  std::set<std::string> names{"unprocessed"};
  for (const auto& b : args.baselines) {
    if (b != "oracle-mvdr" && b != "oracle-mrm")
      throw ConfigError("evaluate: unknown baseline " + b + " (expected oracle-mvdr or oracle-mrm)");
    if (!names.insert(b).second) throw ConfigError("evaluate: system " + b + " listed twice");
  }
  for (const auto& m : args.models) {
    if (m.name.empty() || m.checkpoint.empty()) throw ConfigError("evaluate: --model expects [NAME=]PATH");
    if (!names.insert(m.name).second) throw ConfigError("evaluate: system " + m.name + " listed twice");
  }
}

nlohmann::json EvaluateArgs::to_json() const {
  nlohmann::json models_json = nlohmann::json::array();
  for (const auto& m : models) models_json.push_back({{"name", m.name}, {"checkpoint", m.checkpoint.string()}});
  return {{"manifest", manifest.string()},
          {"baselines", baselines},
          {"models", models_json},
          {"output", output_csv.string()},
          {"json", output_json ? nlohmann::json(output_json->string()) : nlohmann::json(nullptr)},
          {"pesq", pesq ? nlohmann::json(pesq->string()) : nlohmann::json(nullptr)},
          {"batch_size", batch_size},
          {"threads", threads},
          {"seed", seed}};
}

EvaluationReport run_evaluate(const EvaluateArgs& args) {
  validate(args);
  const auto manifest = read_manifest(args.manifest);
  if (manifest.empty()) throw std::runtime_error("evaluate: manifest " + args.manifest.string() + " is empty");

  std::vector<SystemSpec> systems{unprocessed_system()};
  for (const auto& b : args.baselines) systems.push_back(baseline_system(b));
  for (const auto& m : args.models) systems.push_back(model_system(m, manifest.front().sample_rate, args.batch_size));

  EvaluationOptions options;
  options.threads = args.threads;
  if (args.pesq) options.pesq = PesqHook{*args.pesq, args.output_csv.parent_path() / "pesq_scratch"};
  auto report = evaluate_manifest(manifest, systems, options);

  if (args.output_csv.has_parent_path()) std::filesystem::create_directories(args.output_csv.parent_path());
  write_report_csv(args.output_csv, report);
  if (args.output_json) write_report_json(*args.output_json, report);
  for (const auto& m : report.missing)
    std::cerr << "evaluate: no output from " << m.system << " for " << m.scene_id << ": " << m.reason << "\n";
  for (const auto& s : report.summaries) {
    if (s.condition != "all") continue;
    std::cerr << "evaluate: " << s.system << " over " << s.count << " scenes: STOI " << s.stoi_noisy << " -> "
              << s.stoi_enh << ", SI-SDR " << s.sisdr_noisy << " -> " << s.sisdr_enh << " dB\n";
  }
  return report;
}

}  // namespace nbdf::cli
