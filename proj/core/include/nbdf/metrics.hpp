#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbdf/manifest.hpp"

namespace nbdf {

/// Scale-invariant SDR in dB, clamped to [-60, 60]. Throws
/// std::invalid_argument on unequal lengths or an all-zero reference.
double si_sdr(std::span<const double> clean, std::span<const double> estimate);

/// Short-time objective intelligibility. Both signals are resampled to
/// 10 kHz, silent frames of the clean signal are dropped, and 384 ms
/// one-third-octave envelopes are compared with clipped correlation.
/// Throws std::invalid_argument on unequal lengths or when fewer than 30
/// analysis frames remain.
double stoi(std::span<const double> clean, std::span<const double> estimate, int sample_rate);

/// Optional external PESQ scorer, invoked as `<executable> <clean.wav> <estimate.wav> <sample_rate>`;
/// the last number printed on stdout is taken as the score.
struct PesqHook {
  std::filesystem::path executable;
  std::filesystem::path scratch_dir;
};

std::optional<double> run_pesq(const PesqHook& hook, std::span<const double> clean, std::span<const double> estimate,
                               int sample_rate);

struct EvaluationRow {
  std::string scene_id;
  std::string system;
  std::string array_tag;
  int channels = 0;
  double snr_db = 0.0;
  double stoi_noisy = 0.0;
  double stoi_enh = 0.0;
  double sisdr_noisy = 0.0;
  double sisdr_enh = 0.0;
  std::optional<double> pesq_noisy;
  std::optional<double> pesq_enh;
};

/// Means over the rows of one system restricted to one condition.
struct ConditionSummary {
  std::string system;
  std::string condition;  // "all", "array=<tag>", "M=<n>" or "snr=[lo,hi)"
  std::size_t count = 0;
  double stoi_noisy = 0.0;
  double stoi_enh = 0.0;
  double sisdr_noisy = 0.0;
  double sisdr_enh = 0.0;
  double delta_stoi() const { return stoi_enh - stoi_noisy; }
  double delta_sisdr() const { return sisdr_enh - sisdr_noisy; }
};

struct MissingOutput {
  std::string scene_id;
  std::string system;
  std::string reason;
};

struct EvaluationReport {
  std::vector<EvaluationRow> rows;
  std::vector<ConditionSummary> summaries;
  std::vector<MissingOutput> missing;
};

/// Produces the enhanced reference-channel signal of one scene, or nullopt
/// if the system has no output for it.
using SystemFn = std::function<std::optional<std::vector<double>>(const ManifestEntry&, const SceneSample&)>;

struct SystemSpec {
  std::string name;
  SystemFn run;
};

struct EvaluationOptions {
  unsigned threads = 1;
  std::optional<PesqHook> pesq;
};

/// Scores one output against the scene's clean reference-channel image. Both
/// signals are cut to their common length.
EvaluationRow score_scene(const ManifestEntry& entry, const SceneSample& scene, std::span<const double> enhanced,
                          const std::string& system, const std::optional<PesqHook>& pesq = std::nullopt);

/// Runs every system on every scene. Systems that fail or return nothing for
/// a scene are listed in `missing` and excluded from the means. Throws
/// std::invalid_argument on an empty manifest or an empty system list.
EvaluationReport evaluate_manifest(const std::vector<ManifestEntry>& manifest, const std::vector<SystemSpec>& systems,
                                   const EvaluationOptions& options = {});

/// Recomputes the condition summaries from report rows.
std::vector<ConditionSummary> summarize(const std::vector<EvaluationRow>& rows);

void write_report_csv(const std::filesystem::path& path, const EvaluationReport& report);
void write_report_json(const std::filesystem::path& path, const EvaluationReport& report);

}  // namespace nbdf
