#include "nbdf/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <regex>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "fft.hpp"
#include "nbdf/parallel.hpp"
#include "nbdf/resample.hpp"
#include "nbdf/wav_io.hpp"

namespace nbdf {
namespace {

constexpr double kSdrLimit = 60.0;
constexpr int kStoiRate = 10000;
constexpr int kStoiFrame = 256;
constexpr int kStoiFft = 512;
constexpr int kStoiBands = 15;
constexpr double kStoiMinFreq = 150.0;
constexpr int kStoiSegment = 30;
constexpr double kStoiBeta = -15.0;
constexpr double kStoiDynRange = 40.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

std::vector<double> stoi_window() {
  std::vector<double> w(kStoiFrame);
  for (int i = 0; i < kStoiFrame; ++i)
    w[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i + 1) / (kStoiFrame + 1));
  return w;
}

// Drops frames of both signals whose clean energy is more than the dynamic
// range below the loudest frame, then overlap-adds what is left.
void remove_silent_frames(std::vector<double>& x, std::vector<double>& y, const std::vector<double>& w) {
  const int hop = kStoiFrame / 2;
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i + kStoiFrame <= x.size(); i += hop) starts.push_back(i);
  std::vector<double> energy(starts.size());
  for (std::size_t f = 0; f < starts.size(); ++f) {
    double e = 0.0;
    for (int n = 0; n < kStoiFrame; ++n) {
      const double v = w[static_cast<std::size_t>(n)] * x[starts[f] + static_cast<std::size_t>(n)];
      e += v * v;
    }
    energy[f] = 20.0 * std::log10(std::sqrt(e) + kEps);
  }
  const double top = energy.empty() ? 0.0 : *std::max_element(energy.begin(), energy.end());
  std::vector<std::size_t> kept;
  for (std::size_t f = 0; f < starts.size(); ++f)
    if (top - kStoiDynRange - energy[f] < 0.0) kept.push_back(starts[f]);
  const std::size_t len = kept.empty() ? 0 : (kept.size() - 1) * hop + kStoiFrame;
  std::vector<double> xs(len, 0.0), ys(len, 0.0);
  for (std::size_t j = 0; j < kept.size(); ++j) {
    for (int n = 0; n < kStoiFrame; ++n) {
      const std::size_t dst = j * hop + static_cast<std::size_t>(n);
      xs[dst] += w[static_cast<std::size_t>(n)] * x[kept[j] + static_cast<std::size_t>(n)];
      ys[dst] += w[static_cast<std::size_t>(n)] * y[kept[j] + static_cast<std::size_t>(n)];
    }
  }
  x = std::move(xs);
  y = std::move(ys);
}

// One-third-octave band envelopes [bands x frames].
RealMatrix third_octave_envelopes(const std::vector<double>& x, const std::vector<double>& w,
                                  const std::vector<std::pair<int, int>>& bands) {
  const int hop = kStoiFrame / 2;
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i + kStoiFrame < x.size(); i += hop) starts.push_back(i);
  detail::RealFft fft(kStoiFft);
  std::vector<double> frame(kStoiFft, 0.0);
  std::vector<Complex> spec(static_cast<std::size_t>(fft.bins()));
  RealMatrix env(kStoiBands, static_cast<Eigen::Index>(starts.size()));
  for (std::size_t f = 0; f < starts.size(); ++f) {
    for (int n = 0; n < kStoiFrame; ++n)
      frame[static_cast<std::size_t>(n)] = w[static_cast<std::size_t>(n)] * x[starts[f] + static_cast<std::size_t>(n)];
    fft.forward(frame, spec);
    for (int b = 0; b < kStoiBands; ++b) {
      double e = 0.0;
      for (int k = bands[static_cast<std::size_t>(b)].first; k < bands[static_cast<std::size_t>(b)].second; ++k)
        e += std::norm(spec[static_cast<std::size_t>(k)]);
      env(b, static_cast<Eigen::Index>(f)) = std::sqrt(e);
    }
  }
  return env;
}

std::vector<std::pair<int, int>> third_octave_bands() {
  const int bins = kStoiFft / 2 + 1;
  auto nearest = [&](double freq) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < bins; ++k) {
      const double d = std::abs(k * static_cast<double>(kStoiRate) / kStoiFft - freq);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    return best;
  };
  std::vector<std::pair<int, int>> bands;
  for (int i = 0; i < kStoiBands; ++i) {
    const double lo = kStoiMinFreq * std::pow(2.0, (2.0 * i - 1.0) / 6.0);
    const double hi = kStoiMinFreq * std::pow(2.0, (2.0 * i + 1.0) / 6.0);
    bands.emplace_back(nearest(lo), nearest(hi));
  }
  return bands;
}

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string snr_bucket(double snr) {
  const double lo = std::floor(snr / 5.0) * 5.0;
  return "snr=[" + fmt(lo, "%g") + "," + fmt(lo + 5.0, "%g") + ")";
}

}  // namespace

double si_sdr(std::span<const double> clean, std::span<const double> estimate) {
  if (clean.size() != estimate.size()) throw std::invalid_argument("si_sdr: signals differ in length");
  double cc = 0.0, ec = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    cc += clean[i] * clean[i];
    ec += estimate[i] * clean[i];
  }
  if (!(cc > 0.0)) throw std::invalid_argument("si_sdr: reference signal is all zero");
  const double alpha = ec / cc;
  double target = 0.0, residual = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double s = alpha * clean[i];
    const double r = estimate[i] - s;
    target += s * s;
    residual += r * r;
  }
  if (!(residual > 0.0)) return kSdrLimit;
  if (!(target > 0.0)) return -kSdrLimit;
  return std::clamp(10.0 * std::log10(target / residual), -kSdrLimit, kSdrLimit);
}

double stoi(std::span<const double> clean, std::span<const double> estimate, int sample_rate) {
  if (clean.size() != estimate.size()) throw std::invalid_argument("stoi: signals differ in length");
  if (sample_rate <= 0) throw std::invalid_argument("stoi: invalid sample rate");
  std::vector<double> x, y;
  if (sample_rate == kStoiRate) {
    x.assign(clean.begin(), clean.end());
    y.assign(estimate.begin(), estimate.end());
  } else {
    x = resample(clean, sample_rate, kStoiRate);
    y = resample(estimate, sample_rate, kStoiRate);
  }
  const auto w = stoi_window();
  remove_silent_frames(x, y, w);
  static const auto bands = third_octave_bands();
  const RealMatrix xe = third_octave_envelopes(x, w, bands);
  const RealMatrix ye = third_octave_envelopes(y, w, bands);
  const auto frames = xe.cols();
  if (frames < kStoiSegment)
    throw std::invalid_argument("stoi: signal too short, need at least " + std::to_string(kStoiSegment) +
                                " non-silent analysis frames");
  const double clip = std::pow(10.0, -kStoiBeta / 20.0);
  const Eigen::Index segments = frames - kStoiSegment + 1;
  double total = 0.0;
  Eigen::VectorXd xs(kStoiSegment), ys(kStoiSegment);
  for (Eigen::Index m = 0; m < segments; ++m) {
    for (int b = 0; b < kStoiBands; ++b) {
      xs = xe.row(b).segment(m, kStoiSegment).transpose();
      ys = ye.row(b).segment(m, kStoiSegment).transpose();
      ys *= xs.norm() / (ys.norm() + kEps);
      ys = ys.cwiseMin(xs * (1.0 + clip));
      ys.array() -= ys.mean();
      xs.array() -= xs.mean();
      ys /= ys.norm() + kEps;
      xs /= xs.norm() + kEps;
      total += xs.dot(ys);
    }
  }
  return total / static_cast<double>(segments * kStoiBands);
}

std::optional<double> run_pesq(const PesqHook& hook, std::span<const double> clean, std::span<const double> estimate,
                               int sample_rate) {
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  std::filesystem::create_directories(hook.scratch_dir);
  const auto ref_path = hook.scratch_dir / "pesq_ref.wav";
  const auto deg_path = hook.scratch_dir / "pesq_deg.wav";
  write_wav(ref_path, MultichannelWaveform({std::vector<double>(clean.begin(), clean.end())}, sample_rate),
            WavSampleFormat::pcm16);
  write_wav(deg_path, MultichannelWaveform({std::vector<double>(estimate.begin(), estimate.end())}, sample_rate),
            WavSampleFormat::pcm16);
  const std::string cmd = "\"" + hook.executable.string() + "\" \"" + ref_path.string() + "\" \"" + deg_path.string() +
                          "\" " + std::to_string(sample_rate);
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return std::nullopt;
  std::string output;
  std::array<char, 256> buf{};
  while (fgets(buf.data(), static_cast<int>(buf.size()), pipe)) output += buf.data();
  if (pclose(pipe) != 0) return std::nullopt;
  static const std::regex number(R"([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)");
  std::optional<double> last;
  for (auto it = std::sregex_iterator(output.begin(), output.end(), number); it != std::sregex_iterator(); ++it)
    last = std::stod(it->str());
  return last;
}

EvaluationRow score_scene(const ManifestEntry& entry, const SceneSample& scene, std::span<const double> enhanced,
                          const std::string& system, const std::optional<PesqHook>& pesq) {
  const auto clean_full = scene.speech_image.channel(scene.ref_index);
  const auto noisy_full = scene.mixture.channel(scene.ref_index);
  const std::size_t len = std::min(clean_full.size(), enhanced.size());
  const auto clean = clean_full.first(len);
  const auto noisy = noisy_full.first(len);
  const auto est = enhanced.first(len);
  const int fs = scene.mixture.sample_rate();
  EvaluationRow row;
  row.scene_id = entry.scene_id;
  row.system = system;
  row.array_tag = std::string(to_string(entry.array.tag));
  row.channels = entry.array.channels();
  row.snr_db = entry.snr_db;
  row.stoi_noisy = stoi(clean, noisy, fs);
  row.stoi_enh = stoi(clean, est, fs);
  row.sisdr_noisy = si_sdr(clean, noisy);
  row.sisdr_enh = si_sdr(clean, est);
  if (pesq) {
    row.pesq_noisy = run_pesq(*pesq, clean, noisy, fs);
    row.pesq_enh = run_pesq(*pesq, clean, est, fs);
  }
  return row;
}

std::vector<ConditionSummary> summarize(const std::vector<EvaluationRow>& rows) {
  std::map<std::pair<std::string, std::string>, ConditionSummary> acc;
  auto add = [&](const EvaluationRow& r, const std::string& cond) {
    auto& s = acc[{r.system, cond}];
    s.system = r.system;
    s.condition = cond;
    ++s.count;
    s.stoi_noisy += r.stoi_noisy;
    s.stoi_enh += r.stoi_enh;
    s.sisdr_noisy += r.sisdr_noisy;
    s.sisdr_enh += r.sisdr_enh;
  };
  for (const auto& r : rows) {
    add(r, "all");
    add(r, "array=" + r.array_tag);
    add(r, "M=" + std::to_string(r.channels));
    add(r, snr_bucket(r.snr_db));
  }
  std::vector<ConditionSummary> out;
  for (auto& [key, s] : acc) {
    const double n = static_cast<double>(s.count);
    s.stoi_noisy /= n;
    s.stoi_enh /= n;
    s.sisdr_noisy /= n;
    s.sisdr_enh /= n;
    out.push_back(s);
  }
  return out;
}

EvaluationReport evaluate_manifest(const std::vector<ManifestEntry>& manifest, const std::vector<SystemSpec>& systems,
                                   const EvaluationOptions& options) {
  if (manifest.empty()) throw std::invalid_argument("evaluate: empty manifest");
  if (systems.empty()) throw std::invalid_argument("evaluate: no systems to evaluate");
  const std::size_t per_scene = systems.size();
  std::vector<std::optional<EvaluationRow>> rows(manifest.size() * per_scene);
  std::vector<std::optional<MissingOutput>> missing(rows.size());
  parallel_for(manifest.size(), options.threads, [&](std::size_t i) {
    const auto& entry = manifest[i];
    const auto scene = load_scene(entry);
    for (std::size_t s = 0; s < per_scene; ++s) {
      const auto slot = i * per_scene + s;
      try {
        const auto out = systems[s].run(entry, scene);
        if (!out) {
          missing[slot] = MissingOutput{entry.scene_id, systems[s].name, "no output"};
          continue;
        }
        rows[slot] = score_scene(entry, scene, *out, systems[s].name, options.pesq);
      } catch (const std::exception& e) {
        missing[slot] = MissingOutput{entry.scene_id, systems[s].name, e.what()};
      }
    }
  });
  EvaluationReport report;
  for (auto& r : rows)
    if (r) report.rows.push_back(std::move(*r));
  for (auto& m : missing)
    if (m) report.missing.push_back(std::move(*m));
  report.summaries = summarize(report.rows);
  return report;
}

void write_report_csv(const std::filesystem::path& path, const EvaluationReport& report) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report " + path.string());
  const bool pesq = std::any_of(report.rows.begin(), report.rows.end(), [](const auto& r) { return r.pesq_enh.has_value(); });
  out << "scene_id,system,array_tag,M,snr_db,stoi_noisy,stoi_enh,sisdr_noisy,sisdr_enh";
  if (pesq) out << ",pesq_noisy,pesq_enh";
  out << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  for (const auto& r : report.rows) {
    out << r.scene_id << ',' << r.system << ',' << r.array_tag << ',' << r.channels << ',' << fmt(r.snr_db, "%.3f")
        << ',' << fmt(r.stoi_noisy) << ',' << fmt(r.stoi_enh) << ',' << fmt(r.sisdr_noisy) << ',' << fmt(r.sisdr_enh);
    if (pesq) out << ',' << opt(r.pesq_noisy) << ',' << opt(r.pesq_enh);
    out << '\n';
  }
}

void write_report_json(const std::filesystem::path& path, const EvaluationReport& report) {
  nlohmann::ordered_json j;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row{{"scene_id", r.scene_id},     {"system", r.system},       {"array_tag", r.array_tag},
                               {"M", r.channels},            {"snr_db", r.snr_db},       {"stoi_noisy", r.stoi_noisy},
                               {"stoi_enh", r.stoi_enh},     {"sisdr_noisy", r.sisdr_noisy},
                               {"sisdr_enh", r.sisdr_enh}};
    if (r.pesq_noisy) row["pesq_noisy"] = *r.pesq_noisy;
    if (r.pesq_enh) row["pesq_enh"] = *r.pesq_enh;
    j["rows"].push_back(row);
  }
  j["summaries"] = nlohmann::ordered_json::array();
  for (const auto& s : report.summaries) {
    j["summaries"].push_back({{"system", s.system},           {"condition", s.condition},
                              {"count", s.count},             {"stoi_noisy", s.stoi_noisy},
                              {"stoi_enh", s.stoi_enh},       {"delta_stoi", s.delta_stoi()},
                              {"sisdr_noisy", s.sisdr_noisy}, {"sisdr_enh", s.sisdr_enh},
                              {"delta_sisdr", s.delta_sisdr()}});
  }
  j["missing"] = nlohmann::ordered_json::array();
  for (const auto& m : report.missing)
    j["missing"].push_back({{"scene_id", m.scene_id}, {"system", m.system}, {"reason", m.reason}});
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace nbdf
