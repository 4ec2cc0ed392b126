#include "nbdf/diffuse_noise.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "fft.hpp"
#include "nbdf/dsp.hpp"

namespace nbdf {

double diffuse_coherence(double frequency, double distance, double speed_of_sound) {
  const double x = 2.0 * std::numbers::pi * frequency * distance / speed_of_sound;
  return std::abs(x) < 1e-12 ? 1.0 : std::sin(x) / x;
}

MultichannelWaveform generate_diffuse_noise(const std::vector<Point3>& mic_positions,
                                            std::span<const std::vector<double>> independent_sources,
                                            int sample_rate, double speed_of_sound) {
  const int mics = static_cast<int>(mic_positions.size());
  if (mics < 1) throw std::invalid_argument("diffuse noise: no microphones");
  if (static_cast<int>(independent_sources.size()) != mics) {
    throw std::invalid_argument("diffuse noise: need one independent source per microphone");
  }
  const std::size_t length = independent_sources[0].size();
  if (length < 2) throw std::invalid_argument("diffuse noise: sources too short");
  for (const auto& src : independent_sources)
    if (src.size() != length) throw std::invalid_argument("diffuse noise: source length mismatch");

  double target_power = 0.0;
  for (const auto& src : independent_sources) target_power += mean_power(src) / mics;

  MultichannelWaveform out(mics, length, sample_rate);
  if (mics == 1) {
    std::copy(independent_sources[0].begin(), independent_sources[0].end(), out.channel(0).begin());
    return out;
  }

  detail::RealFft fft(static_cast<int>(length));
  const int bins = fft.bins();
  std::vector<std::vector<Complex>> in_spec(mics, std::vector<Complex>(bins));
  for (int m = 0; m < mics; ++m) fft.forward(independent_sources[m], in_spec[m]);

  Eigen::MatrixXd distances(mics, mics);
  for (int i = 0; i < mics; ++i)
    for (int j = 0; j < mics; ++j) distances(i, j) = (mic_positions[i] - mic_positions[j]).norm();

  std::vector<std::vector<Complex>> out_spec(mics, std::vector<Complex>(bins));
  Eigen::MatrixXd gamma(mics, mics);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mics);
  Eigen::VectorXcd n(mics);
  for (int k = 0; k < bins; ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(length);
    for (int i = 0; i < mics; ++i)
      for (int j = 0; j < mics; ++j) gamma(i, j) = diffuse_coherence(f, distances(i, j), speed_of_sound);
    solver.compute(gamma);
    // Gamma = V diag(lambda) V^T; mixing by V sqrt(lambda) imposes it on independent inputs.
    const Eigen::VectorXd root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXcd mix = (solver.eigenvectors() * root.asDiagonal()).cast<Complex>();
    for (int m = 0; m < mics; ++m) n(m) = in_spec[m][k];
    const Eigen::VectorXcd x = mix * n;
    for (int m = 0; m < mics; ++m) out_spec[m][k] = x(m);
  }

  std::vector<double> buf(length);
  for (int m = 0; m < mics; ++m) {
    fft.inverse(out_spec[m], buf);
    const double p = mean_power(buf);
    const double gain = p > 0.0 ? std::sqrt(target_power / p) : 0.0;
    auto ch = out.channel(m);
    for (std::size_t i = 0; i < length; ++i) ch[i] = buf[i] * gain;
  }
  return out;
}

MultichannelWaveform generate_diffuse_noise(const ArraySpec& array, std::span<const double> mono_noise,
                                            std::size_t length, int sample_rate) {
  const int mics = array.channels();
  if (mics < 1) throw std::invalid_argument("diffuse noise: no microphones");
  if (mono_noise.size() < length * static_cast<std::size_t>(mics)) {
    throw std::invalid_argument("diffuse noise: mono noise too short for " + std::to_string(mics) +
                                " non-overlapping segments");
  }
  std::vector<std::vector<double>> segments;
  for (int m = 0; m < mics; ++m) {
    const auto begin = mono_noise.begin() + static_cast<std::ptrdiff_t>(m * length);
    segments.emplace_back(begin, begin + static_cast<std::ptrdiff_t>(length));
  }
  auto out = generate_diffuse_noise(array.mic_positions, segments, sample_rate);
  if (mics > 1) {
    // Calibrate to the mono source power rather than the segment average.
    const double target = mean_power(mono_noise);
    for (int m = 0; m < mics; ++m) {
      const double p = out.power(m);
      if (p > 0.0)
        for (double& v : out.channel(m)) v *= std::sqrt(target / p);
    }
  }
  return out;
}

}  // namespace nbdf
