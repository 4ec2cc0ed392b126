#include "nbdf/rir.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace nbdf {

namespace {

bool inside(const RoomSpec& room, const Point3& p) {
  return (p.array() > 0.0).all() && (p.array() < room.dimensions.array()).all();
}

// One-pole-pair high-pass from Allen & Berkley, cut-off 100 Hz.
void high_pass(std::vector<double>& h, int fs) {
  const double w = 2.0 * std::numbers::pi * 100.0 / fs;
  const double r1 = std::exp(-w);
  const double b1 = 2.0 * r1 * std::cos(w);
  const double b2 = -r1 * r1;
  const double a1 = -(1.0 + r1);
  double y0 = 0.0, y1 = 0.0, y2 = 0.0;
  for (double& v : h) {
    y2 = y1;
    y1 = y0;
    y0 = b1 * y1 + b2 * y2 + v;
    v = y0 + a1 * y1 + r1 * y2;
  }
}

// RT60 of the direction-averaged image-source decay for energy reflection
// factor exp(-x / c) per meter of wall crossings, from a least-squares line
// through the -5 dB to -25 dB part of the truncated Schroeder curve.
double image_decay_rt60(const Point3& dims, double x, double speed_of_sound, double t_end) {
  constexpr int kPolar = 24;
  constexpr int kAzimuth = 24;
  constexpr int kTimes = 240;
  std::vector<double> rates;
  rates.reserve(kPolar * kAzimuth);
  for (int i = 0; i < kPolar; ++i) {
    const double uz = (i + 0.5) / kPolar;
    const double rho = std::sqrt(1.0 - uz * uz);
    for (int j = 0; j < kAzimuth; ++j) {
      const double phi = 0.5 * std::numbers::pi * (j + 0.5) / kAzimuth;
      const double g = rho * std::cos(phi) / dims.x() + rho * std::sin(phi) / dims.y() + uz / dims.z();
      rates.push_back(x * speed_of_sound * g);
    }
  }
  std::vector<double> edc(kTimes + 1);
  for (int n = 0; n <= kTimes; ++n) {
    const double t = t_end * n / kTimes;
    double acc = 0.0;
    for (double a : rates) acc += (std::exp(-a * t) - std::exp(-a * t_end)) / a;
    edc[static_cast<std::size_t>(n)] = acc;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, count = 0.0;
  for (int n = 0; n < kTimes; ++n) {
    const double db = 10.0 * std::log10(edc[static_cast<std::size_t>(n)] / edc[0]);
    if (db > -5.0 || db < -25.0) continue;
    const double t = t_end * n / kTimes;
    sx += t;
    sy += db;
    sxx += t * t;
    sxy += t * db;
    count += 1.0;
  }
  if (count < 2.0) return 0.0;
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return -60.0 / slope;
}

}  // namespace

double wall_absorption(const RoomSpec& room, AbsorptionModel model, bool* clamped, double truncation_factor) {
  if (clamped) *clamped = false;
  if (room.absorption) {
    if (*room.absorption <= 0.0 || *room.absorption > 1.0) throw std::invalid_argument("rir: absorption must be in (0, 1]");
    return *room.absorption;
  }
  if (!(room.rt60 > 0.0)) throw std::invalid_argument("rir: rt60 must be positive");
  const auto& d = room.dimensions;
  const double volume = d.x() * d.y() * d.z();
  const double surface = 2.0 * (d.x() * d.y() + d.x() * d.z() + d.y() * d.z());
  // 24 ln(10) / c: reverberation constant.
  const double k = 24.0 * std::log(10.0) / room.speed_of_sound;
  double alpha = 0.0;
  switch (model) {
    case AbsorptionModel::sabine: alpha = k * volume / (surface * room.rt60); break;
    case AbsorptionModel::eyring: alpha = 1.0 - std::exp(-k * volume / (surface * room.rt60)); break;
    case AbsorptionModel::image_fit: {
      // x = -ln(1 - alpha); start from Eyring and rescale until the model decay matches.
      double x = k * volume / (surface * room.rt60);
      const double t_end = truncation_factor * room.rt60;
      for (int iter = 0; iter < 50; ++iter) {
        const double rt = image_decay_rt60(d, x, room.speed_of_sound, t_end);
        if (!(rt > 0.0)) break;
        const double ratio = rt / room.rt60;
        x *= ratio;
        if (std::abs(ratio - 1.0) < 1e-4) break;
      }
      alpha = 1.0 - std::exp(-x);
      break;
    }
  }
  if (alpha > 1.0) {
    std::fprintf(stderr, "warning: rt60 %.3f s too short for room, using anechoic response\n", room.rt60);
    alpha = 1.0;
    if (clamped) *clamped = true;
  }
  return alpha;
}

std::vector<double> simulate_rir(const RoomSpec& room, const Point3& source, const Point3& mic, int sample_rate,
                                 const RirOptions& options) {
  return simulate_rirs(room, source, {mic}, sample_rate, options).front();
}

std::vector<std::vector<double>> simulate_rirs(const RoomSpec& room, const Point3& source,
                                               const std::vector<Point3>& mics, int sample_rate,
                                               const RirOptions& options) {
  if ((room.dimensions.array() <= 0.0).any()) throw std::invalid_argument("rir: room dimensions must be positive");
  if (sample_rate <= 0) throw std::invalid_argument("rir: sample rate must be positive");
  if (!inside(room, source)) throw std::invalid_argument("rir: source outside the room");
  for (const auto& m : mics)
    if (!inside(room, m)) throw std::invalid_argument("rir: microphone outside the room");

  const double alpha = wall_absorption(room, options.absorption_model, nullptr, options.truncation_factor);
  const double beta = std::sqrt(std::max(0.0, 1.0 - alpha));
  const double samples_per_meter = sample_rate / room.speed_of_sound;
  const int half = options.sinc_half_width;
  const int taps = 2 * half;

  double max_direct = 0.0;
  for (const auto& m : mics) max_direct = std::max(max_direct, (m - source).norm());
  double decay_time = 0.0;
  if (beta > 0.0) {
    if (room.absorption) {
      const auto& d = room.dimensions;
      const double volume = d.x() * d.y() * d.z();
      const double surface = 2.0 * (d.x() * d.y() + d.x() * d.z() + d.y() * d.z());
      decay_time = 24.0 * std::log(10.0) * volume / (room.speed_of_sound * surface * -std::log(1.0 - alpha));
    } else {
      decay_time = room.rt60;
    }
  }
  const std::size_t length =
      std::max(static_cast<std::size_t>(std::ceil(max_direct * samples_per_meter)) + taps + 1,
               static_cast<std::size_t>(std::ceil(options.truncation_factor * decay_time * sample_rate)));

  const Point3 s = source * samples_per_meter;
  const Point3 L = room.dimensions * samples_per_meter;
  const double max_dist = static_cast<double>(length);

  // Window tables for the fractional-delay kernel: tap n sits at offset
  // (n - half + 1) from floor(delay).
  std::vector<double> cos_tab(taps), sin_tab(taps);
  for (int n = 0; n < taps; ++n) {
    const double a = 2.0 * std::numbers::pi * (n - half + 1) / taps;
    cos_tab[n] = std::cos(a);
    sin_tab[n] = std::sin(a);
  }

  const int n1 = static_cast<int>(std::ceil(max_dist / (2.0 * L.x()))) + 1;
  const int n2 = static_cast<int>(std::ceil(max_dist / (2.0 * L.y()))) + 1;
  const int n3 = static_cast<int>(std::ceil(max_dist / (2.0 * L.z()))) + 1;
  std::vector<double> beta_pow(static_cast<std::size_t>(2 * (n1 + n2 + n3) + 4));
  beta_pow[0] = 1.0;
  for (std::size_t i = 1; i < beta_pow.size(); ++i) beta_pow[i] = beta_pow[i - 1] * beta;

  std::vector<std::vector<double>> out;
  out.reserve(mics.size());
  for (const auto& mic_m : mics) {
    std::vector<double> h(length, 0.0);
    const Point3 r = mic_m * samples_per_meter;
    const double max_d2 = (max_dist + half) * (max_dist + half);

    auto add_image = [&](double dist, double gain) {
      const double fdist = std::floor(dist);
      const double frac = dist - fdist;
      const long start = static_cast<long>(fdist) - half + 1;
      const double sf = std::sin(std::numbers::pi * frac);
      const double cf = std::cos(2.0 * std::numbers::pi * frac / taps);
      const double sfw = std::sin(2.0 * std::numbers::pi * frac / taps);
      for (int n = 0; n < taps; ++n) {
        const long idx = start + n;
        if (idx < 0 || idx >= static_cast<long>(length)) continue;
        const double t = (n - half + 1) - frac;
        // cos(2 pi t / taps) via angle subtraction.
        const double window = 0.5 * (1.0 + cos_tab[n] * cf + sin_tab[n] * sfw);
        double sinc;
        if (std::abs(t) < 1e-12) {
          sinc = 1.0;
        } else {
          // sin(pi (k - frac)) = (-1)^(k+1) sin(pi frac) for integer k.
          const int k = n - half + 1;
          const double s_pi_t = (k % 2 == 0 ? -sf : sf);
          sinc = s_pi_t / (std::numbers::pi * t);
        }
        h[static_cast<std::size_t>(idx)] += gain * window * sinc;
      }
    };

    for (int mx = -n1; mx <= n1; ++mx) {
      for (int q = 0; q <= 1; ++q) {
        const double dx = (1 - 2 * q) * s.x() - r.x() + 2.0 * mx * L.x();
        const double dx2 = dx * dx;
        if (dx2 > max_d2) continue;
        const int ex = std::abs(mx - q) + std::abs(mx);
        for (int my = -n2; my <= n2; ++my) {
          for (int j = 0; j <= 1; ++j) {
            const double dy = (1 - 2 * j) * s.y() - r.y() + 2.0 * my * L.y();
            const double dxy2 = dx2 + dy * dy;
            if (dxy2 > max_d2) continue;
            const int ey = std::abs(my - j) + std::abs(my);
            for (int mz = -n3; mz <= n3; ++mz) {
              for (int k = 0; k <= 1; ++k) {
                if (options.max_order >= 0 &&
                    std::abs(2 * mx - q) + std::abs(2 * my - j) + std::abs(2 * mz - k) > options.max_order) {
                  continue;
                }
                const double dz = (1 - 2 * k) * s.z() - r.z() + 2.0 * mz * L.z();
                const double d2 = dxy2 + dz * dz;
                if (d2 > max_d2) continue;
                const int ez = std::abs(mz - k) + std::abs(mz);
                const int e = ex + ey + ez;
                if (beta == 0.0 && e > 0) continue;
                const double dist = std::sqrt(d2);
                if (dist >= max_dist) continue;
                const double gain = beta_pow[static_cast<std::size_t>(e)] / (4.0 * std::numbers::pi * dist / samples_per_meter);
                add_image(dist, gain);
              }
            }
          }
        }
      }
    }
    if (options.high_pass) high_pass(h, sample_rate);
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace nbdf
