#include "fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace nbdf::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("fft: size must be positive");
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(static_cast<std::size_t>(n));
  auto* spec = fftw_alloc_complex(static_cast<std::size_t>(bins()));
  spectrum_ = spec;
  forward_plan_ = fftw_plan_dft_r2c_1d(n, real_, spec, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(n, spec, real_, FFTW_ESTIMATE);
  if (!forward_plan_ || !inverse_plan_) throw std::runtime_error("fft: plan creation failed");
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(real_);
  fftw_free(spectrum_);
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  std::copy_n(in.begin(), n_, real_);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  std::memcpy(out.data(), spectrum_, sizeof(fftw_complex) * static_cast<std::size_t>(bins()));
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  std::memcpy(spectrum_, in.data(), sizeof(fftw_complex) * static_cast<std::size_t>(bins()));
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  const double scale = 1.0 / n_;
  for (int i = 0; i < n_; ++i) out[i] = real_[i] * scale;
}

}  // namespace nbdf::detail
