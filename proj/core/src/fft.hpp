#pragma once

#include <complex>
#include <span>
#include <vector>

namespace nbdf::detail {

// Owns FFTW plans for one real transform size. Plan creation is serialized
// internally; execution on distinct instances is thread-safe.
class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return n_; }
  int bins() const { return n_ / 2 + 1; }

  // Unnormalized forward transform: out[k] = sum_n in[n] exp(-j 2 pi k n / N).
  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  // Inverse including the 1/N factor.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  int n_;
  double* real_ = nullptr;
  void* spectrum_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace nbdf::detail
