#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace nbdf {

using Complex = std::complex<double>;

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

// Raised for malformed configuration files or arguments. The CLI maps this
// to exit code 2; every other std::exception maps to exit code 3.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Magnitude floor shared by normalization and mask computation.
inline constexpr double kMagnitudeFloor = 1e-8;

inline constexpr double kSpeedOfSound = 343.0;

}  // namespace nbdf
