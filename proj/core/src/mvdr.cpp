#include "nbdf/mvdr.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "nbdf/parallel.hpp"

namespace nbdf {
namespace {

ComplexMatrix covariance(const Spectrogram& spec, int k) {
  const ComplexMatrix x = spec.narrowband(k);
  return x * x.adjoint() / static_cast<double>(spec.frames());
}

}  // namespace

MvdrResult oracle_mvdr(const Spectrogram& mixture, const Spectrogram& speech, const Spectrogram& noise, int ref_index,
                       const MvdrOptions& options) {
  if (!mixture.same_shape(speech) || !mixture.same_shape(noise))
    throw std::invalid_argument("oracle_mvdr: spectrogram shapes differ");
  const int mics = mixture.channels();
  const int bins = mixture.bins();
  if (mics < 1) throw std::invalid_argument("oracle_mvdr: no channels");
  if (ref_index < 0 || ref_index >= mics) throw std::invalid_argument("oracle_mvdr: reference channel out of range");
  if (!(options.loading > 0.0) || options.max_loading < options.loading)
    throw std::invalid_argument("oracle_mvdr: require 0 < loading <= max_loading");

  MvdrResult result{Spectrogram(1, bins, mixture.frames(), mixture.sample_rate(), mixture.win_len(), mixture.hop()),
                    ComplexMatrix::Zero(mics, bins), ComplexMatrix::Zero(mics, bins),
                    std::vector<double>(static_cast<std::size_t>(bins), 0.0)};

  parallel_for(static_cast<std::size_t>(bins), 0, [&](std::size_t kk) {
    const int k = static_cast<int>(kk);
    ComplexVector d = ComplexVector::Unit(mics, ref_index);
    ComplexVector w = d;
    if (mics > 1) {
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(covariance(speech, k));
      const ComplexVector v = eig.eigenvectors().col(mics - 1);
      if (std::abs(v(ref_index)) > 1e-12) {
        d = v / v(ref_index);
        d(ref_index) = 1.0;
      }

      const ComplexMatrix phi_n = covariance(noise, k);
      if (!phi_n.allFinite())
        throw std::runtime_error("oracle_mvdr: non-finite noise covariance at bin " + std::to_string(k));
      const double scale = phi_n.trace().real() / mics;
      const ComplexMatrix base = scale > 0.0 ? phi_n : ComplexMatrix::Identity(mics, mics);
      const double unit = scale > 0.0 ? scale : 1.0;
      bool solved = false;
      for (double delta = options.loading; delta <= options.max_loading * (1.0 + 1e-9); delta *= 10.0) {
        ComplexMatrix loaded = base;
        loaded.diagonal().array() += delta * unit;
        Eigen::LLT<ComplexMatrix> llt(loaded);
        if (llt.info() != Eigen::Success) continue;
        const ComplexVector u = llt.solve(d);
        const Complex denom = d.dot(u);
        if (!(std::abs(denom) > 0.0) || !u.allFinite()) continue;
        w = u / denom;
        result.loading[kk] = delta;
        solved = true;
        break;
      }
      if (!solved)
        throw std::runtime_error("oracle_mvdr: noise covariance singular at bin " + std::to_string(k) +
                                 " after loading " + std::to_string(options.max_loading));
    }
    result.steering.col(k) = d;
    result.weights.col(k) = w;
    for (int t = 0; t < mixture.frames(); ++t) {
      Complex y = 0.0;
      for (int m = 0; m < mics; ++m) y += std::conj(w(m)) * mixture.at(m, k, t);
      result.output.at(0, k, t) = y;
    }
  });
  return result;
}

}  // namespace nbdf
