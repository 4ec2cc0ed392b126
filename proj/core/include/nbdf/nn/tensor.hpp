#pragma once

#include <random>
#include <string>

#include <Eigen/Core>

namespace nbdf::nn {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename S>
using RowVec = Eigen::Matrix<S, 1, Eigen::Dynamic>;

/// Trainable tensor with its accumulated gradient.
template <typename S>
struct Parameter {
  std::string name;
  Mat<S> value;
  Mat<S> grad;

  Parameter() = default;
  Parameter(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)), value(Mat<S>::Zero(rows, cols)), grad(Mat<S>::Zero(rows, cols)) {}

  Eigen::Index size() const { return value.size(); }
  void zero_grad() { grad.setZero(); }

  template <typename Rng>
  void init_uniform(Rng& rng, double bound) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index i = 0; i < value.size(); ++i) value.data()[i] = static_cast<S>(dist(rng));
  }
};

/// Non-owning view of a row-major [frames x width] sequence.
template <typename S>
struct SequenceView {
  const S* data = nullptr;
  int frames = 0;
  int width = 0;

  S operator()(int t, int c) const { return data[static_cast<std::size_t>(t) * width + c]; }
  const S* row(int t) const { return data + static_cast<std::size_t>(t) * width; }
};

}  // namespace nbdf::nn
