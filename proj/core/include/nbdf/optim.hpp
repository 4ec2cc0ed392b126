#pragma once

#include <cmath>
#include <vector>

#include "nbdf/nn/tensor.hpp"

namespace nbdf {

/// Adam with bias correction, operating on accumulated parameter gradients.
template <typename S>
class Adam {
 public:
  Adam(std::vector<nn::Parameter<S>*> params, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double epsilon = 1e-8)
      : params_(std::move(params)), lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
    for (const auto* p : params_) {
      m_.push_back(nn::Mat<S>::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(nn::Mat<S>::Zero(p->value.rows(), p->value.cols()));
    }
  }

  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }
  long steps() const { return step_; }

  void step() {
    ++step_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
    const S lr_t = static_cast<S>(lr_ * std::sqrt(c2) / c1);
    const S eps_t = static_cast<S>(eps_ * std::sqrt(c2));
    const S b1 = static_cast<S>(beta1_);
    const S b2 = static_cast<S>(beta2_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto& p = *params_[i];
      m_[i] = b1 * m_[i] + (S(1) - b1) * p.grad;
      v_[i] = b2 * v_[i] + (S(1) - b2) * p.grad.cwiseProduct(p.grad);
      p.value.array() -= lr_t * m_[i].array() / (v_[i].array().sqrt() + eps_t);
    }
  }

 private:
  std::vector<nn::Parameter<S>*> params_;
  std::vector<nn::Mat<S>> m_;
  std::vector<nn::Mat<S>> v_;
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  long step_ = 0;
};

}  // namespace nbdf
