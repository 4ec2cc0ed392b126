#pragma once

#include <vector>

#include "nbdf/nn/tensor.hpp"

namespace nbdf::nn {

// Sequences are batched time-major: row t * batch + b holds frame t of
// sequence b. Gate order along the 4h axis is (input, forget, cell, output).

template <typename S>
struct LstmCache {
  const Mat<S>* input = nullptr;  // borrowed; must outlive backward()
  Mat<S> gates;                   // activated gates [T*B x 4h]
  Mat<S> cells;                   // [T*B x h]
  Mat<S> hidden;                  // [T*B x h]
  int frames = 0;
  int batch = 0;
};

/// Unidirectional LSTM with zero initial state and a single bias vector.
template <typename S>
class Lstm {
 public:
  Lstm() = default;
  Lstm(const std::string& name, int input_size, int hidden_size, bool reverse)
      : input_size_(input_size),
        hidden_(hidden_size),
        reverse_(reverse),
        w_ih_(name + ".w_ih", 4 * hidden_size, input_size),
        w_hh_(name + ".w_hh", 4 * hidden_size, hidden_size),
        bias_(name + ".bias", 1, 4 * hidden_size) {}

  int input_size() const { return input_size_; }
  int hidden_size() const { return hidden_; }

  template <typename Rng>
  void init(Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_));
    w_ih_.init_uniform(rng, bound);
    w_hh_.init_uniform(rng, bound);
    bias_.init_uniform(rng, bound);
  }

  void collect(std::vector<Parameter<S>*>& out) {
    out.push_back(&w_ih_);
    out.push_back(&w_hh_);
    out.push_back(&bias_);
  }
  void collect(std::vector<const Parameter<S>*>& out) const {
    out.push_back(&w_ih_);
    out.push_back(&w_hh_);
    out.push_back(&bias_);
  }

  /// Returns hidden states [T*B x h]. When `cache` is null nothing is retained.
  Mat<S> forward(const Mat<S>& x, int frames, int batch, LstmCache<S>* cache) const {
    const int h = hidden_;
    Mat<S> gates(static_cast<Eigen::Index>(frames) * batch, 4 * h);
    gates.noalias() = x * w_ih_.value.transpose();
    gates.rowwise() += bias_.value.row(0);
    Mat<S> cells(gates.rows(), h);
    Mat<S> hidden(gates.rows(), h);
    Mat<S> h_prev = Mat<S>::Zero(batch, h);
    Mat<S> c_prev = Mat<S>::Zero(batch, h);
    for (int s = 0; s < frames; ++s) {
      const int t = reverse_ ? frames - 1 - s : s;
      auto g = gates.middleRows(static_cast<Eigen::Index>(t) * batch, batch);
      if (s > 0) g.noalias() += h_prev * w_hh_.value.transpose();
      g.leftCols(2 * h) = g.leftCols(2 * h).array().logistic();
      g.middleCols(2 * h, h) = g.middleCols(2 * h, h).array().tanh();
      g.rightCols(h) = g.rightCols(h).array().logistic();
      auto c = cells.middleRows(static_cast<Eigen::Index>(t) * batch, batch);
      c.array() = g.middleCols(h, h).array() * c_prev.array() + g.leftCols(h).array() * g.middleCols(2 * h, h).array();
      auto hid = hidden.middleRows(static_cast<Eigen::Index>(t) * batch, batch);
      hid.array() = g.rightCols(h).array() * c.array().tanh();
      h_prev = hid;
      c_prev = c;
    }
    if (cache) {
      cache->input = &x;
      cache->gates = std::move(gates);
      cache->cells = std::move(cells);
      cache->hidden = hidden;
      cache->frames = frames;
      cache->batch = batch;
    }
    return hidden;
  }

  /// Accumulates parameter gradients from dL/dhidden; returns dL/dx when requested.
  Mat<S> backward(const LstmCache<S>& cache, const Mat<S>& d_hidden, bool need_input_grad) {
    const int h = hidden_;
    const int frames = cache.frames;
    const int batch = cache.batch;
    const Eigen::Index rows = static_cast<Eigen::Index>(frames) * batch;
    Mat<S> d_gates(rows, 4 * h);
    Mat<S> h_prev_all = Mat<S>::Zero(rows, h);
    Mat<S> dh_next = Mat<S>::Zero(batch, h);
    Mat<S> dc_next = Mat<S>::Zero(batch, h);
    Mat<S> dh(batch, h), dc(batch, h), tc(batch, h);
    for (int s = frames - 1; s >= 0; --s) {
      const int t = reverse_ ? frames - 1 - s : s;
      const int t_prev = reverse_ ? t + 1 : t - 1;
      const Eigen::Index r = static_cast<Eigen::Index>(t) * batch;
      const auto g = cache.gates.middleRows(r, batch);
      const auto i_g = g.leftCols(h).array();
      const auto f_g = g.middleCols(h, h).array();
      const auto c_g = g.middleCols(2 * h, h).array();
      const auto o_g = g.rightCols(h).array();
      dh = d_hidden.middleRows(r, batch) + dh_next;
      tc.array() = cache.cells.middleRows(r, batch).array().tanh();
      dc.array() = dc_next.array() + dh.array() * o_g * (S(1) - tc.array().square());
      auto dg = d_gates.middleRows(r, batch);
      dg.rightCols(h).array() = dh.array() * tc.array() * o_g * (S(1) - o_g);
      dg.leftCols(h).array() = dc.array() * c_g * i_g * (S(1) - i_g);
      dg.middleCols(2 * h, h).array() = dc.array() * i_g * (S(1) - c_g.square());
      if (s > 0) {
        const Eigen::Index rp = static_cast<Eigen::Index>(t_prev) * batch;
        dg.middleCols(h, h).array() = dc.array() * cache.cells.middleRows(rp, batch).array() * f_g * (S(1) - f_g);
        h_prev_all.middleRows(r, batch) = cache.hidden.middleRows(rp, batch);
      } else {
        dg.middleCols(h, h).setZero();
      }
      dc_next.array() = dc.array() * f_g;
      dh_next.noalias() = dg * w_hh_.value;
    }
    w_ih_.grad.noalias() += d_gates.transpose() * (*cache.input);
    w_hh_.grad.noalias() += d_gates.transpose() * h_prev_all;
    bias_.grad.row(0) += d_gates.colwise().sum();
    if (!need_input_grad) return {};
    Mat<S> dx(rows, input_size_);
    dx.noalias() = d_gates * w_ih_.value;
    return dx;
  }

 private:
  int input_size_ = 0;
  int hidden_ = 0;
  bool reverse_ = false;
  Parameter<S> w_ih_;
  Parameter<S> w_hh_;
  Parameter<S> bias_;
};

template <typename S>
struct BlstmCache {
  LstmCache<S> fwd;
  LstmCache<S> bwd;
};

/// Bidirectional LSTM; output columns are [forward | backward].
template <typename S>
class Blstm {
 public:
  Blstm() = default;
  Blstm(const std::string& name, int input_size, int hidden_size)
      : fwd_(name + ".fwd", input_size, hidden_size, false), bwd_(name + ".bwd", input_size, hidden_size, true) {}

  int hidden_size() const { return fwd_.hidden_size(); }
  int output_size() const { return 2 * fwd_.hidden_size(); }

  template <typename Rng>
  void init(Rng& rng) {
    fwd_.init(rng);
    bwd_.init(rng);
  }

  template <typename Out>
  void collect(Out& out) {
    fwd_.collect(out);
    bwd_.collect(out);
  }
  template <typename Out>
  void collect(Out& out) const {
    fwd_.collect(out);
    bwd_.collect(out);
  }

  Mat<S> forward(const Mat<S>& x, int frames, int batch, BlstmCache<S>* cache) const {
    const int h = hidden_size();
    Mat<S> y(x.rows(), 2 * h);
    y.leftCols(h) = fwd_.forward(x, frames, batch, cache ? &cache->fwd : nullptr);
    y.rightCols(h) = bwd_.forward(x, frames, batch, cache ? &cache->bwd : nullptr);
    return y;
  }

  Mat<S> backward(const BlstmCache<S>& cache, const Mat<S>& dy, bool need_input_grad) {
    const int h = hidden_size();
    Mat<S> dx = fwd_.backward(cache.fwd, dy.leftCols(h), need_input_grad);
    Mat<S> dx_b = bwd_.backward(cache.bwd, dy.rightCols(h), need_input_grad);
    if (need_input_grad) dx += dx_b;
    return dx;
  }

 private:
  Lstm<S> fwd_;
  Lstm<S> bwd_;
};

}  // namespace nbdf::nn
