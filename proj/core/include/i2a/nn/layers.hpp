#pragma once

#include "i2a/nn/common.hpp"

namespace i2a::nn {

/// Layer normalization across the feature dimension of each row (each
/// timestep of each batch member independently).
template <class S>
class LayerNorm {
 public:
  struct Cache {
    Mat<S> xhat;     // (L*B) x F
    Mat<S> inv_std;  // (L*B) x 1
  };

  LayerNorm() = default;
  explicit LayerNorm(int features) : features_(features) {
    gain_.setOnes(1, features);
    bias_.setZero(1, features);
    g_gain_.setZero(1, features);
    g_bias_.setZero(1, features);
  }

  int features() const { return features_; }

  Mat<S> forward(const Mat<S>& x, Cache& cache) const {
    const S eps = S(1e-5);
    const Eigen::Index rows = x.rows();
    cache.xhat.resize(rows, features_);
    cache.inv_std.resize(rows, 1);
    Mat<S> y(rows, features_);
    for (Eigen::Index r = 0; r < rows; ++r) {
      S mu = x.row(r).mean();
      auto centered = (x.row(r).array() - mu);
      S var = centered.square().mean();
      S inv = S(1) / std::sqrt(var + eps);
      cache.inv_std(r, 0) = inv;
      cache.xhat.row(r) = (centered * inv).matrix();
      y.row(r) = (cache.xhat.row(r).array() * gain_.row(0).array() +
                  bias_.row(0).array())
                     .matrix();
    }
    return y;
  }

  Mat<S> backward(const Mat<S>& dy, const Cache& cache) {
    const Eigen::Index rows = dy.rows();
    Mat<S> dx(rows, features_);
    for (Eigen::Index r = 0; r < rows; ++r) {
      auto dxhat = (dy.row(r).array() * gain_.row(0).array());
      S mean_dxhat = dxhat.mean();
      S mean_dxhat_xhat = (dxhat * cache.xhat.row(r).array()).mean();
      dx.row(r) = (cache.inv_std(r, 0) *
                   (dxhat - mean_dxhat -
                    cache.xhat.row(r).array() * mean_dxhat_xhat))
                      .matrix();
      g_gain_.row(0) +=
          (dy.row(r).array() * cache.xhat.row(r).array()).matrix();
      g_bias_.row(0) += dy.row(r);
    }
    return dx;
  }

  void zero_grad() {
    g_gain_.setZero();
    g_bias_.setZero();
  }

  void collect_params(std::vector<ParamRef<S>>& out, const std::string& name) {
    out.push_back({name + ".gain", &gain_, &g_gain_});
    out.push_back({name + ".bias", &bias_, &g_bias_});
  }

 private:
  int features_ = 0;
  Mat<S> gain_, bias_;
  Mat<S> g_gain_, g_bias_;
};

/// Time-distributed dense layer; the same W (classes x features) and bias
/// apply at every timestep.
template <class S>
class TimeDistributedDense {
 public:
  TimeDistributedDense() = default;
  TimeDistributedDense(int features, int classes)
      : features_(features), classes_(classes) {
    w_.setZero(classes, features);
    b_.setZero(1, classes);
    g_w_.setZero(classes, features);
    g_b_.setZero(1, classes);
  }

  void init(SplitMix64& rng) { glorot_init(w_, features_, classes_, rng); }

  Mat<S> forward(const Mat<S>& x) const {
    Mat<S> logits;
    logits.noalias() = x * w_.transpose();
    logits.rowwise() += b_.row(0);
    return logits;
  }

  Mat<S> backward(const Mat<S>& dlogits, const Mat<S>& x) {
    g_w_.noalias() += dlogits.transpose() * x;
    g_b_.row(0) += dlogits.colwise().sum();
    Mat<S> dx;
    dx.noalias() = dlogits * w_;
    return dx;
  }

  void zero_grad() {
    g_w_.setZero();
    g_b_.setZero();
  }

  void collect_params(std::vector<ParamRef<S>>& out, const std::string& name) {
    out.push_back({name + ".w", &w_, &g_w_});
    out.push_back({name + ".b", &b_, &g_b_});
  }

  const Mat<S>& weights() const { return w_; }

 private:
  int features_ = 0;
  int classes_ = 0;
  Mat<S> w_, b_;
  Mat<S> g_w_, g_b_;
};

}  // namespace i2a::nn
