#pragma once

#include "i2a/nn/common.hpp"

namespace i2a::nn {

// Multi-head scaled dot-product self-attention. Head projections are stored
// stacked column-wise (head j owns columns [j*head_dim, (j+1)*head_dim)), so
// the Q/K/V projections for all heads run as single GEMMs.
template <class S>
class MultiHeadAttention {
 public:
  struct Cache {
    Mat<S> input;            // (L*B) x D
    Mat<S> q, k, v;          // (L*B) x (heads*head_dim)
    Mat<S> attn;             // (B*heads*L) x L softmax rows
    Mat<S> concat;           // (L*B) x (heads*head_dim)
    int len = 0;
    int batch = 0;
  };

  MultiHeadAttention() = default;
  MultiHeadAttention(int dim, int heads, int head_dim)
      : dim_(dim), heads_(heads), head_dim_(head_dim) {
    const int proj = heads * head_dim;
    w_q_.setZero(dim, proj);
    w_k_.setZero(dim, proj);
    w_v_.setZero(dim, proj);
    w_o_.setZero(proj, dim);
    g_q_.setZero(dim, proj);
    g_k_.setZero(dim, proj);
    g_v_.setZero(dim, proj);
    g_o_.setZero(proj, dim);
  }

  int dim() const { return dim_; }
  int heads() const { return heads_; }
  int head_dim() const { return head_dim_; }

  void init(SplitMix64& rng) {
    // Per-head fan for the projection limits; one stacked fill per matrix.
    glorot_init(w_q_, dim_, head_dim_, rng);
    glorot_init(w_k_, dim_, head_dim_, rng);
    glorot_init(w_v_, dim_, head_dim_, rng);
    glorot_init(w_o_, heads_ * head_dim_, dim_, rng);
  }

  Mat<S> forward(const Mat<S>& x, int len, int batch, Cache& cache) const {
    if (x.rows() != Eigen::Index(len) * batch || x.cols() != dim_)
      throw InputError("MultiHeadAttention: input shape mismatch");
    cache.input = x;
    cache.len = len;
    cache.batch = batch;
    cache.q.noalias() = x * w_q_;
    cache.k.noalias() = x * w_k_;
    cache.v.noalias() = x * w_v_;

    const int proj = heads_ * head_dim_;
    const S scale = S(1) / static_cast<S>(std::sqrt(double(head_dim_)));
    cache.attn.resize(Eigen::Index(batch) * heads_ * len, len);
    cache.concat.resize(Eigen::Index(len) * batch, proj);

    Mat<S> qe(len, proj), ke(len, proj), ve(len, proj);
    Mat<S> scores(len, len);
    for (int e = 0; e < batch; ++e) {
      for (int t = 0; t < len; ++t) {
        qe.row(t) = cache.q.row(Eigen::Index(t) * batch + e);
        ke.row(t) = cache.k.row(Eigen::Index(t) * batch + e);
        ve.row(t) = cache.v.row(Eigen::Index(t) * batch + e);
      }
      for (int j = 0; j < heads_; ++j) {
        auto qh = qe.middleCols(j * head_dim_, head_dim_);
        auto kh = ke.middleCols(j * head_dim_, head_dim_);
        auto vh = ve.middleCols(j * head_dim_, head_dim_);
        scores.noalias() = qh * kh.transpose();
        scores *= scale;
        if (!scores.allFinite())
          throw NumericError("non-finite attention scores");
        auto attn = cache.attn.middleRows(
            (Eigen::Index(e) * heads_ + j) * len, len);
        for (int r = 0; r < len; ++r) {
          S mx = scores.row(r).maxCoeff();
          attn.row(r) = (scores.row(r).array() - mx).exp();
          attn.row(r) /= attn.row(r).sum();
        }
        // Output rows for this example land back in batched layout below.
        qe.middleCols(j * head_dim_, head_dim_).noalias() = attn * vh;
      }
      for (int t = 0; t < len; ++t)
        cache.concat.row(Eigen::Index(t) * batch + e) = qe.row(t);
    }
    Mat<S> out;
    out.noalias() = cache.concat * w_o_;
    return out;
  }

  Mat<S> backward(const Mat<S>& dy, const Cache& cache) {
    const int len = cache.len;
    const int batch = cache.batch;
    const int proj = heads_ * head_dim_;
    const S scale = S(1) / static_cast<S>(std::sqrt(double(head_dim_)));

    g_o_.noalias() += cache.concat.transpose() * dy;
    Mat<S> dconcat;
    dconcat.noalias() = dy * w_o_.transpose();

    Mat<S> dq(Eigen::Index(len) * batch, proj);
    Mat<S> dk(Eigen::Index(len) * batch, proj);
    Mat<S> dv(Eigen::Index(len) * batch, proj);

    Mat<S> qe(len, proj), ke(len, proj), ve(len, proj), dce(len, proj);
    Mat<S> dqe(len, proj), dke(len, proj), dve(len, proj);
    Mat<S> dattn(len, len), dscores(len, len);
    for (int e = 0; e < batch; ++e) {
      for (int t = 0; t < len; ++t) {
        const Eigen::Index row = Eigen::Index(t) * batch + e;
        qe.row(t) = cache.q.row(row);
        ke.row(t) = cache.k.row(row);
        ve.row(t) = cache.v.row(row);
        dce.row(t) = dconcat.row(row);
      }
      for (int j = 0; j < heads_; ++j) {
        auto kh = ke.middleCols(j * head_dim_, head_dim_);
        auto qh = qe.middleCols(j * head_dim_, head_dim_);
        auto vh = ve.middleCols(j * head_dim_, head_dim_);
        auto dch = dce.middleCols(j * head_dim_, head_dim_);
        auto attn = cache.attn.middleRows(
            (Eigen::Index(e) * heads_ + j) * len, len);

        dattn.noalias() = dch * vh.transpose();
        // Softmax backward per row: dS = A .* (dA - rowsum(dA .* A)).
        for (int r = 0; r < len; ++r) {
          S dot = attn.row(r).dot(dattn.row(r));
          dscores.row(r) =
              (attn.row(r).array() * (dattn.row(r).array() - dot)).matrix();
        }
        dve.middleCols(j * head_dim_, head_dim_).noalias() =
            attn.transpose() * dch;
        dqe.middleCols(j * head_dim_, head_dim_).noalias() =
            scale * (dscores * kh);
        dke.middleCols(j * head_dim_, head_dim_).noalias() =
            scale * (dscores.transpose() * qh);
      }
      for (int t = 0; t < len; ++t) {
        const Eigen::Index row = Eigen::Index(t) * batch + e;
        dq.row(row) = dqe.row(t);
        dk.row(row) = dke.row(t);
        dv.row(row) = dve.row(t);
      }
    }

    g_q_.noalias() += cache.input.transpose() * dq;
    g_k_.noalias() += cache.input.transpose() * dk;
    g_v_.noalias() += cache.input.transpose() * dv;
    Mat<S> dx;
    dx.noalias() = dq * w_q_.transpose();
    dx.noalias() += dk * w_k_.transpose();
    dx.noalias() += dv * w_v_.transpose();
    return dx;
  }

  void zero_grad() {
    g_q_.setZero();
    g_k_.setZero();
    g_v_.setZero();
    g_o_.setZero();
  }

  void collect_params(std::vector<ParamRef<S>>& out, const std::string& name) {
    out.push_back({name + ".w_q", &w_q_, &g_q_});
    out.push_back({name + ".w_k", &w_k_, &g_k_});
    out.push_back({name + ".w_v", &w_v_, &g_v_});
    out.push_back({name + ".w_o", &w_o_, &g_o_});
  }

 private:
  int dim_ = 0;
  int heads_ = 0;
  int head_dim_ = 0;
  Mat<S> w_q_, w_k_, w_v_, w_o_;
  Mat<S> g_q_, g_k_, g_v_, g_o_;
};

}  // namespace i2a::nn
