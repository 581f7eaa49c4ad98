#pragma once

#include "i2a/nn/common.hpp"

namespace i2a::nn {

// Bidirectional LSTM over batched sequence tensors. Gate order in the fused
// weight matrices is [input | forget | cell | output], sigmoid gates and tanh
// cell nonlinearity, zero initial state.
template <class S>
class BiLstm {
 public:
  struct Direction {
    Mat<S> w_in;   // F x 4u
    Mat<S> w_rec;  // u x 4u
    Mat<S> bias;   // 1 x 4u
    Mat<S> g_in, g_rec, g_bias;
  };

  struct DirectionCache {
    Mat<S> gate_i, gate_f, gate_g, gate_o;  // (L*B) x u, time-major rows
    Mat<S> cell, tanh_cell;                 // (L*B) x u
    Mat<S> h_prev;  // (L*B) x u, hidden state entering each step
    Mat<S> h;       // (L*B) x u
  };

  struct Cache {
    Mat<S> input;  // (L*B) x F
    int len = 0;
    int batch = 0;
    bool time_constant_input = false;
    DirectionCache fwd, bwd;
  };

  BiLstm() = default;
  BiLstm(int in_features, int units) : in_features_(in_features), units_(units) {
    for (Direction* d : {&fwd_, &bwd_}) {
      d->w_in.setZero(in_features, 4 * units);
      d->w_rec.setZero(units, 4 * units);
      d->bias.setZero(1, 4 * units);
      d->g_in.setZero(in_features, 4 * units);
      d->g_rec.setZero(units, 4 * units);
      d->g_bias.setZero(1, 4 * units);
    }
  }

  int units() const { return units_; }
  int in_features() const { return in_features_; }
  int out_features() const { return 2 * units_; }

  void init(SplitMix64& rng) {
    for (Direction* d : {&fwd_, &bwd_}) {
      glorot_init(d->w_in, in_features_, 4 * units_, rng);
      small_uniform_init(d->w_rec, 0.05, rng);
      d->bias.setZero();
      d->bias.middleCols(units_, units_).setConstant(S(1));  // forget bias
    }
  }

  /// x: (L*B) x F. Returns (L*B) x 2u with forward-direction units in the
  /// left half and backward-direction units in the right half. Setting
  /// time_constant_input skips the per-step input projections for inputs
  /// whose time blocks are all identical (tiled embeddings).
  Mat<S> forward(const Mat<S>& x, int len, int batch,
                 bool time_constant_input, Cache& cache) const {
    if (x.rows() != Eigen::Index(len) * batch || x.cols() != in_features_)
      throw InputError("BiLstm: input shape mismatch");
    cache.input = x;
    cache.len = len;
    cache.batch = batch;
    cache.time_constant_input = time_constant_input;

    run_direction(fwd_, x, len, batch, time_constant_input, false, cache.fwd);
    run_direction(bwd_, x, len, batch, time_constant_input, true, cache.bwd);

    Mat<S> out(Eigen::Index(len) * batch, 2 * units_);
    out.leftCols(units_) = cache.fwd.h;
    out.rightCols(units_) = cache.bwd.h;
    return out;
  }

  /// dy: (L*B) x 2u. Accumulates parameter gradients; returns dx when
  /// need_input_grad (the first layer feeds fixed embeddings and skips it).
  Mat<S> backward(const Mat<S>& dy, const Cache& cache, bool need_input_grad) {
    Mat<S> dx;
    if (need_input_grad) dx.setZero(cache.input.rows(), in_features_);

    back_direction(fwd_, dy.leftCols(units_), cache, false, need_input_grad,
                   dx);
    back_direction(bwd_, dy.rightCols(units_), cache, true, need_input_grad,
                   dx);
    return dx;
  }

  void zero_grad() {
    for (Direction* d : {&fwd_, &bwd_}) {
      d->g_in.setZero();
      d->g_rec.setZero();
      d->g_bias.setZero();
    }
  }

  void collect_params(std::vector<ParamRef<S>>& out, const std::string& name) {
    const char* dir_tag[2] = {"fwd", "bwd"};
    Direction* dirs[2] = {&fwd_, &bwd_};
    for (int i = 0; i < 2; ++i) {
      out.push_back({name + "." + dir_tag[i] + ".w_in", &dirs[i]->w_in,
                     &dirs[i]->g_in});
      out.push_back({name + "." + dir_tag[i] + ".w_rec", &dirs[i]->w_rec,
                     &dirs[i]->g_rec});
      out.push_back({name + "." + dir_tag[i] + ".bias", &dirs[i]->bias,
                     &dirs[i]->g_bias});
    }
  }

 private:
  void run_direction(const Direction& p, const Mat<S>& x, int len, int batch,
                     bool time_constant, bool reverse,
                     DirectionCache& c) const {
    const int u = units_;
    const Eigen::Index rows = Eigen::Index(len) * batch;
    c.gate_i.resize(rows, u);
    c.gate_f.resize(rows, u);
    c.gate_g.resize(rows, u);
    c.gate_o.resize(rows, u);
    c.cell.resize(rows, u);
    c.tanh_cell.resize(rows, u);
    c.h_prev.resize(rows, u);
    c.h.resize(rows, u);

    // Input projections for every step in one GEMM (or one block when the
    // input repeats over time).
    Mat<S> zx;
    if (time_constant) {
      zx.noalias() = x.topRows(batch) * p.w_in;
    } else {
      zx.noalias() = x * p.w_in;
    }

    Mat<S> h = Mat<S>::Zero(batch, u);
    Mat<S> cell = Mat<S>::Zero(batch, u);
    Mat<S> z(batch, 4 * u);
    for (int s = 0; s < len; ++s) {
      const int t = reverse ? len - 1 - s : s;
      const Eigen::Index row0 = Eigen::Index(t) * batch;
      c.h_prev.middleRows(row0, batch) = h;
      if (time_constant)
        z = zx;
      else
        z = zx.middleRows(row0, batch);
      z.noalias() += h * p.w_rec;
      z.rowwise() += p.bias.row(0);

      auto gi = c.gate_i.middleRows(row0, batch);
      auto gf = c.gate_f.middleRows(row0, batch);
      auto gg = c.gate_g.middleRows(row0, batch);
      auto go = c.gate_o.middleRows(row0, batch);
      gi = sigmoid<S>(z.leftCols(u));
      gf = sigmoid<S>(z.middleCols(u, u));
      gg = z.middleCols(2 * u, u).array().tanh().matrix();
      go = sigmoid<S>(z.rightCols(u));

      cell = gf.cwiseProduct(cell) + gi.cwiseProduct(gg);
      c.cell.middleRows(row0, batch) = cell;
      auto tc = c.tanh_cell.middleRows(row0, batch);
      tc = cell.array().tanh().matrix();
      h = go.cwiseProduct(tc);
      c.h.middleRows(row0, batch) = h;
    }
  }

  void back_direction(Direction& p, const Eigen::Ref<const Mat<S>>& dh_out,
                      const Cache& cache, bool reverse, bool need_input_grad,
                      Mat<S>& dx) {
    const int u = units_;
    const int len = cache.len;
    const int batch = cache.batch;
    const DirectionCache& c = reverse ? cache.bwd : cache.fwd;

    Mat<S> dz(Eigen::Index(len) * batch, 4 * u);
    Mat<S> dh_rec = Mat<S>::Zero(batch, u);
    Mat<S> dc_next = Mat<S>::Zero(batch, u);

    for (int s = len - 1; s >= 0; --s) {
      const int t = reverse ? len - 1 - s : s;
      const Eigen::Index row0 = Eigen::Index(t) * batch;
      auto gi = c.gate_i.middleRows(row0, batch);
      auto gf = c.gate_f.middleRows(row0, batch);
      auto gg = c.gate_g.middleRows(row0, batch);
      auto go = c.gate_o.middleRows(row0, batch);
      auto tc = c.tanh_cell.middleRows(row0, batch);

      Mat<S> dh = dh_out.middleRows(row0, batch) + dh_rec;
      Mat<S> dgo = dh.cwiseProduct(tc);
      Mat<S> dc =
          dc_next +
          (dh.array() * go.array() * (S(1) - tc.array().square())).matrix();

      Mat<S> cell_prev;
      if (s > 0) {
        const int t_prev = reverse ? len - s : s - 1;
        cell_prev = c.cell.middleRows(Eigen::Index(t_prev) * batch, batch);
      } else {
        cell_prev = Mat<S>::Zero(batch, u);
      }

      auto dzb = dz.middleRows(row0, batch);
      dzb.leftCols(u) = (dc.cwiseProduct(gg).array() * gi.array() *
                         (S(1) - gi.array()))
                            .matrix();
      dzb.middleCols(u, u) = (dc.cwiseProduct(cell_prev).array() * gf.array() *
                              (S(1) - gf.array()))
                                 .matrix();
      dzb.middleCols(2 * u, u) =
          (dc.cwiseProduct(gi).array() * (S(1) - gg.array().square())).matrix();
      dzb.rightCols(u) =
          (dgo.array() * go.array() * (S(1) - go.array())).matrix();

      dh_rec.noalias() = dzb * p.w_rec.transpose();
      dc_next = dc.cwiseProduct(gf);
    }

    p.g_bias.row(0) += dz.colwise().sum();
    p.g_rec.noalias() += c.h_prev.transpose() * dz;
    if (cache.time_constant_input) {
      Mat<S> dz_sum = Mat<S>::Zero(batch, 4 * u);
      for (int t = 0; t < len; ++t)
        dz_sum += dz.middleRows(Eigen::Index(t) * batch, batch);
      p.g_in.noalias() += cache.input.topRows(batch).transpose() * dz_sum;
    } else {
      p.g_in.noalias() += cache.input.transpose() * dz;
    }
    if (need_input_grad) dx.noalias() += dz * p.w_in.transpose();
  }

  int in_features_ = 0;
  int units_ = 0;
  Direction fwd_, bwd_;
};

}  // namespace i2a::nn
