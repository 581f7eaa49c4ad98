#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "i2a/errors.hpp"
#include "i2a/rng.hpp"

namespace i2a::nn {

// Sequence tensors are (seq_len * batch) x features matrices in time-major
// blocks: rows [t * batch, (t + 1) * batch) hold timestep t for every batch
// member. One layout serves both the recurrent loops (one block per step)
// and the big cross-time GEMMs (whole matrix at once).
template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <class S>
struct ParamRef {
  std::string name;
  Mat<S>* value = nullptr;
  Mat<S>* grad = nullptr;
};

template <class S>
void check_finite(const Mat<S>& m, const char* layer) {
  if (!m.allFinite())
    throw NumericError(std::string("non-finite values after layer: ") + layer);
}

/// Uniform init in +-sqrt(6 / (fan_in + fan_out)); row-major fill order so
/// the draw sequence is storage-independent.
template <class S>
void glorot_init(Mat<S>& m, int fan_in, int fan_out, SplitMix64& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = static_cast<S>(rng.uniform(-limit, limit));
}

template <class S>
void small_uniform_init(Mat<S>& m, double limit, SplitMix64& rng) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = static_cast<S>(rng.uniform(-limit, limit));
}

template <class S>
Mat<S> sigmoid(const Mat<S>& z) {
  return ((-z.array()).exp() + S(1)).inverse().matrix();
}

}  // namespace i2a::nn
