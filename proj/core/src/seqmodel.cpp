#include "i2a/seqmodel.hpp"

namespace i2a {

Metrics metrics_from_confusion(const Eigen::MatrixXd& confusion) {
  const int C = static_cast<int>(confusion.rows());
  Metrics m;
  m.confusion = confusion;
  const double total = confusion.sum();
  if (total <= 0.0) return m;

  m.accuracy = confusion.trace() / total;
  for (int c = 0; c < C; ++c) {
    double support = confusion.row(c).sum();
    if (support <= 0.0) continue;
    double predicted = confusion.col(c).sum();
    double tp = confusion(c, c);
    double recall = tp / support;
    double precision = predicted > 0.0 ? tp / predicted : 0.0;
    double f1 = (precision + recall) > 0.0
                    ? 2.0 * precision * recall / (precision + recall)
                    : 0.0;
    m.weighted_recall += (support / total) * recall;
    m.weighted_f1 += (support / total) * f1;
  }
  return m;
}

}  // namespace i2a
