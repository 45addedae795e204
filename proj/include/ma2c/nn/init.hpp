#ifndef MA2C_NN_INIT_HPP
#define MA2C_NN_INIT_HPP

#include <algorithm>
#include <random>

#include <Eigen/Dense>

namespace ma2c::nn {

/// Orthogonal initializer. For rows >= cols the columns are orthonormal
/// (W^T W = I), otherwise the rows are (W W^T = I). Scaled by `gain`.
template <typename Scalar, typename Rng>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> orthogonal(Eigen::Index rows, Eigen::Index cols, Rng& rng,
                                                                 double gain = 1.0) {
  const Eigen::Index tall = std::max(rows, cols), wide = std::min(rows, cols);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a(tall, wide);
  for (Eigen::Index j = 0; j < wide; ++j)
    for (Eigen::Index i = 0; i < tall; ++i) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(tall, wide);
  // Sign fix makes the result uniformly distributed over orthogonal matrices.
  const Eigen::MatrixXd r = qr.matrixQR().topRows(wide).template triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < wide; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  Eigen::MatrixXd w = rows >= cols ? q : Eigen::MatrixXd(q.transpose());
  return (gain * w).template cast<Scalar>();
}

}  // namespace ma2c::nn

#endif  // MA2C_NN_INIT_HPP
