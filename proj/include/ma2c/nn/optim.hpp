#ifndef MA2C_NN_OPTIM_HPP
#define MA2C_NN_OPTIM_HPP

#include <cmath>

#include <Eigen/Core>

#include "ma2c/error.hpp"
#include "ma2c/nn/types.hpp"

namespace ma2c::nn {

/// Rescales `grad` in place so that its l2 norm is at most `max_norm`.
/// Returns the norm before clipping.
template <typename Scalar>
Scalar clip_by_global_norm(Vec<Scalar>& grad, Scalar max_norm) {
  if (!grad.allFinite()) throw InvalidArgument("clip_by_global_norm: non-finite gradient");
  const Scalar norm = grad.norm();
  if (norm > max_norm) grad *= max_norm / norm;
  return norm;
}

/// RMSprop with the epsilon inside the square root:
///   a <- decay a + (1 - decay) g^2,  w <- w - lr g / sqrt(a + eps)
template <typename Scalar>
class RmsProp {
 public:
  RmsProp() = default;
  RmsProp(Eigen::Index size, Scalar decay, Scalar epsilon)
      : accumulator_(Vec<Scalar>::Zero(size)), decay_(decay), epsilon_(epsilon) {}

  void step(Vec<Scalar>& params, const Vec<Scalar>& grad, Scalar lr) {
    if (params.size() != accumulator_.size() || grad.size() != accumulator_.size())
      throw InvalidArgument("RmsProp::step: shape mismatch");
    accumulator_ = decay_ * accumulator_ + (Scalar(1) - decay_) * grad.cwiseAbs2();
    params.array() -= lr * grad.array() / (accumulator_.array() + epsilon_).sqrt();
  }

  const Vec<Scalar>& accumulator() const { return accumulator_; }
  Vec<Scalar>& accumulator() { return accumulator_; }
  Scalar decay() const { return decay_; }
  Scalar epsilon() const { return epsilon_; }

 private:
  Vec<Scalar> accumulator_;
  Scalar decay_ = Scalar(0.99);
  Scalar epsilon_ = Scalar(1e-5);
};

}  // namespace ma2c::nn

#endif  // MA2C_NN_OPTIM_HPP
