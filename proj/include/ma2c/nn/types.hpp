#ifndef MA2C_NN_TYPES_HPP
#define MA2C_NN_TYPES_HPP

#include <Eigen/Core>

namespace ma2c::nn {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace ma2c::nn

#endif  // MA2C_NN_TYPES_HPP
