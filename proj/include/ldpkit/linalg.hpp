#pragma once

#include <Eigen/Dense>

namespace ldp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Vec scalar_vec(double x) { return Vec::Constant(1, x); }

}  // namespace ldp
