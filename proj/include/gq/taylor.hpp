#pragma once

#include <Eigen/Dense>

#include "gq/errors.hpp"

namespace gq {

// Actual Taylor remainder against its min-form bound. The sharp constants are
// 1/2 for the norm expansion and 2 for the gradient expansion.
struct TaylorCheck {
  double lhs;
  double bound;
  double ratio;  // lhs / bound, with 0/0 -> 0
};

// Gradient of the euclidean norm at nonzero alpha: alpha / ||alpha||.
Eigen::VectorXd norm_gradient(const Eigen::VectorXd& alpha);

// Hessian-vector product (h - alpha <alpha,h>/||alpha||^2) / ||alpha|| without
// materializing the matrix.
Eigen::VectorXd norm_hessian_apply(const Eigen::VectorXd& alpha,
                                   const Eigen::VectorXd& h);

// | ||a+h|| - ||a|| - <grad N(a), h> - 1/2 <hess N(a) h, h> |
//   <= 1/2 min(||h||^2/||a||, ||h||^3/||a||^2)
TaylorCheck norm_taylor2_check(const Eigen::VectorXd& alpha,
                               const Eigen::VectorXd& h);

// || grad N(a+h) - grad N(a) - hess N(a) h ||
//   <= 2 min(||h||/||a||, ||h||^2/||a||^2)
TaylorCheck gradnorm_taylor1_check(const Eigen::VectorXd& alpha,
                                   const Eigen::VectorXd& h);

}  // namespace gq
