#include "gq/taylor.hpp"

#include <algorithm>
#include <cmath>

namespace gq {

Eigen::VectorXd norm_gradient(const Eigen::VectorXd& alpha) {
  double na = alpha.norm();
  if (na == 0.0) throw DomainError("norm gradient undefined at 0");
  return alpha / na;
}

Eigen::VectorXd norm_hessian_apply(const Eigen::VectorXd& alpha,
                                   const Eigen::VectorXd& h) {
  double na = alpha.norm();
  if (na == 0.0) throw DomainError("norm Hessian undefined at 0");
  return (h - alpha * (alpha.dot(h) / (na * na))) / na;
}

namespace {
double ratio_of(double lhs, double bound) {
  return bound == 0.0 ? 0.0 : lhs / bound;
}
}  // namespace

TaylorCheck norm_taylor2_check(const Eigen::VectorXd& alpha,
                               const Eigen::VectorXd& h) {
  double na = alpha.norm();
  if (na == 0.0) throw DomainError("alpha must be nonzero");
  double nh = h.norm();
  double lhs = std::abs((alpha + h).norm() - na - norm_gradient(alpha).dot(h) -
                        0.5 * norm_hessian_apply(alpha, h).dot(h));
  double bound = 0.5 * std::min(nh * nh / na, nh * nh * nh / (na * na));
  return {lhs, bound, ratio_of(lhs, bound)};
}

TaylorCheck gradnorm_taylor1_check(const Eigen::VectorXd& alpha,
                                   const Eigen::VectorXd& h) {
  double na = alpha.norm();
  if (na == 0.0) throw DomainError("alpha must be nonzero");
  if ((alpha + h).norm() == 0.0) throw DomainError("alpha + h must be nonzero");
  double nh = h.norm();
  double lhs = (norm_gradient(alpha + h) - norm_gradient(alpha) -
                norm_hessian_apply(alpha, h))
                   .norm();
  double bound = 2.0 * std::min(nh / na, nh * nh / (na * na));
  return {lhs, bound, ratio_of(lhs, bound)};
}

}  // namespace gq
