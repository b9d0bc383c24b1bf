#pragma once

#include "gq/objective.hpp"

namespace gq {

// Plug-in sandwich quantities at an evaluation point: curvature H, score
// covariance V, asymptotic covariance Sigma = H^-1 V H^-1, and moment
// diagnostics. kappa = lambda_min(H); kappa = 0 signals data at or near a
// single affine line.
struct InferenceReport {
  Eigen::MatrixXd H;
  Eigen::MatrixXd V;
  Eigen::MatrixXd Sigma;
  double kappa;
  int n_excluded;       // atoms coinciding with the evaluation point
  double moment1;       // weighted mean of 1/||x_i - alpha||
  double moment2;       // weighted mean of 1/||x_i - alpha||^2
  bool pseudo_inverse;  // Sigma computed through a pseudo-inverse of H
};

Eigen::MatrixXd estimate_H(const ObjectiveContext& ctx,
                           const Eigen::VectorXd& alpha);

Eigen::MatrixXd estimate_V(const ObjectiveContext& ctx,
                           const Eigen::VectorXd& alpha);

// Sigma = H^-1 V H^-1 via symmetric eigendecomposition. Throws SingularHessian
// when lambda_min(H) <= 1e-12 * lambda_max(H).
Eigen::MatrixXd sandwich_sigma(const Eigen::MatrixXd& H,
                               const Eigen::MatrixXd& V);

InferenceReport infer(const ObjectiveContext& ctx, const Eigen::VectorXd& alpha);

// beta_hat = -sqrt(n) H^-1 grad phi_n(alpha_star), with H either the plug-in
// estimate at alpha_star or a caller-supplied population matrix.
Eigen::VectorXd beta_hat(const ObjectiveContext& ctx,
                         const Eigen::VectorXd& alpha_star,
                         const Eigen::MatrixXd* population_H = nullptr);

// Quadratic surrogate of the rescaled empirical objective around the anchor.
struct QuadraticSurrogate {
  Eigen::VectorXd anchor;
  double value0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd H;
  int n;
};

QuadraticSurrogate make_surrogate(const ObjectiveContext& ctx,
                                  const Eigen::VectorXd& anchor,
                                  const Eigen::MatrixXd* population_H = nullptr);

double surrogate_eval(const QuadraticSurrogate& s, const Eigen::VectorXd& beta);

// Rescaled empirical objective psi_n(beta) = phi_n(anchor + beta/sqrt(n)).
double psi_eval(const ObjectiveContext& ctx, const Eigen::VectorXd& anchor,
                const Eigen::VectorXd& beta, int n);

// Two-sided CI for <f, alpha_star>: <f, alpha_hat> +/- z sqrt(f' Sigma f / n).
std::pair<double, double> confint_functional(const InferenceReport& report,
                                             const Eigen::VectorXd& alpha_hat,
                                             const Eigen::VectorXd& f, int n,
                                             double level);

}  // namespace gq
