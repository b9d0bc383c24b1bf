#pragma once

#include <optional>

#include "gq/measure.hpp"

namespace gq {

// Bundles the measure, the quantile direction and the norm; evaluation of the
// empirical objective and its subgradients happens against this context.
struct ObjectiveContext {
  AtomicMeasure measure;
  QuantileDirection ell;
  NormKind norm_kind = NormKind::euclidean;

  ObjectiveContext(AtomicMeasure m, QuantileDirection l,
                   NormKind kind = NormKind::euclidean)
      : measure(std::move(m)), ell(std::move(l)), norm_kind(kind) {
    if (measure.dim() != ell.dim())
      throw ValueError("measure/ell dimension mismatch");
  }
};

struct AtomHit {
  int index;
  double weight;  // total weight of atoms coinciding with alpha
};

struct SubgradientResult {
  double value;
  Eigen::VectorXd subgradient;
  std::optional<AtomHit> at_atom;
};

// phi(alpha) = sum_i w_i (||alpha - x_i|| - ||x_i||) - <ell, alpha>
double phi(const ObjectiveContext& ctx, const Eigen::VectorXd& alpha);

// g = sum_{x_i != alpha} w_i (alpha - x_i)/||alpha - x_i|| - ell.
// When alpha coincides with an atom, the atom's contribution is omitted (still
// a subgradient since 0 lies in the subdifferential of the norm at 0) and
// at_atom reports the hit. snap_tol > 0 widens the coincidence test.
SubgradientResult subgradient(const ObjectiveContext& ctx,
                              const Eigen::VectorXd& alpha,
                              double snap_tol = 0.0);

// Empirical h-function: h_n(r) = (1/r) sum_i w_i ||x_i|| 1{||x_i|| <= r}
//                               + sum_i w_i 1{||x_i|| > r}
double h_function(const AtomicMeasure& mu, double r);

// Smallest grid radius R with h_n(R) < (1 - ||ell||)/2; every exact minimizer
// of the empirical objective lies in the closed ball B(0, R).
double radius_bound(const ObjectiveContext& ctx);

// sup_{||alpha|| <= ball_radius} |phi_sample - phi_population| over a
// deterministic probe set: a tensor grid for d <= 3, Halton points otherwise.
double uniform_convergence_gap(const ObjectiveContext& population,
                               const ObjectiveContext& sample,
                               double ball_radius, int grid_points);

}  // namespace gq
