#pragma once

#include <optional>
#include <vector>

#include "gq/objective.hpp"

namespace gq {

enum class InitKind { weighted_mean, coordinatewise_median, user_point };

struct SolverConfig {
  int max_iters = 100000;
  double grad_tol = 1e-10;
  double step_shrink = 0.5;
  InitKind init = InitKind::weighted_mean;
  Eigen::VectorXd init_point;  // used when init == user_point
  std::optional<double> target_epsilon;
  bool record_trace = false;
};

struct TraceEntry {
  int iteration;
  double phi_value;
  double subgrad_norm;
};

// Approximate quantile with a certified optimality gap: either the convexity
// bound ||g|| (||alpha|| + R), or exactly 0 when the atom optimality condition
// ||g_rest|| <= w(atom) holds.
struct QuantileSolution {
  Eigen::VectorXd alpha_hat;
  double epsilon_certified;
  double subgrad_norm;
  int iterations;
  bool at_atom;
  bool converged;
  std::vector<TraceEntry> trace;
};

// Modified Weiszfeld fixed-point iteration
//   alpha <- (sum_i w_i x_i / r_i + ell) / (sum_i w_i / r_i)
// with a damped escape step when an iterate lands on a non-optimal atom.
QuantileSolution solve(const ObjectiveContext& ctx, const SolverConfig& cfg = {});

struct GridMinimum {
  std::vector<Eigen::VectorXd> argmin;
  double min_value;
};

// Brute-force oracle over a 2-D tensor grid; any NormKind. Returns all grid
// points within 1e-9 of the grid minimum.
GridMinimum grid_minimize_2d(const ObjectiveContext& ctx,
                             const Eigen::Vector2d& lo,
                             const Eigen::Vector2d& hi, int resolution);

}  // namespace gq
