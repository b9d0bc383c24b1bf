#include "gq/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gq {

namespace {

constexpr double kAtomGuard = 1e-14;  // relative coincidence threshold
constexpr double kDescentSlack = 1e-12;

Eigen::VectorXd coordinatewise_median(const AtomicMeasure& mu) {
  Eigen::VectorXd med(mu.dim());
  std::vector<std::pair<double, double>> pw(mu.size());
  for (int j = 0; j < mu.dim(); ++j) {
    for (int i = 0; i < mu.size(); ++i) pw[i] = {mu.atom(i)[j], mu.weight(i)};
    std::sort(pw.begin(), pw.end());
    double cum = 0.0;
    med[j] = pw.back().first;
    for (auto& [p, w] : pw) {
      cum += w;
      if (cum >= 0.5) {
        med[j] = p;
        break;
      }
    }
  }
  return med;
}

struct LocalGeometry {
  Eigen::VectorXd g_rest;    // subgradient omitting coincident atoms (incl. -ell)
  double atom_weight = 0.0;  // total weight coinciding with alpha
  double inv_dist_sum = 0.0;
  Eigen::VectorXd weighted_dir_sum;  // sum w_i x_i / r_i over non-coincident
  double nearest_other = std::numeric_limits<double>::infinity();
  bool at_atom = false;
};

LocalGeometry local_geometry(const ObjectiveContext& ctx,
                             const Eigen::VectorXd& alpha) {
  const auto& mu = ctx.measure;
  LocalGeometry lg;
  lg.g_rest = Eigen::VectorXd::Zero(mu.dim());
  lg.weighted_dir_sum = Eigen::VectorXd::Zero(mu.dim());
  const double guard = kAtomGuard * (1.0 + alpha.norm());
  for (int i = 0; i < mu.size(); ++i) {
    Eigen::VectorXd d = alpha - mu.atom(i);
    double r = d.norm();
    if (r <= guard) {
      lg.atom_weight += mu.weight(i);
      lg.at_atom = true;
      continue;
    }
    lg.nearest_other = std::min(lg.nearest_other, r);
    lg.g_rest += (mu.weight(i) / r) * d;
    lg.inv_dist_sum += mu.weight(i) / r;
    lg.weighted_dir_sum += (mu.weight(i) / r) * mu.atom(i);
  }
  lg.g_rest -= ctx.ell.vector();
  return lg;
}

// norm of the minimum-norm subgradient at alpha
double effective_subgrad_norm(const LocalGeometry& lg) {
  double gn = lg.g_rest.norm();
  if (!lg.at_atom) return gn;
  return std::max(0.0, gn - lg.atom_weight);
}

}  // namespace

QuantileSolution solve(const ObjectiveContext& ctx, const SolverConfig& cfg) {
  if (ctx.norm_kind != NormKind::euclidean)
    throw UnsupportedNorm("solver requires the euclidean norm");
  if (ctx.ell.norm() >= 1.0)
    throw InvalidDirection("solver requires ||ell|| < 1");
  if (cfg.max_iters < 1 || cfg.grad_tol <= 0.0 || cfg.step_shrink <= 0.0 ||
      cfg.step_shrink >= 1.0)
    throw ConfigError("bad solver configuration");

  const double R = radius_bound(ctx);

  Eigen::VectorXd alpha;
  switch (cfg.init) {
    case InitKind::weighted_mean: alpha = ctx.measure.weighted_mean(); break;
    case InitKind::coordinatewise_median:
      alpha = coordinatewise_median(ctx.measure);
      break;
    case InitKind::user_point:
      if (static_cast<int>(cfg.init_point.size()) != ctx.measure.dim())
        throw ConfigError("init point dimension mismatch");
      alpha = cfg.init_point;
      break;
  }

  QuantileSolution sol;
  sol.converged = false;
  double phi_cur = phi(ctx, alpha);
  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    LocalGeometry lg = local_geometry(ctx, alpha);
    double sub_norm = effective_subgrad_norm(lg);
    bool atom_optimal = lg.at_atom && lg.g_rest.norm() <= lg.atom_weight;
    double eps = atom_optimal ? 0.0 : sub_norm * (alpha.norm() + R);
    if (cfg.record_trace) sol.trace.push_back({iter, phi_cur, sub_norm});

    if (atom_optimal || sub_norm <= cfg.grad_tol ||
        (cfg.target_epsilon && eps <= *cfg.target_epsilon)) {
      sol.converged = true;
      break;
    }

    if (lg.at_atom) {
      // Vardi-Zhang style escape from a non-optimal atom: damped step along
      // the steepest descent direction with an Armijo-style decrease check
      Eigen::VectorXd dir = -lg.g_rest / lg.g_rest.norm();
      double t = std::isfinite(lg.nearest_other) ? 0.5 * lg.nearest_other : 1.0;
      double phi_next = phi(ctx, alpha + t * dir);
      while (phi_next >= phi_cur - 0.1 * t * sub_norm && t > 1e-300) {
        t *= cfg.step_shrink;
        phi_next = phi(ctx, alpha + t * dir);
      }
      alpha += t * dir;
      phi_cur = phi_next;
      continue;
    }

    Eigen::VectorXd next =
        (lg.weighted_dir_sum + ctx.ell.vector()) / lg.inv_dist_sum;
    double phi_next = phi(ctx, next);
    if (phi_next > phi_cur + kDescentSlack) {
      // majorize-minimize guarantees descent; only float noise lands here
      break;
    }
    if ((next - alpha).norm() == 0.0) {
      alpha = next;
      phi_cur = phi_next;
      continue;
    }
    alpha = std::move(next);
    phi_cur = phi_next;
  }

  LocalGeometry lg = local_geometry(ctx, alpha);
  double sub_norm = effective_subgrad_norm(lg);
  bool atom_optimal = lg.at_atom && lg.g_rest.norm() <= lg.atom_weight;
  sol.alpha_hat = std::move(alpha);
  sol.subgrad_norm = sub_norm;
  sol.epsilon_certified =
      atom_optimal ? 0.0 : sub_norm * (sol.alpha_hat.norm() + R);
  sol.iterations = iter;
  sol.at_atom = lg.at_atom;
  if (atom_optimal || sub_norm <= cfg.grad_tol) sol.converged = true;
  return sol;
}

GridMinimum grid_minimize_2d(const ObjectiveContext& ctx,
                             const Eigen::Vector2d& lo,
                             const Eigen::Vector2d& hi, int resolution) {
  if (ctx.measure.dim() != 2) throw ValueError("grid oracle requires dim = 2");
  if (resolution < 2 || resolution > 4001)
    throw ValueError("resolution must be in [2, 4001]");
  if (!(lo[0] < hi[0]) || !(lo[1] < hi[1]))
    throw ValueError("degenerate box");

  const double tol = 1e-9;
  double min_value = std::numeric_limits<double>::infinity();
  std::vector<std::pair<Eigen::Vector2d, double>> values;
  values.reserve(static_cast<size_t>(resolution) * resolution);
  for (int iy = 0; iy < resolution; ++iy) {
    double y = lo[1] + (hi[1] - lo[1]) * iy / (resolution - 1);
    for (int ix = 0; ix < resolution; ++ix) {
      double x = lo[0] + (hi[0] - lo[0]) * ix / (resolution - 1);
      Eigen::Vector2d p(x, y);
      double v = phi(ctx, p);
      values.emplace_back(p, v);
      min_value = std::min(min_value, v);
    }
  }
  GridMinimum out;
  out.min_value = min_value;
  for (auto& [p, v] : values) {
    if (v <= min_value + tol) out.argmin.push_back(p);
  }
  return out;
}

}  // namespace gq
