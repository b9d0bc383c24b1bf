#include "gq/objective.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gq {

double phi(const ObjectiveContext& ctx, const Eigen::VectorXd& alpha) {
  if (static_cast<int>(alpha.size()) != ctx.measure.dim())
    throw ValueError("alpha dimension mismatch");
  const auto& mu = ctx.measure;
  double acc = 0.0;
  for (int i = 0; i < mu.size(); ++i) {
    acc += mu.weight(i) * (vector_norm(alpha - mu.atom(i), ctx.norm_kind) -
                           vector_norm(mu.atom(i), ctx.norm_kind));
  }
  return acc - ctx.ell.vector().dot(alpha);
}

SubgradientResult subgradient(const ObjectiveContext& ctx,
                              const Eigen::VectorXd& alpha, double snap_tol) {
  if (ctx.norm_kind != NormKind::euclidean)
    throw UnsupportedNorm("subgradient requires the euclidean norm");
  const auto& mu = ctx.measure;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(mu.dim());
  double value = 0.0;
  std::optional<AtomHit> hit;
  for (int i = 0; i < mu.size(); ++i) {
    Eigen::VectorXd d = alpha - mu.atom(i);
    double r = d.norm();
    value += mu.weight(i) * (r - mu.atom(i).norm());
    bool coincide = (r == 0.0) || (snap_tol > 0.0 && r <= snap_tol);
    if (coincide) {
      if (hit) {
        hit->weight += mu.weight(i);
      } else {
        hit = AtomHit{i, mu.weight(i)};
      }
      continue;
    }
    g += (mu.weight(i) / r) * d;
  }
  g -= ctx.ell.vector();
  value -= ctx.ell.vector().dot(alpha);
  return {value, std::move(g), hit};
}

double h_function(const AtomicMeasure& mu, double r) {
  if (r <= 0.0) throw DomainError("h_function needs r > 0");
  double inner = 0.0, outer = 0.0;
  for (int i = 0; i < mu.size(); ++i) {
    double nx = mu.atom(i).norm();
    if (nx <= r) {
      inner += mu.weight(i) * nx;
    } else {
      outer += mu.weight(i);
    }
  }
  return inner / r + outer;
}

double radius_bound(const ObjectiveContext& ctx) {
  if (ctx.norm_kind != NormKind::euclidean)
    throw UnsupportedNorm("radius_bound requires the euclidean norm");
  const auto& mu = ctx.measure;
  const double threshold = (1.0 - ctx.ell.norm()) / 2.0;
  std::vector<double> grid;
  for (int i = 0; i < mu.size(); ++i) {
    double nx = mu.atom(i).norm();
    if (nx > 0.0) grid.push_back(nx);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) grid.push_back(1.0);
  for (double r : grid) {
    if (h_function(mu, r) < threshold) return r;
  }
  // h_n(r) -> 0 as r grows, so doubling terminates
  double r = grid.back();
  for (;;) {
    r *= 2.0;
    if (h_function(mu, r) < threshold) return r;
  }
}

namespace {

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  int i = index;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

std::vector<Eigen::VectorXd> probe_points(int d, double radius, int count) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29,
                               31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
  std::vector<Eigen::VectorXd> pts;
  if (d <= 3) {
    int per_axis = std::max(2, static_cast<int>(std::round(
                                   std::pow(static_cast<double>(count),
                                            1.0 / static_cast<double>(d)))));
    std::vector<int> idx(d, 0);
    for (;;) {
      Eigen::VectorXd p(d);
      for (int j = 0; j < d; ++j)
        p[j] = -radius + 2.0 * radius * idx[j] / (per_axis - 1);
      if (p.norm() <= radius) pts.push_back(p);
      int j = 0;
      while (j < d && ++idx[j] == per_axis) idx[j++] = 0;
      if (j == d) break;
    }
  } else {
    int got = 0, i = 1;
    while (got < count) {
      Eigen::VectorXd p(d);
      for (int j = 0; j < d; ++j)
        p[j] = -radius + 2.0 * radius * halton(i, primes[j % 20]);
      ++i;
      if (p.norm() <= radius) {
        pts.push_back(p);
        ++got;
      }
    }
  }
  pts.push_back(Eigen::VectorXd::Zero(d));
  return pts;
}

}  // namespace

double uniform_convergence_gap(const ObjectiveContext& population,
                               const ObjectiveContext& sample,
                               double ball_radius, int grid_points) {
  if (population.measure.dim() != sample.measure.dim())
    throw ValueError("dimension mismatch");
  if (ball_radius <= 0.0 || grid_points < 1)
    throw ValueError("bad probe configuration");
  double gap = 0.0;
  for (const auto& p :
       probe_points(population.measure.dim(), ball_radius, grid_points)) {
    gap = std::max(gap, std::abs(phi(sample, p) - phi(population, p)));
  }
  return gap;
}

}  // namespace gq
