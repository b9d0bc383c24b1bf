#include "gq/inference.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "gq/stats.hpp"

namespace gq {

namespace {

void check_euclidean(const ObjectiveContext& ctx) {
  if (ctx.norm_kind != NormKind::euclidean)
    throw UnsupportedNorm("inference requires the euclidean norm");
}

}  // namespace

Eigen::MatrixXd estimate_H(const ObjectiveContext& ctx,
                           const Eigen::VectorXd& alpha) {
  check_euclidean(ctx);
  const auto& mu = ctx.measure;
  const int d = mu.dim();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d, d);
  bool any = false;
  for (int i = 0; i < mu.size(); ++i) {
    Eigen::VectorXd diff = alpha - mu.atom(i);
    double r = diff.norm();
    if (r == 0.0) continue;
    any = true;
    Eigen::VectorXd u = diff / r;
    H += (mu.weight(i) / r) *
         (Eigen::MatrixXd::Identity(d, d) - u * u.transpose());
  }
  if (!any) throw DegenerateError("all atoms coincide with alpha");
  return 0.5 * (H + H.transpose());
}

Eigen::MatrixXd estimate_V(const ObjectiveContext& ctx,
                           const Eigen::VectorXd& alpha) {
  check_euclidean(ctx);
  const auto& mu = ctx.measure;
  const int d = mu.dim();
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(d, d);
  bool any = false;
  for (int i = 0; i < mu.size(); ++i) {
    Eigen::VectorXd diff = alpha - mu.atom(i);
    double r = diff.norm();
    if (r == 0.0) continue;
    any = true;
    Eigen::VectorXd s = diff / r - ctx.ell.vector();
    V += mu.weight(i) * s * s.transpose();
  }
  if (!any) throw DegenerateError("all atoms coincide with alpha");
  return 0.5 * (V + V.transpose());
}

Eigen::MatrixXd sandwich_sigma(const Eigen::MatrixXd& H,
                               const Eigen::MatrixXd& V) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const auto& ev = es.eigenvalues();
  double lmax = ev.cwiseAbs().maxCoeff();
  if (ev.minCoeff() <= 1e-12 * lmax)
    throw SingularHessian("H is singular; data may lie on an affine line");
  Eigen::MatrixXd Hinv = es.eigenvectors() *
                         ev.cwiseInverse().asDiagonal() *
                         es.eigenvectors().transpose();
  Eigen::MatrixXd S = Hinv * V * Hinv;
  return 0.5 * (S + S.transpose());
}

InferenceReport infer(const ObjectiveContext& ctx,
                      const Eigen::VectorXd& alpha) {
  check_euclidean(ctx);
  InferenceReport rep;
  rep.H = estimate_H(ctx, alpha);
  rep.V = estimate_V(ctx, alpha);

  const auto& mu = ctx.measure;
  rep.n_excluded = 0;
  double m1 = 0.0, m2 = 0.0, wsum = 0.0;
  for (int i = 0; i < mu.size(); ++i) {
    double r = (alpha - mu.atom(i)).norm();
    if (r == 0.0) {
      ++rep.n_excluded;
      continue;
    }
    m1 += mu.weight(i) / r;
    m2 += mu.weight(i) / (r * r);
    wsum += mu.weight(i);
  }
  rep.moment1 = wsum > 0.0 ? m1 / wsum : 0.0;
  rep.moment2 = wsum > 0.0 ? m2 / wsum : 0.0;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep.H);
  rep.kappa = es.eigenvalues().minCoeff();
  rep.pseudo_inverse = false;
  try {
    rep.Sigma = sandwich_sigma(rep.H, rep.V);
  } catch (const SingularHessian&) {
    // near-collinear supports: fall back to a pseudo-inverse on the
    // nonzero spectrum and flag it in the report
    rep.pseudo_inverse = true;
    double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::VectorXd inv = es.eigenvalues();
    for (int i = 0; i < inv.size(); ++i)
      inv[i] = inv[i] > 1e-12 * lmax ? 1.0 / inv[i] : 0.0;
    Eigen::MatrixXd Hpinv =
        es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    Eigen::MatrixXd S = Hpinv * rep.V * Hpinv;
    rep.Sigma = 0.5 * (S + S.transpose());
  }
  return rep;
}

Eigen::VectorXd beta_hat(const ObjectiveContext& ctx,
                         const Eigen::VectorXd& alpha_star,
                         const Eigen::MatrixXd* population_H) {
  check_euclidean(ctx);
  Eigen::MatrixXd H =
      population_H ? *population_H : estimate_H(ctx, alpha_star);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const auto& ev = es.eigenvalues();
  if (ev.minCoeff() <= 1e-12 * ev.cwiseAbs().maxCoeff())
    throw SingularHessian("H is singular at alpha_star");
  Eigen::VectorXd score = subgradient(ctx, alpha_star).subgradient;
  double sqrt_n = std::sqrt(static_cast<double>(ctx.measure.size()));
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose() * (-sqrt_n * score);
}

QuadraticSurrogate make_surrogate(const ObjectiveContext& ctx,
                                  const Eigen::VectorXd& anchor,
                                  const Eigen::MatrixXd* population_H) {
  check_euclidean(ctx);
  QuadraticSurrogate s;
  s.anchor = anchor;
  s.value0 = phi(ctx, anchor);
  s.grad = subgradient(ctx, anchor).subgradient;
  s.H = population_H ? *population_H : estimate_H(ctx, anchor);
  s.n = ctx.measure.size();
  return s;
}

double surrogate_eval(const QuadraticSurrogate& s, const Eigen::VectorXd& beta) {
  Eigen::VectorXd b = beta / std::sqrt(static_cast<double>(s.n));
  return s.value0 + s.grad.dot(b) + 0.5 * b.dot(s.H * b);
}

double psi_eval(const ObjectiveContext& ctx, const Eigen::VectorXd& anchor,
                const Eigen::VectorXd& beta, int n) {
  return phi(ctx, anchor + beta / std::sqrt(static_cast<double>(n)));
}

std::pair<double, double> confint_functional(const InferenceReport& report,
                                             const Eigen::VectorXd& alpha_hat,
                                             const Eigen::VectorXd& f, int n,
                                             double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must be in (0,1)");
  if (report.kappa <= 0.0)
    throw SingularHessian("confidence interval needs kappa > 0");
  double center = f.dot(alpha_hat);
  double var = f.dot(report.Sigma * f) / static_cast<double>(n);
  double half = normal_quantile(0.5 * (1.0 + level)) * std::sqrt(std::max(0.0, var));
  return {center - half, center + half};
}

}  // namespace gq
