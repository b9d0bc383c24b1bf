#include "gq/montecarlo.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <thread>

#include "gq/stats.hpp"

namespace gq {

namespace {

Eigen::MatrixXd chol_factor(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw ConfigError("covariance is not positive definite");
  return llt.matrixL();
}

}  // namespace

Distribution Distribution::gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
  Distribution d;
  d.kind_ = Kind::gaussian;
  d.dim_ = static_cast<int>(mean.size());
  if (cov.rows() != d.dim_ || cov.cols() != d.dim_)
    throw ConfigError("mean/cov dimension mismatch");
  d.components_.push_back({1.0, std::move(mean), chol_factor(cov)});
  return d;
}

Distribution Distribution::mixture(std::vector<Component> components) {
  if (components.empty()) throw ConfigError("mixture needs components");
  Distribution d;
  d.kind_ = Kind::mixture;
  d.dim_ = static_cast<int>(components[0].mean.size());
  double wsum = 0.0;
  for (auto& c : components) {
    if (static_cast<int>(c.mean.size()) != d.dim_)
      throw ConfigError("mixture component dimension mismatch");
    if (c.weight < 0.0) throw ConfigError("negative mixture weight");
    wsum += c.weight;
  }
  if (wsum <= 0.0) throw ConfigError("mixture weights sum to zero");
  for (auto& c : components) c.weight /= wsum;
  d.components_ = std::move(components);
  return d;
}

Distribution Distribution::uniform_atoms(AtomicMeasure atoms) {
  Distribution d;
  d.kind_ = Kind::uniform_atoms;
  d.dim_ = atoms.dim();
  d.atoms_.push_back(std::move(atoms));
  return d;
}

Distribution Distribution::truncated_kl(double s, int dim) {
  if (dim < 1) throw ConfigError("truncated_kl needs dim >= 1");
  Distribution d;
  d.kind_ = Kind::truncated_kl;
  d.dim_ = dim;
  d.kl_s_ = s;
  return d;
}

Eigen::VectorXd Distribution::draw(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  switch (kind_) {
    case Kind::gaussian:
    case Kind::mixture: {
      size_t k = 0;
      if (components_.size() > 1) {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double u = unif(rng), cum = 0.0;
        for (; k + 1 < components_.size(); ++k) {
          cum += components_[k].weight;
          if (u < cum) break;
        }
      }
      const auto& c = components_[k];
      Eigen::VectorXd z(dim_);
      for (int j = 0; j < dim_; ++j) z[j] = normal(rng);
      return c.mean + c.cov_chol * z;
    }
    case Kind::uniform_atoms: {
      const auto& mu = atoms_[0];
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      double u = unif(rng), cum = 0.0;
      for (int i = 0; i < mu.size(); ++i) {
        cum += mu.weight(i);
        if (u < cum) return mu.atom(i);
      }
      return mu.atom(mu.size() - 1);
    }
    case Kind::truncated_kl: {
      Eigen::VectorXd z(dim_);
      for (int k = 0; k < dim_; ++k)
        z[k] = normal(rng) * std::pow(static_cast<double>(k + 1), -kl_s_);
      return z;
    }
  }
  throw ConfigError("unknown distribution kind");
}

bool Distribution::symmetric_center(Eigen::VectorXd* center) const {
  switch (kind_) {
    case Kind::gaussian:
    case Kind::truncated_kl:
      *center = kind_ == Kind::gaussian ? components_[0].mean
                                        : Eigen::VectorXd::Zero(dim_);
      return true;
    case Kind::uniform_atoms:
      if (atoms_[0].size() == 1) {
        *center = atoms_[0].atom(0);
        return true;
      }
      return false;
    case Kind::mixture:
      return false;
  }
  return false;
}

EpsSchedule parse_eps_schedule(const std::string& s) {
  if (s == "exact") return EpsSchedule::exact;
  if (s == "o_inv_n") return EpsSchedule::o_inv_n;
  if (s == "o_n_neg_3_2") return EpsSchedule::o_n_neg_3_2;
  if (s == "o_n_neg_2") return EpsSchedule::o_n_neg_2;
  throw ConfigError("unknown epsilon schedule: " + s);
}

std::string eps_schedule_name(EpsSchedule s) {
  switch (s) {
    case EpsSchedule::exact: return "exact";
    case EpsSchedule::o_inv_n: return "o_inv_n";
    case EpsSchedule::o_n_neg_3_2: return "o_n_neg_3_2";
    case EpsSchedule::o_n_neg_2: return "o_n_neg_2";
  }
  return "?";
}

double eps_target(EpsSchedule s, int n) {
  double x = static_cast<double>(n);
  switch (s) {
    case EpsSchedule::exact: return 0.0;
    case EpsSchedule::o_inv_n: return std::pow(x, -1.5);
    case EpsSchedule::o_n_neg_3_2: return std::pow(x, -2.0);
    case EpsSchedule::o_n_neg_2: return std::pow(x, -2.5);
  }
  return 0.0;
}

AtomicMeasure sample(const Distribution& dist, int n, std::mt19937_64& rng) {
  if (n < 1) throw ConfigError("sample size must be positive");
  std::vector<Eigen::VectorXd> atoms;
  atoms.reserve(n);
  for (int i = 0; i < n; ++i) atoms.push_back(dist.draw(rng));
  return AtomicMeasure::uniform(std::move(atoms));
}

namespace {

constexpr std::uint64_t kPopulationStream = 0xfeedface12345678ULL;

SolverConfig schedule_solver_config(EpsSchedule s, int n) {
  SolverConfig cfg;
  cfg.grad_tol = 1e-12;
  cfg.max_iters = 20000;
  double t = eps_target(s, n);
  if (t > 0.0) cfg.target_epsilon = t;
  return cfg;
}

AtomicMeasure dense_approximation(const Distribution& dist,
                                  std::uint64_t seed, int atoms) {
  std::mt19937_64 rng(mix_seed(seed, kPopulationStream));
  return sample(dist, atoms, rng);
}

}  // namespace

Eigen::VectorXd true_quantile(const Distribution& dist,
                              const Eigen::VectorXd& ell, std::uint64_t seed,
                              int population_atoms) {
  Eigen::VectorXd center;
  if (ell.norm() == 0.0 && dist.symmetric_center(&center)) return center;
  if (dist.kind() == Distribution::Kind::uniform_atoms) {
    // the population measure is itself atomic: solve it directly
    ObjectiveContext ctx(*dist.atoms(), QuantileDirection(ell));
    SolverConfig cfg;
    cfg.grad_tol = 1e-12;
    cfg.max_iters = 200000;
    return solve(ctx, cfg).alpha_hat;
  }
  AtomicMeasure dense = dense_approximation(dist, seed, population_atoms);
  ObjectiveContext ctx(std::move(dense), QuantileDirection(ell));
  SolverConfig cfg;
  cfg.grad_tol = 1e-12;
  cfg.max_iters = 200000;
  return solve(ctx, cfg).alpha_hat;
}

PopulationTruth population_truth(const ExperimentConfig& cfg) {
  PopulationTruth t;
  t.alpha_star =
      true_quantile(cfg.dist, cfg.ell, cfg.seed, cfg.population_atoms);
  AtomicMeasure dense =
      cfg.dist.kind() == Distribution::Kind::uniform_atoms
          ? *cfg.dist.atoms()
          : dense_approximation(cfg.dist, cfg.seed, cfg.population_atoms);
  ObjectiveContext ctx(std::move(dense), QuantileDirection(cfg.ell));
  t.H = estimate_H(ctx, t.alpha_star);
  t.V = estimate_V(ctx, t.alpha_star);
  t.Sigma = sandwich_sigma(t.H, t.V);
  return t;
}

namespace {

struct ReplicationResult {
  bool ok = false;
  Eigen::VectorXd alpha_hat;
  Eigen::VectorXd beta;  // beta_hat with the population H
  double certificate = 0.0;
};

// Deterministic per-(n, replication) seeding: results are identical no matter
// how replications are split across threads.
std::uint64_t rep_seed(std::uint64_t seed, size_t n_index, int rep) {
  return mix_seed(seed, (static_cast<std::uint64_t>(n_index) << 32) |
                            static_cast<std::uint64_t>(rep));
}

std::vector<ReplicationResult> run_replications(
    const ExperimentConfig& cfg, size_t n_index, int n,
    const PopulationTruth& truth, bool need_beta) {
  std::vector<ReplicationResult> results(cfg.replications);
  auto worker = [&](int begin, int step) {
    for (int rep = begin; rep < cfg.replications; rep += step) {
      std::mt19937_64 rng(rep_seed(cfg.seed, n_index, rep));
      try {
        AtomicMeasure mu = sample(cfg.dist, n, rng);
        ObjectiveContext ctx(std::move(mu), QuantileDirection(cfg.ell));
        QuantileSolution sol = solve(ctx, schedule_solver_config(cfg.schedule, n));
        ReplicationResult r;
        r.alpha_hat = sol.alpha_hat;
        r.certificate = sol.epsilon_certified;
        if (need_beta) r.beta = beta_hat(ctx, truth.alpha_star, &truth.H);
        r.ok = true;
        results[rep] = std::move(r);
      } catch (const std::exception&) {
        results[rep].ok = false;
      }
    }
  };
  int nthreads = std::max(1, cfg.threads);
  if (nthreads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t, nthreads);
    for (auto& th : pool) th.join();
  }
  return results;
}

void fit_slopes(ExperimentReport* rep) {
  std::vector<double> logn, logrem, logerr;
  for (const auto& p : rep->per_n) {
    logn.push_back(std::log(static_cast<double>(p.n)));
    if (p.median_remainder > 0.0) logrem.push_back(std::log(p.median_remainder));
    if (p.median_error > 0.0) logerr.push_back(std::log(p.median_error));
  }
  if (logrem.size() == logn.size() && logn.size() >= 2)
    rep->slope_remainder = ls_slope(logn, logrem);
  if (logerr.size() == logn.size() && logn.size() >= 2)
    rep->slope_consistency = ls_slope(logn, logerr);
}

void check_trend(ExperimentReport* rep) {
  rep->trend_violations = 0;
  for (size_t i = 1; i < rep->per_n.size(); ++i) {
    if (rep->per_n[i].median_error >= rep->per_n[i - 1].median_error)
      ++rep->trend_violations;
  }
  rep->trend_ok = rep->trend_violations <= 1;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.n_grid.empty()) throw ConfigError("empty n_grid");
  for (size_t i = 1; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] <= cfg.n_grid[i - 1])
      throw ConfigError("n_grid must be strictly increasing");
  }
  if (cfg.replications < 1) throw ConfigError("replications must be >= 1");
  if (static_cast<int>(cfg.ell.size()) != cfg.dist.dim())
    throw ConfigError("ell/distribution dimension mismatch");
}

}  // namespace

ExperimentReport run_normality(const ExperimentConfig& cfg) {
  validate_config(cfg);
  PopulationTruth truth = population_truth(cfg);
  ExperimentReport rep;
  rep.kind = "normality";
  rep.alpha_star = truth.alpha_star;
  rep.sigma_pop = truth.Sigma;
  rep.insufficient_reps = cfg.replications < 2;
  const int d = cfg.dist.dim();

  for (size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    int n = cfg.n_grid[ni];
    auto results = run_replications(cfg, ni, n, truth, false);
    PerSampleSize per;
    per.n = n;
    double sqn = std::sqrt(static_cast<double>(n));
    std::vector<Eigen::VectorXd> zs;
    for (const auto& r : results) {
      if (!r.ok) {
        ++per.failures;
        continue;
      }
      zs.push_back(sqn * (r.alpha_hat - truth.alpha_star));
      per.max_certificate = std::max(per.max_certificate, r.certificate);
    }
    if (zs.size() >= 2) {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
      for (const auto& z : zs) mean += z;
      mean /= static_cast<double>(zs.size());
      Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
      for (const auto& z : zs) cov += (z - mean) * (z - mean).transpose();
      cov /= static_cast<double>(zs.size() - 1);
      per.emp_cov = cov;
      per.rel_frobenius =
          (cov - truth.Sigma).norm() / truth.Sigma.norm();
      per.ks.resize(d);
      for (int j = 0; j < d; ++j) {
        double sd = std::sqrt(truth.Sigma(j, j));
        std::vector<double> coord;
        coord.reserve(zs.size());
        for (const auto& z : zs) coord.push_back(z[j] / sd);
        per.ks[j] = ks_statistic_normal(std::move(coord));
      }
    } else {
      rep.insufficient_reps = true;
      per.emp_cov = Eigen::MatrixXd::Zero(d, d);
      per.ks = Eigen::VectorXd::Zero(d);
    }
    std::vector<double> errs;
    for (const auto& r : results) {
      if (r.ok) errs.push_back((r.alpha_hat - truth.alpha_star).norm());
    }
    if (!errs.empty()) per.median_error = median(std::move(errs));
    rep.per_n.push_back(std::move(per));
  }
  fit_slopes(&rep);
  check_trend(&rep);
  return rep;
}

ExperimentReport run_bahadur(const ExperimentConfig& cfg) {
  validate_config(cfg);
  PopulationTruth truth = population_truth(cfg);
  ExperimentReport rep;
  rep.kind = "bahadur";
  rep.alpha_star = truth.alpha_star;
  rep.sigma_pop = truth.Sigma;
  rep.insufficient_reps = cfg.replications < 2;
  const int d = cfg.dist.dim();

  for (size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    int n = cfg.n_grid[ni];
    auto results = run_replications(cfg, ni, n, truth, true);
    PerSampleSize per;
    per.n = n;
    per.emp_cov = Eigen::MatrixXd::Zero(d, d);
    per.ks = Eigen::VectorXd::Zero(d);
    double sqn = std::sqrt(static_cast<double>(n));
    std::vector<double> remainders, errs;
    for (const auto& r : results) {
      if (!r.ok) {
        ++per.failures;
        continue;
      }
      Eigen::VectorXd z = sqn * (r.alpha_hat - truth.alpha_star);
      remainders.push_back((z - r.beta).norm());
      errs.push_back((r.alpha_hat - truth.alpha_star).norm());
      per.max_certificate = std::max(per.max_certificate, r.certificate);
    }
    if (!remainders.empty()) per.median_remainder = median(std::move(remainders));
    if (!errs.empty()) per.median_error = median(std::move(errs));
    rep.per_n.push_back(std::move(per));
  }
  fit_slopes(&rep);
  check_trend(&rep);
  return rep;
}

ExperimentReport run_consistency(const ExperimentConfig& cfg) {
  validate_config(cfg);
  PopulationTruth truth;
  truth.alpha_star =
      true_quantile(cfg.dist, cfg.ell, cfg.seed, cfg.population_atoms);
  ExperimentReport rep;
  rep.kind = "consistency";
  rep.alpha_star = truth.alpha_star;
  rep.sigma_pop = Eigen::MatrixXd::Zero(cfg.dist.dim(), cfg.dist.dim());
  const int d = cfg.dist.dim();

  for (size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    int n = cfg.n_grid[ni];
    auto results = run_replications(cfg, ni, n, truth, false);
    PerSampleSize per;
    per.n = n;
    per.emp_cov = Eigen::MatrixXd::Zero(d, d);
    per.ks = Eigen::VectorXd::Zero(d);
    std::vector<double> errs;
    for (const auto& r : results) {
      if (!r.ok) {
        ++per.failures;
        continue;
      }
      errs.push_back((r.alpha_hat - truth.alpha_star).norm());
      per.max_certificate = std::max(per.max_certificate, r.certificate);
    }
    if (!errs.empty()) per.median_error = median(std::move(errs));
    rep.per_n.push_back(std::move(per));
  }
  fit_slopes(&rep);
  check_trend(&rep);
  return rep;
}

}  // namespace gq
