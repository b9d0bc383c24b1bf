#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gq/inference.hpp"
#include "gq/optimizer.hpp"

namespace gq {

// Sampling distributions for the replication engine. truncated_kl draws
// independent coordinates z_k ~ N(0, k^{-2s}) in a basis of dimension D, a
// desk-scale stand-in for basis-truncated functional data.
class Distribution {
 public:
  enum class Kind { gaussian, mixture, uniform_atoms, truncated_kl };

  struct Component {
    double weight;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov_chol;  // lower-triangular factor
  };

  static Distribution gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov);
  static Distribution mixture(std::vector<Component> components);
  static Distribution uniform_atoms(AtomicMeasure atoms);
  static Distribution truncated_kl(double s, int dim);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  Eigen::VectorXd draw(std::mt19937_64& rng) const;

  // center of symmetry, when the distribution is centrally symmetric
  bool symmetric_center(Eigen::VectorXd* center) const;

  const std::vector<Component>& components() const { return components_; }
  const AtomicMeasure* atoms() const {
    return atoms_.empty() ? nullptr : &atoms_[0];
  }
  double kl_decay() const { return kl_s_; }

 private:
  Kind kind_;
  int dim_ = 0;
  std::vector<Component> components_;
  std::vector<AtomicMeasure> atoms_;  // 0 or 1 entries
  double kl_s_ = 1.0;
};

enum class EpsSchedule {
  exact,        // solver driven to grad_tol 1e-12
  o_inv_n,      // target epsilon n^(-3/2), strictly o(1/n)
  o_n_neg_3_2,  // target epsilon n^(-2)
  o_n_neg_2     // target epsilon n^(-2.5)
};

EpsSchedule parse_eps_schedule(const std::string& s);
std::string eps_schedule_name(EpsSchedule s);
double eps_target(EpsSchedule s, int n);  // 0 for exact

struct ExperimentConfig {
  Distribution dist;
  Eigen::VectorXd ell;
  std::vector<int> n_grid;
  int replications = 100;
  std::uint64_t seed = 0;
  EpsSchedule schedule = EpsSchedule::exact;
  int threads = 1;
  int population_atoms = 200000;  // dense approximation for population truths
};

AtomicMeasure sample(const Distribution& dist, int n, std::mt19937_64& rng);

// The unique population quantile: the symmetry center when available with
// ell = 0, otherwise a tight solve on a dense atomic approximation.
Eigen::VectorXd true_quantile(const Distribution& dist,
                              const Eigen::VectorXd& ell,
                              std::uint64_t seed,
                              int population_atoms = 200000);

struct PopulationTruth {
  Eigen::VectorXd alpha_star;
  Eigen::MatrixXd H;
  Eigen::MatrixXd V;
  Eigen::MatrixXd Sigma;
};

PopulationTruth population_truth(const ExperimentConfig& cfg);

struct PerSampleSize {
  int n;
  int failures = 0;
  Eigen::MatrixXd emp_cov;       // covariance of sqrt(n)(alpha_hat - alpha_star)
  double rel_frobenius = 0.0;    // against the population Sigma
  Eigen::VectorXd ks;            // per-coordinate KS vs N(0,1)
  double median_remainder = 0.0; // ||sqrt(n)(alpha_hat - alpha_star) - beta_hat||
  double median_error = 0.0;     // ||alpha_hat - alpha_star||
  double max_certificate = 0.0;
};

struct ExperimentReport {
  std::string kind;
  Eigen::VectorXd alpha_star;
  Eigen::MatrixXd sigma_pop;
  std::vector<PerSampleSize> per_n;
  double slope_remainder = 0.0;    // log median remainder vs log n
  double slope_consistency = 0.0;  // log median error vs log n
  bool trend_ok = true;            // consistency medians decreasing (<=1 violation)
  int trend_violations = 0;
  bool insufficient_reps = false;
};

ExperimentReport run_normality(const ExperimentConfig& cfg);
ExperimentReport run_bahadur(const ExperimentConfig& cfg);
ExperimentReport run_consistency(const ExperimentConfig& cfg);

}  // namespace gq
