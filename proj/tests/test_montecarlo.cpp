#include <doctest.h>

#include <cmath>

#include "gq/json_io.hpp"
#include "gq/montecarlo.hpp"
#include "gq/stats.hpp"

using namespace gq;

namespace {

ExperimentConfig small_gaussian_config() {
  ExperimentConfig cfg{
      Distribution::gaussian(Eigen::Vector2d(0, 0),
                             Eigen::Matrix2d::Identity())};
  cfg.ell = Eigen::Vector2d(0, 0);
  cfg.n_grid = {50, 100};
  cfg.replications = 30;
  cfg.seed = 424242;
  cfg.population_atoms = 20000;
  return cfg;
}

}  // namespace

TEST_CASE("seeded sampling is deterministic") {
  Distribution dist =
      Distribution::gaussian(Eigen::Vector2d(0, 0), Eigen::Matrix2d::Identity());
  std::mt19937_64 a(99), b(99);
  AtomicMeasure m1 = sample(dist, 3, a);
  AtomicMeasure m2 = sample(dist, 3, b);
  for (int i = 0; i < 3; ++i) CHECK(m1.atom(i) == m2.atom(i));
}

TEST_CASE("uniform-atom draws land on the support") {
  AtomicMeasure support = AtomicMeasure::uniform(
      {Eigen::Vector2d(-1, 0), Eigen::Vector2d(1, 0)});
  Distribution dist = Distribution::uniform_atoms(support);
  std::mt19937_64 rng(7);
  AtomicMeasure s = sample(dist, 50, rng);
  for (int i = 0; i < s.size(); ++i) {
    bool onA = (s.atom(i) - Eigen::Vector2d(-1, 0)).norm() == 0.0;
    bool onB = (s.atom(i) - Eigen::Vector2d(1, 0)).norm() == 0.0;
    CHECK((onA || onB));
  }
}

TEST_CASE("truncated KL coordinate variances follow the decay") {
  Distribution dist = Distribution::truncated_kl(1.0, 20);
  std::mt19937_64 rng(11);
  const int n = 4000;
  AtomicMeasure s = sample(dist, n, rng);
  for (int k : {0, 1, 4, 9, 19}) {
    double var = 0.0;
    for (int i = 0; i < n; ++i) var += s.atom(i)[k] * s.atom(i)[k];
    var /= n;
    double expected = std::pow(static_cast<double>(k + 1), -2.0);
    // chi^2 sampling band: sd of the variance estimate is sqrt(2/n)*expected
    double band = 3.0 * std::sqrt(2.0 / n) * expected;
    CHECK(std::abs(var - expected) <= band);
  }
}

TEST_CASE("true quantile: symmetry and translation") {
  Distribution g0 = Distribution::gaussian(Eigen::Vector3d(0, 0, 0),
                                           Eigen::Matrix3d::Identity());
  CHECK(true_quantile(g0, Eigen::Vector3d(0, 0, 0), 1).norm() == 0.0);
  Distribution g12 = Distribution::gaussian(Eigen::Vector2d(1, 2),
                                            Eigen::Matrix2d::Identity());
  Eigen::VectorXd q = true_quantile(g12, Eigen::Vector2d(0, 0), 1);
  CHECK((q - Eigen::Vector2d(1, 2)).norm() == 0.0);
}

TEST_CASE("true quantile with tilt comes from a dense solve with certificate") {
  Distribution g = Distribution::gaussian(
      Eigen::Vector2d(0, 0), Eigen::Vector2d(1.0, 4.0).asDiagonal());
  Eigen::VectorXd q =
      true_quantile(g, Eigen::Vector2d(0.3, 0.0), 5, 50000);
  // tilting along e1 moves the quantile along e1 and nowhere else
  CHECK(q[0] > 0.1);
  CHECK(std::abs(q[1]) < 0.05);
}

TEST_CASE("epsilon schedules decay strictly faster than the little-o targets") {
  for (int n : {100, 1000}) {
    CHECK(eps_target(EpsSchedule::exact, n) == 0.0);
    CHECK(eps_target(EpsSchedule::o_inv_n, n) ==
          doctest::Approx(std::pow(n, -1.5)));
    CHECK(eps_target(EpsSchedule::o_n_neg_3_2, n) ==
          doctest::Approx(std::pow(n, -2.0)));
    CHECK(eps_target(EpsSchedule::o_n_neg_2, n) ==
          doctest::Approx(std::pow(n, -2.5)));
  }
}

TEST_CASE("normality run produces PSD covariances and matches its seed") {
  ExperimentConfig cfg = small_gaussian_config();
  ExperimentReport r1 = run_normality(cfg);
  ExperimentReport r2 = run_normality(cfg);
  std::string j1 = dump_json(experiment_report_to_json(r1));
  std::string j2 = dump_json(experiment_report_to_json(r2));
  CHECK(j1 == j2);  // byte-identical given the seed
  for (const auto& p : r1.per_n) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.emp_cov);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    CHECK(p.failures == 0);
  }
}

TEST_CASE("thread split reproduces the single-worker stream") {
  ExperimentConfig cfg = small_gaussian_config();
  cfg.threads = 1;
  ExperimentReport single = run_normality(cfg);
  cfg.threads = 3;
  ExperimentReport split = run_normality(cfg);
  CHECK(dump_json(experiment_report_to_json(single)) ==
        dump_json(experiment_report_to_json(split)));
}

TEST_CASE("replications = 1 flags insufficient reps") {
  ExperimentConfig cfg = small_gaussian_config();
  cfg.replications = 1;
  ExperimentReport rep = run_normality(cfg);
  CHECK(rep.insufficient_reps);
}

TEST_CASE("certificates respect the configured schedule") {
  ExperimentConfig cfg = small_gaussian_config();
  cfg.schedule = EpsSchedule::o_inv_n;
  ExperimentReport rep = run_consistency(cfg);
  for (const auto& p : rep.per_n) {
    CHECK(p.max_certificate <= eps_target(EpsSchedule::o_inv_n, p.n) + 1e-15);
  }
}

TEST_CASE("bahadur remainder equals the rescaled error when the score is zero") {
  // a four-atom symmetric support sampled exhaustively: the empirical score at
  // the center vanishes whenever each atom appears equally often; instead use
  // the atomic population itself where beta_hat = 0 identically
  AtomicMeasure support = AtomicMeasure::uniform(
      {Eigen::Vector2d(1, 0), Eigen::Vector2d(-1, 0), Eigen::Vector2d(0, 1),
       Eigen::Vector2d(0, -1)});
  ObjectiveContext ctx(support, QuantileDirection(Eigen::Vector2d(0, 0)));
  Eigen::VectorXd b = beta_hat(ctx, Eigen::Vector2d(0, 0));
  CHECK(b.norm() < 1e-14);
  // remainder = ||sqrt(n)(alpha_hat - alpha_star) - 0||
}

TEST_CASE("consistency: single atom gives zero error at all n") {
  AtomicMeasure support({Eigen::Vector2d(2, -1)}, {1.0});
  ExperimentConfig cfg{Distribution::uniform_atoms(support)};
  cfg.ell = Eigen::Vector2d(0, 0);
  cfg.n_grid = {10, 20, 40};
  cfg.replications = 5;
  cfg.seed = 9;
  ExperimentReport rep = run_consistency(cfg);
  for (const auto& p : rep.per_n) CHECK(p.median_error == 0.0);
}

TEST_CASE("consistency medians decrease for a 3-D gaussian") {
  ExperimentConfig cfg{Distribution::gaussian(Eigen::Vector3d(0, 0, 0),
                                              Eigen::Matrix3d::Identity())};
  cfg.ell = Eigen::Vector3d(0, 0, 0);
  cfg.n_grid = {100, 400, 1600};
  cfg.replications = 20;
  cfg.seed = 1234;
  ExperimentReport rep = run_consistency(cfg);
  CHECK(rep.trend_ok);
  CHECK(rep.slope_consistency < -0.3);
}

TEST_CASE("collinear population: estimates approach the line median") {
  // atoms on the x-axis with a unique univariate median at 0
  AtomicMeasure support = AtomicMeasure::uniform(
      {Eigen::Vector2d(-2, 0), Eigen::Vector2d(0, 0), Eigen::Vector2d(2, 0)});
  ExperimentConfig cfg{Distribution::uniform_atoms(support)};
  cfg.ell = Eigen::Vector2d(0, 0);
  cfg.n_grid = {101, 401, 1601};
  cfg.replications = 20;
  cfg.seed = 31337;
  ExperimentReport rep = run_consistency(cfg);
  CHECK((rep.alpha_star - Eigen::Vector2d(0, 0)).norm() < 1e-9);
  CHECK(rep.per_n.back().median_error < rep.per_n.front().median_error + 1e-12);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg = small_gaussian_config();
  cfg.n_grid = {100, 100};
  CHECK_THROWS_AS(run_consistency(cfg), ConfigError);
  cfg = small_gaussian_config();
  cfg.replications = 0;
  CHECK_THROWS_AS(run_consistency(cfg), ConfigError);
  cfg = small_gaussian_config();
  cfg.ell = Eigen::Vector3d(0, 0, 0);
  CHECK_THROWS_AS(run_consistency(cfg), ConfigError);
}

TEST_CASE("distribution JSON parsing") {
  auto j = nlohmann::json::parse(R"({
    "distribution": {"kind": "truncated_kl", "s": 1.0, "dim": 20},
    "ell": [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0],
    "n_grid": [100, 400],
    "replications": 3,
    "seed": 77
  })");
  ExperimentConfig cfg = experiment_config_from_json(j);
  CHECK(cfg.dist.dim() == 20);
  CHECK(cfg.schedule == EpsSchedule::exact);
  CHECK(cfg.seed == 77);
}
