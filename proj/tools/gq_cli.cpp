#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "gq/json_io.hpp"
#include "gq/stats.hpp"
#include "gq/taylor.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using nlohmann::json;

Eigen::VectorXd parse_vector(const std::string& s) {
  Eigen::VectorXd v;
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      vals.push_back(std::stod(field));
    } catch (...) {
      throw gq::ConfigError("bad number in vector: " + field);
    }
  }
  if (vals.empty()) throw gq::ConfigError("empty vector");
  v.resize(static_cast<int>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
  return v;
}

void emit(const json& payload, const std::string& out_path) {
  std::string text = gq::dump_json(payload) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw gq::InputError("cannot write " + out_path);
    out << text;
  }
}

json envelope(const json& config_echo, const json& result,
              std::uint64_t seed = 0) {
  return json{{"version", kVersion},
              {"seed", seed},
              {"config", config_echo},
              {"result", result}};
}

int run(int argc, char** argv) {
  CLI::App app{"Geometric quantiles of atomic measures: estimation, "
               "inference and simulation"};
  app.require_subcommand(1);

  // estimate
  auto* est = app.add_subcommand("estimate", "Solve for an approximate quantile");
  std::string est_input, est_ell = "0", est_json;
  double est_tol = 1e-10;
  bool est_trace = false;
  est->add_option("--input", est_input, "input CSV")->required();
  est->add_option("--ell", est_ell, "quantile direction, comma separated");
  est->add_option("--tol", est_tol, "gradient tolerance");
  est->add_option("--json", est_json, "write JSON to this path");
  est->add_flag("--trace", est_trace, "record the iteration trace");

  // univariate
  auto* uni = app.add_subcommand("univariate", "Exact quantile interval on R");
  std::string uni_input, uni_json;
  double uni_ell = 0.0;
  uni->add_option("--input", uni_input, "input CSV")->required();
  uni->add_option("--ell", uni_ell, "scalar ell in (-1,1)");
  uni->add_option("--json", uni_json, "write JSON to this path");

  // infer
  auto* inf = app.add_subcommand("infer", "Plug-in sandwich inference");
  std::string inf_input, inf_ell = "0", inf_functional, inf_json;
  double inf_level = 0.95, inf_tol = 1e-10;
  inf->add_option("--input", inf_input, "input CSV")->required();
  inf->add_option("--ell", inf_ell, "quantile direction");
  inf->add_option("--level", inf_level, "confidence level");
  inf->add_option("--functional", inf_functional,
                  "direction f for a CI on <f, alpha>");
  inf->add_option("--tol", inf_tol, "solver gradient tolerance");
  inf->add_option("--json", inf_json, "write JSON to this path");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo replication engine");
  std::string sim_config, sim_out, sim_kind = "normality";
  int sim_threads = 0;
  sim->add_option("--config", sim_config, "experiment config JSON")->required();
  sim->add_option("--out", sim_out, "write report to this path");
  sim->add_option("--kind", sim_kind, "normality | bahadur | consistency");
  sim->add_option("--threads", sim_threads, "worker threads (overrides config)");

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "Affine-line mass diagnostic");
  std::string diag_input, diag_json;
  diag->add_option("--input", diag_input, "input CSV")->required();
  diag->add_option("--json", diag_json, "write JSON to this path");

  // taylor-sweep
  auto* tay = app.add_subcommand("taylor-sweep",
                                 "Sharpness sweep of the norm Taylor bounds");
  std::string tay_out;
  int tay_points = 200;
  tay->add_option("--out", tay_out, "write CSV to this path");
  tay->add_option("--points", tay_points, "points per sweep");

  // grid-oracle
  auto* grid = app.add_subcommand("grid-oracle", "Brute-force 2-D grid minimizer");
  std::string grid_input, grid_norm = "euclidean", grid_ell = "0,0",
              grid_box = "-2,-2,2,2", grid_json;
  int grid_res = 801;
  bool grid_points_flag = false;
  grid->add_option("--input", grid_input, "input CSV")->required();
  grid->add_option("--norm", grid_norm, "euclidean | l1 | linf");
  grid->add_option("--ell", grid_ell, "quantile direction");
  grid->add_option("--box", grid_box, "lo_x,lo_y,hi_x,hi_y");
  grid->add_option("--resolution", grid_res, "grid points per axis");
  grid->add_option("--json", grid_json, "write JSON to this path");
  grid->add_flag("--emit-points", grid_points_flag, "include argmin points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (est->parsed()) {
    gq::AtomicMeasure mu = gq::load_measure_csv(est_input);
    Eigen::VectorXd ell = parse_vector(est_ell);
    gq::ObjectiveContext ctx(std::move(mu), gq::QuantileDirection(ell));
    gq::SolverConfig cfg;
    cfg.grad_tol = est_tol;
    cfg.record_trace = est_trace;
    gq::QuantileSolution sol = gq::solve(ctx, cfg);
    json result = gq::solution_to_json(sol);
    result["phi"] = gq::phi(ctx, sol.alpha_hat);
    json echo{{"input", est_input}, {"ell", gq::to_json(ell)}, {"tol", est_tol}};
    emit(envelope(echo, result), est_json);
    std::cerr << "estimate: " << sol.iterations << " iterations, certified gap "
              << sol.epsilon_certified << "\n";
    return 0;
  }

  if (uni->parsed()) {
    gq::AtomicMeasure mu = gq::load_measure_csv(uni_input);
    gq::QuantileInterval q = gq::univariate_quantile(mu, uni_ell);
    json echo{{"input", uni_input}, {"ell", uni_ell}};
    emit(envelope(echo, gq::interval_to_json(q)), uni_json);
    std::cerr << "univariate: [" << q.lo << ", " << q.hi << "]\n";
    return 0;
  }

  if (inf->parsed()) {
    gq::AtomicMeasure mu = gq::load_measure_csv(inf_input);
    Eigen::VectorXd ell = parse_vector(inf_ell);
    gq::ObjectiveContext ctx(std::move(mu), gq::QuantileDirection(ell));
    gq::SolverConfig scfg;
    scfg.grad_tol = inf_tol;
    gq::QuantileSolution sol = gq::solve(ctx, scfg);
    // inference is centered at alpha_hat; the true parameter is unknown here
    gq::InferenceReport rep = gq::infer(ctx, sol.alpha_hat);
    json result = gq::inference_to_json(rep);
    result["alpha_hat"] = gq::to_json(sol.alpha_hat);
    result["epsilon_certified"] = sol.epsilon_certified;
    if (!inf_functional.empty()) {
      Eigen::VectorXd f = parse_vector(inf_functional);
      auto [lo, hi] = gq::confint_functional(rep, sol.alpha_hat, f,
                                             ctx.measure.size(), inf_level);
      result["confint"] = json{{"functional", gq::to_json(f)},
                               {"level", inf_level},
                               {"lo", lo},
                               {"hi", hi}};
    }
    json echo{{"input", inf_input},
              {"ell", gq::to_json(ell)},
              {"level", inf_level}};
    emit(envelope(echo, result), inf_json);
    std::cerr << "infer: kappa = " << rep.kappa << "\n";
    return 0;
  }

  if (sim->parsed()) {
    std::ifstream in(sim_config);
    if (!in) throw gq::InputError("cannot open config: " + sim_config);
    json jcfg = json::parse(in);
    gq::ExperimentConfig cfg = gq::experiment_config_from_json(jcfg);
    if (sim_threads > 0) {
      cfg.threads = sim_threads;
    } else if (const char* env = std::getenv("GQ_THREADS")) {
      cfg.threads = std::max(1, std::atoi(env));
    }
    gq::ExperimentReport rep;
    if (sim_kind == "normality") {
      rep = gq::run_normality(cfg);
    } else if (sim_kind == "bahadur") {
      rep = gq::run_bahadur(cfg);
    } else if (sim_kind == "consistency") {
      rep = gq::run_consistency(cfg);
    } else {
      throw gq::ConfigError("unknown experiment kind: " + sim_kind);
    }
    json echo = jcfg;
    echo["kind"] = sim_kind;
    emit(envelope(echo, gq::experiment_report_to_json(rep), cfg.seed), sim_out);
    std::cerr << "simulate: " << sim_kind << " over " << cfg.n_grid.size()
              << " sample sizes\n";
    return 0;
  }

  if (diag->parsed()) {
    gq::AtomicMeasure mu = gq::load_measure_csv(diag_input);
    gq::LineMassResult lm = gq::line_mass_sup(mu);
    json result{{"line_mass_sup", lm.mass},
                {"in_M_minus", lm.mass >= 1.0},
                {"witness_point", gq::to_json(lm.witness.point)},
                {"witness_direction", gq::to_json(lm.witness.direction)},
                {"witness_atoms", lm.witness.atom_indices}};
    json echo{{"input", diag_input}};
    emit(envelope(echo, result), diag_json);
    std::cerr << "diagnose: line mass sup = " << lm.mass << "\n";
    return 0;
  }

  if (tay->parsed()) {
    std::ostringstream csv;
    csv << "lambda,ratio_norm2,ratio_grad1\n";
    Eigen::VectorXd alpha = Eigen::VectorXd::Unit(1, 0);
    char buf[128];
    for (int i = 0; i < tay_points; ++i) {
      // collinear family h = lambda * alpha; both constants are attained as
      // lambda approaches -1 from below / at lambda = -2
      double lambda = -1.0 - 1e-6 - (2.0 - 1e-6) * i / (tay_points - 1);
      Eigen::VectorXd h = lambda * alpha;
      auto c2 = gq::norm_taylor2_check(alpha, h);
      auto c1 = gq::gradnorm_taylor1_check(alpha, h);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", lambda, c2.ratio,
                    c1.ratio);
      csv << buf;
    }
    if (tay_out.empty()) {
      std::cout << csv.str();
    } else {
      std::ofstream out(tay_out);
      if (!out) throw gq::InputError("cannot write " + tay_out);
      out << csv.str();
    }
    return 0;
  }

  if (grid->parsed()) {
    gq::AtomicMeasure mu = gq::load_measure_csv(grid_input);
    Eigen::VectorXd ell = parse_vector(grid_ell);
    Eigen::VectorXd box = parse_vector(grid_box);
    if (box.size() != 4) throw gq::ConfigError("box needs 4 numbers");
    gq::ObjectiveContext ctx(std::move(mu), gq::QuantileDirection(ell),
                             gq::parse_norm_kind(grid_norm));
    gq::GridMinimum gm = gq::grid_minimize_2d(
        ctx, Eigen::Vector2d(box[0], box[1]), Eigen::Vector2d(box[2], box[3]),
        grid_res);
    json result{{"min_value", gm.min_value},
                {"argmin_count", static_cast<int>(gm.argmin.size())}};
    if (grid_points_flag) {
      json pts = json::array();
      for (const auto& p : gm.argmin) pts.push_back(gq::to_json(p));
      result["argmin"] = std::move(pts);
    }
    json echo{{"input", grid_input},
              {"norm", grid_norm},
              {"ell", gq::to_json(ell)},
              {"resolution", grid_res}};
    emit(envelope(echo, result), grid_json);
    std::cerr << "grid-oracle: " << gm.argmin.size() << " argmin points\n";
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const gq::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const gq::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
