#include "gq/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace gq {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void dump_rec(const json& j, std::ostringstream& out, int indent, int depth) {
  const std::string pad(static_cast<size_t>(indent) * depth, ' ');
  const std::string pad1(static_cast<size_t>(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out << pad1 << json(it.key()).dump() << ": ";
        dump_rec(it.value(), out, indent, depth + 1);
        if (i + 1 < j.size()) out << ",";
        out << "\n";
      }
      out << pad << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        out << pad1;
        dump_rec(j[i], out, indent, depth + 1);
        if (i + 1 < j.size()) out << ",";
        out << "\n";
      }
      out << pad << "]";
      return;
    }
    case json::value_t::number_float:
      out << fmt_double(j.get<double>());
      return;
    default:
      out << j.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const json& j, int indent) {
  std::ostringstream out;
  dump_rec(j, out, indent, 0);
  return out.str();
}

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("expected a JSON array of numbers");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

json measure_to_json(const AtomicMeasure& mu) {
  json atoms = json::array();
  for (int i = 0; i < mu.size(); ++i) atoms.push_back(to_json(mu.atom(i)));
  return json{{"dim", mu.dim()},
              {"atoms", std::move(atoms)},
              {"weights", mu.weights()}};
}

AtomicMeasure measure_from_json(const json& j) {
  std::vector<Eigen::VectorXd> atoms;
  for (const auto& a : j.at("atoms")) atoms.push_back(vector_from_json(a));
  std::vector<double> weights = j.at("weights").get<std::vector<double>>();
  return AtomicMeasure(std::move(atoms), std::move(weights));
}

json solution_to_json(const QuantileSolution& sol) {
  json out{{"alpha_hat", to_json(sol.alpha_hat)},
           {"epsilon_certified", sol.epsilon_certified},
           {"subgrad_norm", sol.subgrad_norm},
           {"iterations", sol.iterations},
           {"at_atom", sol.at_atom},
           {"converged", sol.converged}};
  if (!sol.trace.empty()) {
    json trace = json::array();
    for (const auto& t : sol.trace)
      trace.push_back(json{{"iteration", t.iteration},
                           {"phi", t.phi_value},
                           {"subgrad_norm", t.subgrad_norm}});
    out["trace"] = std::move(trace);
  }
  return out;
}

json interval_to_json(const QuantileInterval& q) {
  return json{{"lo", q.lo}, {"hi", q.hi}, {"unique", q.unique}};
}

json inference_to_json(const InferenceReport& rep) {
  return json{{"H", to_json(rep.H)},
              {"V", to_json(rep.V)},
              {"Sigma", to_json(rep.Sigma)},
              {"kappa", rep.kappa},
              {"n_excluded", rep.n_excluded},
              {"moment1", rep.moment1},
              {"moment2", rep.moment2},
              {"pseudo_inverse", rep.pseudo_inverse}};
}

json experiment_report_to_json(const ExperimentReport& rep) {
  json per_n = json::array();
  for (const auto& p : rep.per_n) {
    per_n.push_back(json{{"n", p.n},
                         {"failures", p.failures},
                         {"empirical_covariance", to_json(p.emp_cov)},
                         {"rel_frobenius", p.rel_frobenius},
                         {"ks", to_json(p.ks)},
                         {"median_remainder", p.median_remainder},
                         {"median_error", p.median_error},
                         {"max_certificate", p.max_certificate}});
  }
  return json{{"kind", rep.kind},
              {"alpha_star", to_json(rep.alpha_star)},
              {"sigma_population", to_json(rep.sigma_pop)},
              {"per_n", std::move(per_n)},
              {"slope_remainder", rep.slope_remainder},
              {"slope_consistency", rep.slope_consistency},
              {"trend_ok", rep.trend_ok},
              {"trend_violations", rep.trend_violations},
              {"insufficient_reps", rep.insufficient_reps}};
}

Distribution distribution_from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  auto cov_from = [](const json& c, int d) -> Eigen::MatrixXd {
    if (c.is_number())
      return c.get<double>() * Eigen::MatrixXd::Identity(d, d);
    if (c.is_string()) {
      if (c.get<std::string>() == "identity")
        return Eigen::MatrixXd::Identity(d, d);
      throw ConfigError("unknown covariance spec");
    }
    if (c.is_array() && !c.empty() && c[0].is_number()) {
      Eigen::VectorXd diag = vector_from_json(c);
      if (diag.size() != d) throw ConfigError("diag covariance size mismatch");
      return diag.asDiagonal();
    }
    if (c.is_array()) {
      Eigen::MatrixXd m(d, d);
      if (static_cast<int>(c.size()) != d)
        throw ConfigError("covariance row count mismatch");
      for (int i = 0; i < d; ++i) {
        Eigen::VectorXd row = vector_from_json(c[i]);
        if (row.size() != d) throw ConfigError("covariance column mismatch");
        m.row(i) = row;
      }
      return m;
    }
    throw ConfigError("bad covariance spec");
  };
  if (kind == "gaussian") {
    Eigen::VectorXd mean = vector_from_json(j.at("mean"));
    Eigen::MatrixXd cov = cov_from(j.value("cov", json("identity")),
                                   static_cast<int>(mean.size()));
    return Distribution::gaussian(std::move(mean), std::move(cov));
  }
  if (kind == "mixture") {
    std::vector<Distribution::Component> comps;
    for (const auto& c : j.at("components")) {
      Eigen::VectorXd mean = vector_from_json(c.at("mean"));
      int d = static_cast<int>(mean.size());
      Eigen::MatrixXd cov = cov_from(c.value("cov", json("identity")), d);
      Eigen::LLT<Eigen::MatrixXd> llt(cov);
      if (llt.info() != Eigen::Success)
        throw ConfigError("mixture covariance not positive definite");
      comps.push_back({c.at("weight").get<double>(), std::move(mean),
                       Eigen::MatrixXd(llt.matrixL())});
    }
    return Distribution::mixture(std::move(comps));
  }
  if (kind == "uniform_atoms") {
    std::vector<Eigen::VectorXd> atoms;
    for (const auto& a : j.at("atoms")) atoms.push_back(vector_from_json(a));
    if (j.contains("weights")) {
      std::vector<double> w = j.at("weights").get<std::vector<double>>();
      double sum = 0.0;
      for (double x : w) sum += x;
      if (sum <= 0.0) throw ConfigError("weights sum to zero");
      for (double& x : w) x /= sum;
      double acc = 0.0;
      for (size_t i = 0; i + 1 < w.size(); ++i) acc += w[i];
      if (!w.empty()) w.back() = 1.0 - acc;
      return Distribution::uniform_atoms(
          AtomicMeasure(std::move(atoms), std::move(w)));
    }
    return Distribution::uniform_atoms(AtomicMeasure::uniform(std::move(atoms)));
  }
  if (kind == "truncated_kl") {
    return Distribution::truncated_kl(j.at("s").get<double>(),
                                      j.at("dim").get<int>());
  }
  throw ConfigError("unknown distribution kind: " + kind);
}

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig cfg{distribution_from_json(j.at("distribution"))};
  cfg.ell = vector_from_json(j.at("ell"));
  cfg.n_grid = j.at("n_grid").get<std::vector<int>>();
  cfg.replications = j.at("replications").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.schedule =
      parse_eps_schedule(j.value("epsilon_schedule", std::string("exact")));
  cfg.threads = j.value("threads", 1);
  cfg.population_atoms = j.value("population_atoms", 200000);
  return cfg;
}

}  // namespace gq
