#pragma once

#include <json.hpp>
#include <string>

#include "gq/inference.hpp"
#include "gq/montecarlo.hpp"
#include "gq/optimizer.hpp"
#include "gq/univariate.hpp"

namespace gq {

// Serializes with every floating-point number rendered at 17 significant
// digits, so reports round-trip bit-exactly and byte-compare across runs.
std::string dump_json(const nlohmann::json& j, int indent = 2);

nlohmann::json to_json(const Eigen::VectorXd& v);
nlohmann::json to_json(const Eigen::MatrixXd& m);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

nlohmann::json measure_to_json(const AtomicMeasure& mu);
AtomicMeasure measure_from_json(const nlohmann::json& j);

nlohmann::json solution_to_json(const QuantileSolution& sol);
nlohmann::json interval_to_json(const QuantileInterval& q);
nlohmann::json inference_to_json(const InferenceReport& rep);
nlohmann::json experiment_report_to_json(const ExperimentReport& rep);

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
Distribution distribution_from_json(const nlohmann::json& j);

}  // namespace gq
