#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gq/errors.hpp"

namespace gq {

enum class NormKind { euclidean, l1, linf };

NormKind parse_norm_kind(const std::string& s);
std::string norm_kind_name(NormKind kind);

double vector_norm(const Eigen::VectorXd& v, NormKind kind);

// Weighted point masses in R^d. Weights sum to one; duplicates are kept as-is
// because multiplicity matters for subgradient conditions at atoms.
class AtomicMeasure {
 public:
  AtomicMeasure(std::vector<Eigen::VectorXd> atoms, std::vector<double> weights);

  // Uniform weights 1/n.
  static AtomicMeasure uniform(std::vector<Eigen::VectorXd> atoms);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(atoms_.size()); }
  const std::vector<Eigen::VectorXd>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  const Eigen::VectorXd& atom(int i) const { return atoms_[i]; }
  double weight(int i) const { return weights_[i]; }

  Eigen::VectorXd weighted_mean() const;

 private:
  std::vector<Eigen::VectorXd> atoms_;
  std::vector<double> weights_;
  int dim_;
};

// Direction ell selecting the target quantile; the solver requires the strict
// bound ||ell||_2 < 1.
class QuantileDirection {
 public:
  explicit QuantileDirection(Eigen::VectorXd vector,
                             NormKind norm_kind = NormKind::euclidean);

  const Eigen::VectorXd& vector() const { return vector_; }
  NormKind norm_kind() const { return norm_kind_; }
  int dim() const { return static_cast<int>(vector_.size()); }
  double norm() const { return vector_norm(vector_, norm_kind_); }

 private:
  Eigen::VectorXd vector_;
  NormKind norm_kind_;
};

// CSV ingestion. Rows of comma-separated floats; an optional header whose last
// column is named "weight" marks a weight column (renormalized to sum 1).
AtomicMeasure load_measure_csv(const std::string& path);
AtomicMeasure parse_measure_csv(const std::string& text);
std::string measure_to_csv(const AtomicMeasure& mu);

struct LineWitness {
  Eigen::VectorXd point;
  Eigen::VectorXd direction;  // zero vector when the witness is a lone atom
  std::vector<int> atom_indices;
};

struct LineMassResult {
  double mass = 0.0;
  LineWitness witness;
};

// sup over affine lines L of mu(L). For atomic measures the sup is attained on
// a line through two support points (or a single atom), so pair enumeration
// with collinearity accumulation is exact. O(m^3) worst case.
LineMassResult line_mass_sup(const AtomicMeasure& mu);

}  // namespace gq
