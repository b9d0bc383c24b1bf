#include "gq/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gq {

namespace {

constexpr double kWeightSumTol = 1e-12;
constexpr double kCollinearRelTol = 1e-9;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double* out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  try {
    size_t pos = 0;
    *out = std::stod(t, &pos);
    return pos == t.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

NormKind parse_norm_kind(const std::string& s) {
  if (s == "euclidean" || s == "l2") return NormKind::euclidean;
  if (s == "l1") return NormKind::l1;
  if (s == "linf") return NormKind::linf;
  throw ConfigError("unknown norm kind: " + s);
}

std::string norm_kind_name(NormKind kind) {
  switch (kind) {
    case NormKind::euclidean: return "euclidean";
    case NormKind::l1: return "l1";
    case NormKind::linf: return "linf";
  }
  return "?";
}

double vector_norm(const Eigen::VectorXd& v, NormKind kind) {
  switch (kind) {
    case NormKind::euclidean: return v.norm();
    case NormKind::l1: return v.lpNorm<1>();
    case NormKind::linf: return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

AtomicMeasure::AtomicMeasure(std::vector<Eigen::VectorXd> atoms,
                             std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty()) throw EmptyError("measure needs at least one atom");
  if (atoms_.size() != weights_.size())
    throw ValueError("atom/weight count mismatch");
  dim_ = static_cast<int>(atoms_[0].size());
  if (dim_ < 1) throw ValueError("atoms must have positive dimension");
  double sum = 0.0;
  for (size_t i = 0; i < atoms_.size(); ++i) {
    if (static_cast<int>(atoms_[i].size()) != dim_)
      throw ValueError("atom dimension mismatch");
    if (!atoms_[i].allFinite()) throw ValueError("non-finite atom coordinate");
    if (!std::isfinite(weights_[i]) || weights_[i] < 0.0)
      throw ValueError("weights must be finite and nonnegative");
    sum += weights_[i];
  }
  if (std::abs(sum - 1.0) > kWeightSumTol)
    throw ValueError("weights must sum to 1 within 1e-12");
}

AtomicMeasure AtomicMeasure::uniform(std::vector<Eigen::VectorXd> atoms) {
  if (atoms.empty()) throw EmptyError("measure needs at least one atom");
  std::vector<double> w(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
  // Uniform weights can miss the sum-1 tolerance after naive accumulation for
  // awkward n; rebalance the last weight.
  double sum = 0.0;
  for (size_t i = 0; i + 1 < w.size(); ++i) sum += w[i];
  w.back() = 1.0 - sum;
  return AtomicMeasure(std::move(atoms), std::move(w));
}

Eigen::VectorXd AtomicMeasure::weighted_mean() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(dim_);
  for (int i = 0; i < size(); ++i) m += weights_[i] * atoms_[i];
  return m;
}

QuantileDirection::QuantileDirection(Eigen::VectorXd vector, NormKind norm_kind)
    : vector_(std::move(vector)), norm_kind_(norm_kind) {
  if (!vector_.allFinite()) throw ValueError("quantile direction must be finite");
  if (vector_norm(vector_, norm_kind_) >= 1.0)
    throw InvalidDirection("quantile direction must satisfy ||ell|| < 1");
}

AtomicMeasure parse_measure_csv(const std::string& text) {
  std::vector<Eigen::VectorXd> atoms;
  std::vector<double> raw_weights;
  bool has_weight_col = false;
  bool header_checked = false;
  size_t ncols = 0;

  std::stringstream ss(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (!header_checked) {
      header_checked = true;
      double dummy;
      if (!parse_double(fields[0], &dummy)) {
        // header row; a trailing "weight" column marks per-atom weights
        has_weight_col = trim(fields.back()) == "weight";
        ncols = fields.size();
        continue;
      }
      ncols = fields.size();
    }
    if (fields.size() != ncols)
      throw FormatError("ragged CSV row at line " + std::to_string(lineno));
    size_t d = ncols - (has_weight_col ? 1 : 0);
    if (d < 1) throw FormatError("no coordinate columns");
    Eigen::VectorXd x(static_cast<int>(d));
    for (size_t j = 0; j < d; ++j) {
      double v;
      if (!parse_double(fields[j], &v))
        throw FormatError("bad number '" + fields[j] + "' at line " +
                          std::to_string(lineno));
      if (!std::isfinite(v))
        throw ValueError("non-finite value at line " + std::to_string(lineno));
      x[static_cast<int>(j)] = v;
    }
    if (has_weight_col) {
      double w;
      if (!parse_double(fields.back(), &w))
        throw FormatError("bad weight at line " + std::to_string(lineno));
      if (!std::isfinite(w)) throw ValueError("non-finite weight");
      if (w < 0.0) throw ValueError("negative weight");
      raw_weights.push_back(w);
    }
    atoms.push_back(std::move(x));
  }
  if (atoms.empty()) throw EmptyError("CSV contains no data rows");
  if (!has_weight_col) return AtomicMeasure::uniform(std::move(atoms));
  double sum = 0.0;
  for (double w : raw_weights) sum += w;
  if (sum <= 0.0) throw ValueError("weights sum to zero");
  for (double& w : raw_weights) w /= sum;
  double acc = 0.0;
  for (size_t i = 0; i + 1 < raw_weights.size(); ++i) acc += raw_weights[i];
  raw_weights.back() = 1.0 - acc;
  return AtomicMeasure(std::move(atoms), std::move(raw_weights));
}

AtomicMeasure load_measure_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_measure_csv(buf.str());
}

std::string measure_to_csv(const AtomicMeasure& mu) {
  std::ostringstream out;
  for (int j = 0; j < mu.dim(); ++j) out << "x" << j << ",";
  out << "weight\n";
  char num[64];
  for (int i = 0; i < mu.size(); ++i) {
    for (int j = 0; j < mu.dim(); ++j) {
      std::snprintf(num, sizeof num, "%.17g", mu.atom(i)[j]);
      out << num << ",";
    }
    std::snprintf(num, sizeof num, "%.17g", mu.weight(i));
    out << num << "\n";
  }
  return out.str();
}

LineMassResult line_mass_sup(const AtomicMeasure& mu) {
  const int m = mu.size();
  LineMassResult best;
  // single-atom baseline: collapse exactly coincident support points
  for (int i = 0; i < m; ++i) {
    double w = 0.0;
    std::vector<int> idx;
    for (int j = 0; j < m; ++j) {
      if (mu.atom(j) == mu.atom(i)) {
        w += mu.weight(j);
        idx.push_back(j);
      }
    }
    if (w > best.mass) {
      best.mass = w;
      best.witness = {mu.atom(i), Eigen::VectorXd::Zero(mu.dim()), idx};
    }
  }
  if (m == 1) {
    best.mass = 1.0;
    return best;
  }
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      Eigen::VectorXd dir = mu.atom(b) - mu.atom(a);
      double dn = dir.norm();
      if (dn == 0.0) continue;
      dir /= dn;
      double w = 0.0;
      std::vector<int> idx;
      for (int j = 0; j < m; ++j) {
        Eigen::VectorXd r = mu.atom(j) - mu.atom(a);
        Eigen::VectorXd perp = r - r.dot(dir) * dir;
        double scale = 1.0 + r.norm() + mu.atom(j).norm() + mu.atom(a).norm();
        if (perp.norm() <= kCollinearRelTol * scale) {
          w += mu.weight(j);
          idx.push_back(j);
        }
      }
      if (w > best.mass) {
        best.mass = w;
        best.witness = {mu.atom(a), dir, idx};
      }
    }
  }
  best.mass = std::min(best.mass, 1.0);
  return best;
}

}  // namespace gq
