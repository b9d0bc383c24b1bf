#include "gq/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gq {

namespace {

// slack on cumulative-weight comparisons against p; positions with ties are
// merged so F is a function of position
constexpr double kCumTol = 1e-12;

struct SortedSupport {
  std::vector<double> pos;
  std::vector<double> w;
};

SortedSupport sorted_support(const AtomicMeasure& mu) {
  std::vector<std::pair<double, double>> pw(mu.size());
  for (int i = 0; i < mu.size(); ++i) pw[i] = {mu.atom(i)[0], mu.weight(i)};
  std::sort(pw.begin(), pw.end());
  SortedSupport s;
  for (auto& [p, w] : pw) {
    if (!s.pos.empty() && s.pos.back() == p) {
      s.w.back() += w;
    } else {
      s.pos.push_back(p);
      s.w.push_back(w);
    }
  }
  return s;
}

}  // namespace

QuantileInterval univariate_quantile(const AtomicMeasure& mu, double ell) {
  if (mu.dim() != 1) throw ValueError("univariate_quantile requires dim = 1");
  if (!(ell > -1.0 && ell < 1.0))
    throw InvalidDirection("ell must lie in (-1, 1)");
  const double p = (1.0 + ell) / 2.0;
  SortedSupport s = sorted_support(mu);
  const int k = static_cast<int>(s.pos.size());

  // lo: smallest alpha with F(alpha) >= p
  double lo = s.pos.back();
  double cum = 0.0;
  for (int i = 0; i < k; ++i) {
    cum += s.w[i];
    if (cum >= p - kCumTol) {
      lo = s.pos[i];
      break;
    }
  }
  // hi: largest alpha with P(X >= alpha) >= 1 - p
  double hi = s.pos.front();
  double tail = 0.0;
  for (int i = k - 1; i >= 0; --i) {
    tail += s.w[i];
    if (tail >= (1.0 - p) - kCumTol) {
      hi = s.pos[i];
      break;
    }
  }
  if (hi < lo) hi = lo;  // can only collide through the tolerance
  return {lo, hi, lo == hi};
}

bool univariate_uniqueness(const AtomicMeasure& mu, double ell) {
  QuantileInterval q = univariate_quantile(mu, ell);
  return q.unique;
}

}  // namespace gq
