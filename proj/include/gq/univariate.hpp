#pragma once

#include "gq/measure.hpp"

namespace gq {

// The full set of geometric ell-quantiles of a measure on the real line,
// always a nonempty closed bounded interval [lo, hi].
struct QuantileInterval {
  double lo;
  double hi;
  bool unique;
};

// Exact interval via cumulative-weight scans over the sorted support with
// p = (1 + ell) / 2. Requires dim = 1 and ell in (-1, 1).
QuantileInterval univariate_quantile(const AtomicMeasure& mu, double ell);

bool univariate_uniqueness(const AtomicMeasure& mu, double ell);

}  // namespace gq
