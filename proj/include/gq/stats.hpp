#pragma once

#include <cstdint>
#include <vector>

namespace gq {

// Standard normal quantile (Acklam's rational approximation, |err| < 1.2e-9).
double normal_quantile(double p);

// Standard normal CDF.
double normal_cdf(double x);

// Two-sided Kolmogorov-Smirnov statistic of a sample against N(0,1).
double ks_statistic_normal(std::vector<double> sample);

double median(std::vector<double> values);

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

// splitmix64; used to derive independent per-replication seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace gq
