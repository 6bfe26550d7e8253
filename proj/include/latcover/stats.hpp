#pragma once

#include <cstdint>
#include <vector>

namespace latcover {

inline constexpr double kZ95 = 1.959964;

struct BinomialInterval {
  double lower;
  double upper;
  double halfwidth;
};

/// Wilson score interval for `failures` out of `n`. With zero failures the
/// upper end is the one-sided rule-of-three bound 3/n and the lower end 0.
BinomialInterval wilson_interval(std::uint64_t failures, std::uint64_t n, double z = kZ95);

/// Upper tail P[X >= stat] of a chi-square distribution.
double chi_square_sf(double stat, double dof);

/// Pearson statistic and p-value of observed bin counts against a uniform
/// distribution over the bins.
struct ChiSquareResult {
  double statistic;
  double dof;
  double p_value;
};
ChiSquareResult chi_square_uniform(const std::vector<std::uint64_t>& counts);

/// Variance test: statistic (n-1) s^2 / sigma^2 with two-sided p-value.
ChiSquareResult chi_square_variance(const std::vector<double>& values, double sigma_sq);

}  // namespace latcover
