#include "latcover/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "latcover/error.hpp"

namespace latcover {

BinomialInterval wilson_interval(std::uint64_t failures, std::uint64_t n, double z) {
  require(n > 0, ErrorCode::InvalidArgument, "binomial interval needs n >= 1");
  require(failures <= n, ErrorCode::InvalidArgument, "more failures than trials");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(failures) / nn;
  if (failures == 0) return {0.0, 3.0 / nn, 3.0 / nn};
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  const double lo = std::max(0.0, centre - half);
  const double hi = std::min(1.0, centre + half);
  return {lo, hi, std::max(p - lo, hi - p)};
}

double chi_square_sf(double stat, double dof) {
  require(dof > 0.0, ErrorCode::InvalidArgument, "chi-square needs positive degrees of freedom");
  if (stat <= 0.0) return 1.0;
  boost::math::chi_squared_distribution<double> dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

ChiSquareResult chi_square_uniform(const std::vector<std::uint64_t>& counts) {
  require(counts.size() >= 2, ErrorCode::InvalidArgument, "need at least two bins");
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  require(total > 0.0, ErrorCode::InvalidArgument, "empty histogram");
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  const double dof = static_cast<double>(counts.size() - 1);
  return {stat, dof, chi_square_sf(stat, dof)};
}

ChiSquareResult chi_square_variance(const std::vector<double>& values, double sigma_sq) {
  require(values.size() >= 2 && sigma_sq > 0.0, ErrorCode::InvalidArgument,
          "variance test needs two values and positive reference variance");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double dof = static_cast<double>(values.size() - 1);
  const double stat = ss / sigma_sq;
  const double upper = chi_square_sf(stat, dof);
  return {stat, dof, std::min(1.0, 2.0 * std::min(upper, 1.0 - upper))};
}

}  // namespace latcover
