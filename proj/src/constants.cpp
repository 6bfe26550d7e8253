#include "latcover/constants.hpp"

#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

#include "latcover/error.hpp"

namespace latcover::constants {

namespace {

double ipow(double base, long long exponent) {
  double result = 1.0;
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

void check_density(int d, double D) {
  require(d >= 1, ErrorCode::InvalidArgument, "d must be >= 1");
  require(std::isfinite(D) && D > 0.0, ErrorCode::InvalidArgument, "density must be positive");
  require(D <= nu(d) * (1.0 + 1e-12), ErrorCode::DensityOutOfRange,
          "D = " + std::to_string(D) + " exceeds nu_" + std::to_string(d) + " = " +
              std::to_string(nu(d)));
}

}  // namespace

double hex_robust_density() { return 8.0 * kPi / (3.0 * std::sqrt(3.0)); }

double unit_ball_volume(int n) {
  require(n >= 0, ErrorCode::InvalidArgument, "dimension must be >= 0");
  const double h = 0.5 * n;
  return std::exp(h * std::log(kPi) - std::lgamma(h + 1.0));
}

double ball_volume(int n, double r) {
  require(r >= 0.0, ErrorCode::InvalidArgument, "radius must be >= 0");
  if (n == 0) return 1.0;
  if (r == 0.0) return 0.0;
  const double h = 0.5 * n;
  return std::exp(h * std::log(kPi) + n * std::log(r) - std::lgamma(h + 1.0));
}

double nu(int d) {
  require(d >= 1, ErrorCode::InvalidArgument, "d must be >= 1");
  const double h = 0.5 * d;
  return std::exp(h * std::log(kPi * d) - std::lgamma(h + 1.0));
}

double alpha() { return 0.5 * std::log2(2.0 * kPi * kE); }

double beta() { return 0.5 * std::log2(8.0 * kPi * kE / (3.0 * std::sqrt(3.0))); }

ExponentReport exponents(int d, double D) {
  check_density(d, D);
  const double a = alpha();
  return ExponentReport{a, beta(), a - std::log2(nu(d) / D) / d, d, D};
}

RogersParams rogers_initial_params(int m) {
  require(m >= 1, ErrorCode::InvalidArgument, "m must be >= 1");
  RogersParams p;
  p.m = m;
  p.eta = 0.25 * m * std::log(27.0 / 16.0) - 3.0 * std::log(static_cast<double>(m));
  p.delta0_bound = p.rogers_constant * std::pow(static_cast<double>(m), 3.0) *
                   std::pow(16.0 / 27.0, 0.25 * m);
  p.eta_negative = p.eta < 0.0;
  return p;
}

LiftConstants lift_constants(int d) {
  require(d >= 1 && d <= 6, ErrorCode::InvalidArgument, "lift constants need 1 <= d <= 6");
  const double base = std::pow(4.0, d) * std::pow(static_cast<double>(d), 0.5 * d) + 1.0;
  const long long exp_pt = static_cast<long long>(d) << d;  // d * 2^d
  const long long exp_lift = (1LL << d) - 1;

  LiftConstants c{};
  c.d = d;
  c.log2_c_pt = exp_pt * std::log2(base);
  c.c_pt = c.log2_c_pt < 1023.0 ? ipow(base, exp_pt) : std::numeric_limits<double>::infinity();
  const double log2_pt_plus_one =
      std::isfinite(c.c_pt) ? std::log2(c.c_pt + 1.0) : c.log2_c_pt;  // +1 is below resolution
  c.log2_c_lift = exp_lift * (log2_pt_plus_one + std::log2(static_cast<double>(d)));
  c.c_lift = c.log2_c_lift < 1023.0 ? ipow((c.c_pt + 1.0) * d, exp_lift)
                                    : std::numeric_limits<double>::infinity();
  return c;
}

std::optional<ExactLiftConstants> exact_lift_constants(int d) {
  using boost::multiprecision::cpp_int;
  if (d != 1 && d != 2 && d != 4) return std::nullopt;
  // d^{d/2} is an integer for these d.
  cpp_int dd = 1;
  if (d == 1) {
    dd = 1;
  } else {
    dd = boost::multiprecision::pow(cpp_int(d), static_cast<unsigned>(d / 2));
  }
  const cpp_int base = boost::multiprecision::pow(cpp_int(4), static_cast<unsigned>(d)) * dd + 1;
  const cpp_int c_pt = boost::multiprecision::pow(base, static_cast<unsigned>(d << d));
  const cpp_int c_lift =
      boost::multiprecision::pow((c_pt + 1) * d, static_cast<unsigned>((1 << d) - 1));
  return ExactLiftConstants{c_pt.str(), c_lift.str()};
}

PipelineParams theorem2_params(int n, int d, double D, ParamMode mode,
                               const ManualOverrides& manual) {
  require(n >= 2, ErrorCode::InvalidArgument, "n must be >= 2");
  check_density(d, D);
  const bool any_override = manual.k || manual.eta || manual.delta0 || manual.c_lift;
  require(mode == ParamMode::Manual || !any_override, ErrorCode::InvalidArgument,
          "overrides are only accepted in manual mode");

  PipelineParams p;
  p.n = n;
  p.d = d;
  p.D = D;
  p.mode = mode;
  p.k_window_lo = std::log2(std::log(static_cast<double>(n))) / d + 4.0;
  p.k_window_hi = p.k_window_lo + 1.0;
  p.k = static_cast<int>(std::ceil(p.k_window_lo));
  if (manual.k) {
    require(*manual.k >= 0, ErrorCode::InvalidArgument, "k must be >= 0");
    p.k = *manual.k;
    p.overrides.push_back("k=" + std::to_string(p.k));
  }
  p.m = n - p.k * d;
  require(p.m >= 1, ErrorCode::InfeasibleDimensions,
          "n = " + std::to_string(n) + " must exceed k d = " + std::to_string(p.k * d));

  const RogersParams rogers = rogers_initial_params(p.m);
  p.eta = rogers.eta;
  if (manual.eta) {
    p.eta = *manual.eta;
    p.overrides.push_back("eta=" + std::to_string(p.eta));
  }
  p.eta_negative = p.eta <= 0.0;

  p.delta0_bound = rogers.delta0_bound;
  if (manual.delta0) {
    p.delta0_bound = *manual.delta0;
    p.overrides.push_back("delta0=" + std::to_string(p.delta0_bound));
  }

  if (manual.c_lift) {
    require(*manual.c_lift > 0.0, ErrorCode::InvalidArgument, "c_lift must be positive");
    p.c_lift = *manual.c_lift;
    p.log2_c_lift = std::log2(p.c_lift);
    p.overrides.push_back("c_lift=" + std::to_string(p.c_lift));
  } else {
    const LiftConstants lc = lift_constants(d);
    p.c_lift = lc.c_lift;
    p.log2_c_lift = lc.log2_c_lift;
  }

  const double power = std::ldexp(1.0, d);
  p.delta_schedule.push_back(p.delta0_bound);
  p.log2_delta_schedule.push_back(std::log2(p.delta0_bound));
  for (int i = 1; i <= p.k; ++i) {
    p.delta_schedule.push_back(p.c_lift * std::pow(p.delta_schedule.back(), power));
    p.log2_delta_schedule.push_back(p.log2_c_lift + power * p.log2_delta_schedule.back());
  }

  if (p.eta > 0.0) {
    p.density_bound = 2.0 * kE * p.eta * std::pow(D / nu(d), p.k) *
                      std::pow(2.0 * kPi * kE, 0.5 * p.k * d);
  }
  return p;
}

double delta_closed_form(double c, double delta0, int d, int k) {
  require(d >= 1 && k >= 0, ErrorCode::InvalidArgument, "need d >= 1 and k >= 0");
  const double e = std::ldexp(1.0, d) - 1.0;
  const double root = std::pow(c, 1.0 / e);
  return std::pow((root * delta0), std::ldexp(1.0, k * d)) / root;
}

double RobustLowerBounds::cube_volume(double r) const {
  return std::pow(2.0 * r / std::sqrt(static_cast<double>(n)), n);
}

RobustLowerBounds robust_lower_bounds(int n) {
  require(n >= 1, ErrorCode::InvalidArgument, "n must be >= 1");
  return RobustLowerBounds{n, nu(n) / std::ldexp(1.0, n), alpha() - 1.0};
}

ProductVolume product_volume(int n, int k, int d) {
  require(k >= 1 && d >= 1 && k * d >= 1 && k * d < n, ErrorCode::InfeasibleDimensions,
          "product volume needs 1 <= k d < n");
  const double v = nu(n - k * d) * std::pow(nu(d), k);
  return ProductVolume{v, v / nu(n)};
}

}  // namespace latcover::constants
