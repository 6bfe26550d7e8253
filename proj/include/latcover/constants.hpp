#pragma once

// Closed-form constants and bound calculators for lattice sphere coverings
// built by iterated lifting with a robust low-dimensional covering.
// Logarithms are natural unless the name says log2.

#include <optional>
#include <string>
#include <vector>

namespace latcover::constants {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kE = 2.71828182845904523536;

/// Density 8*pi/(3*sqrt(3)) of the hexagonal robust covering at r = 2/sqrt(3).
double hex_robust_density();

/// Volume of the unit ball in R^n (log-gamma based).
double unit_ball_volume(int n);
double ball_volume(int n, double r);

/// nu_d = vol(B^d_{sqrt d}) = (pi d)^{d/2} / Gamma(d/2 + 1).
double nu(int d);

/// 1/2 log2(2 pi e): the exponent reached with the cube robust covering.
double alpha();
/// 1/2 log2(8 pi e / (3 sqrt 3)): the exponent reached with the hexagonal covering.
double beta();

struct ExponentReport {
  double alpha;
  double beta;
  double gamma;
  int d;
  double D;
};

/// gamma = alpha - (1/d) log2(nu_d / D) for a robust covering of R^d with
/// density D. Throws DensityOutOfRange when D > nu_d.
ExponentReport exponents(int d, double D);

struct RogersParams {
  int m;
  double eta;           // (m/4) ln(27/16) - 3 ln m
  double delta0_bound;  // C m^3 (16/27)^{m/4} with C = rogers_constant
  double rogers_constant = 1.0;
  bool constant_unknown = true;  // the true constant is not quantified
  bool eta_negative = false;
};

RogersParams rogers_initial_params(int m);

struct LiftConstants {
  int d;
  double c_pt;  // (4^d d^{d/2} + 1)^{d 2^d}; +inf when it overflows a double
  double c_lift;  // ((c_pt + 1) d)^{2^d - 1}
  double log2_c_pt;
  double log2_c_lift;
};

/// Parallelepiped-count and lifting constants. Requires 1 <= d <= 6.
LiftConstants lift_constants(int d);

/// Exact decimal expansions, available when 4^d d^{d/2} is an integer
/// (d = 1 or d even) and d <= 4.
struct ExactLiftConstants {
  std::string c_pt;
  std::string c_lift;
};
std::optional<ExactLiftConstants> exact_lift_constants(int d);

enum class ParamMode { Asymptotic, Manual };

struct ManualOverrides {
  std::optional<int> k;
  std::optional<double> eta;
  std::optional<double> delta0;
  std::optional<double> c_lift;
};

struct PipelineParams {
  int n = 0;
  int d = 0;
  int k = 0;
  int m = 0;  // n - k d
  ParamMode mode = ParamMode::Asymptotic;
  double D = 0.0;
  double eta = 0.0;
  bool eta_negative = false;
  double delta0_bound = 0.0;
  double c_lift = 0.0;
  double log2_c_lift = 0.0;
  /// delta_0..delta_k by delta_i = c_lift * delta_{i-1}^{2^d}.
  std::vector<double> delta_schedule;
  std::vector<double> log2_delta_schedule;
  /// 2 e eta (D/nu_d)^k (2 pi e)^{k d / 2}; absent when eta <= 0.
  std::optional<double> density_bound;
  /// Lower and upper ends of the asymptotic window for k.
  double k_window_lo = 0.0;
  double k_window_hi = 0.0;
  std::vector<std::string> overrides;
};

PipelineParams theorem2_params(int n, int d, double D, ParamMode mode,
                               const ManualOverrides& manual = {});

/// delta_k from delta_0 in closed form:
/// C^{-1/(2^d-1)} (C^{1/(2^d-1)} delta_0)^{2^{kd}}.
double delta_closed_form(double c, double delta0, int d, int k);

struct RobustLowerBounds {
  int n;
  double nu_over_2n;      // nu_n / 2^n
  double exponent_floor;  // alpha - 1
  /// Volume (2r/sqrt n)^n of the cube inscribed in B^n_r.
  double cube_volume(double r) const;
};

RobustLowerBounds robust_lower_bounds(int n);

struct ProductVolume {
  double volume;  // nu_{n-kd} nu_d^k
  double ratio;   // volume / nu_n
};

/// Volume of B^{n-kd}_{sqrt(n-kd)} x (B^d_{sqrt d})^k. Requires 1 <= kd < n.
ProductVolume product_volume(int n, int k, int d);

}  // namespace latcover::constants
