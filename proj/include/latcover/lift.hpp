#pragma once

// Dimension lifting: an n-dimensional near-covering (Lambda, K) and a robust
// covering (Lambda_d, B_r^d) give the (n + d)-dimensional pair
// (Lambda~, K x B_r^d), where Lambda~ is spanned by (b_i, 0) and
// (B y_j, c_j) for random torus points y_j.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latcover/density.hpp"
#include "latcover/intmat.hpp"
#include "latcover/lattice.hpp"
#include "latcover/robust.hpp"

namespace latcover {

struct LiftedLattice {
  Lattice base;
  RobustCovering robust;
  /// n x d; column j is y_j in basis coefficients of `base`, in [0,1)^n.
  Matrix ys;
  Lattice lifted;
};

/// z = sum mu_j c_j (c_j the columns of robust_basis) maps to sum mu_j y_j.
/// Throws NotALatticePoint when some mu_j is not within 1e-6 of an integer.
Vector phi_map(const Matrix& robust_basis, const Matrix& ys, const Vector& z);

/// M X mod 1 for a unimodular integer M (d x d) and X (d x n).
Matrix torus_map_apply(const IntMatrix& M, const Matrix& X);

/// Exact variant on the grid (1/denominator) Z^{d x n}: entries of X are
/// numerators in [0, denominator).
IntMatrix torus_map_apply_grid(const IntMatrix& M, const IntMatrix& X, std::int64_t denominator);

/// Assembles the lifted lattice for given torus points (one column per
/// robust generator).
LiftedLattice lift_with_ys(const Lattice& base, const RobustCovering& robust, const Matrix& ys);

/// Draws y_1..y_d uniformly from the torus. Throws DensityOutOfRange when the
/// robust density exceeds nu_d.
LiftedLattice random_lift(const Lattice& base, const RobustCovering& robust,
                          const ProductBody& body, std::uint64_t seed);

/// K x B_r^d with the body's scale folded into its block radii.
ProductBody lifted_body(const ProductBody& body, const RobustCovering& robust);

struct LiftOptions {
  double tau = 3.0;
  /// Accept against C_lift(d) delta^{2^d} instead of tau delta^{2^d}.
  bool paper_constants = false;
  /// Also require rho(Lambda + K^P) <= threshold for every P.
  bool per_event = false;
  std::uint64_t samples = 1'000'000;
  McOptions mc{};
};

struct EventCheck {
  std::vector<Coeffs> generators;
  DensityEstimate estimate;
  bool passed = false;
};

struct LiftOutcome {
  LiftedLattice lift;
  DensityEstimate estimate;
  int tries = 0;
  double threshold = 0.0;
  std::vector<EventCheck> events;
};

LiftOutcome lift_until_good(const Lattice& base, const RobustCovering& robust,
                            const ProductBody& body, double delta, std::uint64_t seed,
                            int max_tries, const LiftOptions& opts = {});

/// Per-event bodies K^P = union over vertices x of P of (K + B phi(x)).
std::vector<EventCheck> check_events(const LiftedLattice& lift, const ProductBody& body,
                                     double threshold, std::uint64_t samples, std::uint64_t seed,
                                     const McOptions& mc = {});

struct TranslationMean {
  double mean = 0.0;
  /// Sample standard deviation of the per-trial estimates over sqrt(trials).
  double std_error = 0.0;
  std::vector<double> trials;
};

/// Mean over random y of the uncovered density of Z^n + (K union (K + y)).
TranslationMean random_translation_mean(const ProductBody& body, int trials,
                                        std::uint64_t samples, std::uint64_t seed,
                                        const McOptions& mc = {});

struct ExpandedBody {
  ProductBody body;
  /// 1 / (n^n + 1): uncovered density below this makes the dilate cover.
  double threshold;
};

ExpandedBody expand_body(const ProductBody& body, int n);

/// A_m^* with Gram matrix I - J/(m+1), scaled to determinant 1.
Lattice dual_root_lattice(int m);

struct PipelineStage {
  int dim;
  ProductBody body;
  Lattice lattice;
  DensityEstimate delta_estimate;
  double delta_target;
  int resamples;
};

struct PipelineOptions {
  int n = 0;
  int d = 0;
  int k = 0;
  std::string robust = "hex";
  /// Explicit starting pair; otherwise A_m^* with a ball tuned to delta0_target.
  std::optional<std::pair<Lattice, ProductBody>> initial;
  double delta0_target = 0.1;
  std::uint64_t samples = 1'000'000;
  std::uint64_t verify_samples = 100'000;
  std::uint64_t seed = 1;
  int max_tries = 20;
  LiftOptions lift{};
};

struct PipelineResult {
  std::vector<PipelineStage> stages;
  std::string initial_source;
  Lattice final_lattice;
  ProductBody final_body;
  double expansion_threshold = 0.0;
  bool expansion_hypothesis_met = false;
  CoverageCheck coverage_check;
  /// T Lambda_k, with T scaling block j by sqrt(dim_j) / radius_j.
  Lattice ball_lattice;
  double ball_radius = 0.0;
  double final_density = 0.0;
};

/// Runs every stage and reports the coverage check without throwing on it.
PipelineResult pipeline_run(const PipelineOptions& opts);

/// As pipeline_run, but throws CoverageCheckFailed when the final check
/// finds an uncovered point.
PipelineResult pipeline(const PipelineOptions& opts);

}  // namespace latcover
