#pragma once

// Robust lattice coverings: every closed ball of radius r contains a
// fundamental parallelepiped of the lattice.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "latcover/lattice.hpp"

namespace latcover {

struct Parallelepiped {
  Vector anchor;
  std::vector<Vector> gens;
  /// anchor + sum of gens over every subset; subset bits index the vertex.
  std::vector<Vector> vertices;
  /// Basis coefficients of the generators when built from a lattice.
  std::vector<Coeffs> gen_coeffs;

  static Parallelepiped make(const Vector& anchor, const std::vector<Vector>& gens);
};

/// Fundamental parallelepipeds with vertex 0 inside the closed ball B_R(0),
/// one per vertex set, in lexicographic order of their sorted coefficient
/// vertex lists.
std::vector<Parallelepiped> enumerate_fundamental_parallelepipeds(const Lattice& lat, double R,
                                                                  const EnumOptions& opts = {});

/// f(w): min over lattice points s with |w - s| <= r and P in the list at
/// radius 2r of the largest vertex distance from w to s + P. +inf when no
/// candidate exists.
double robust_deficit(const Lattice& lat, double r, const Vector& w, const EnumOptions& opts = {});

/// Deficit on many points at once. Candidate groups s + V(P) are cut down to
/// those that can reach value <= r somewhere in the region, so returned
/// values are exact where f <= r and otherwise some value > r (or +inf).
class DeficitEvaluator {
 public:
  DeficitEvaluator(const Lattice& lat, double r, const Vector& region_lo, const Vector& region_hi,
                   const EnumOptions& opts = {});

  int dim() const noexcept { return dim_; }
  double radius() const noexcept { return r_; }
  std::size_t group_count() const noexcept { return n_groups_; }
  int vertices_per_group() const noexcept { return n_vertices_; }

  /// Flattened vertex data of the groups useful inside the box [lo, hi].
  std::vector<double> groups_for(const Vector& lo, const Vector& hi) const;
  /// Same cut applied to an already reduced list.
  std::vector<double> filter_groups(const std::vector<double>& src, const Vector& lo,
                                    const Vector& hi) const;

  /// out[i] = deficit at SoA point i using the given group list.
  void evaluate(const std::vector<double>& groups, const double* soa, std::size_t count,
                double* out) const;

  double at(const Vector& w) const;

 private:
  int dim_;
  double r_;
  int n_vertices_;
  std::size_t n_groups_ = 0;
  std::vector<double> groups_;
};

enum class Verdict { Robust, NotRobust, Inconclusive };
std::string_view to_string(Verdict v) noexcept;

struct RobustnessCertificate {
  double radius = 0.0;
  double grid_h = 0.0;
  /// Largest deficit seen; the exact deficit at the witness when NotRobust.
  double worst_deficit = 0.0;
  /// Smallest r - f(c) - h_c sqrt(d) / 2 over the final cells c.
  double margin = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Vector> witness;
  std::size_t grid_points = 0;
  std::size_t refined_points = 0;
  std::size_t unresolved_cells = 0;
  double finest_h = 0.0;
};

struct CertifyOptions {
  unsigned threads = 0;
  int max_refine_depth = 24;
  std::size_t max_grid_points = 50'000'000;
  std::size_t max_refined_points = 20'000'000;
  EnumOptions enumeration{};
};

/// Grid certification over the basis cell. Cells whose value lies within
/// the Lipschitz slack of r are subdivided until they certify, exceed r, or
/// hit the depth/point budget.
RobustnessCertificate certify_robust(const Lattice& lat, double r, double grid_h,
                                     const CertifyOptions& opts = {});

/// Writes "w1,...,wd,f" rows for the base grid of certify_robust.
void dump_deficit_grid(const Lattice& lat, double r, double grid_h, std::ostream& out,
                       const CertifyOptions& opts = {});

struct MinRadiusOptions {
  CertifyOptions certify{};
  int max_steps = 200;
  /// Finest grid spacing tried before giving up on an undecided midpoint.
  double min_grid_h = 1e-6;
};

struct MinRadiusResult {
  Interval bracket;
  int steps = 0;
  int inconclusive_steps = 0;
  RobustnessCertificate hi_certificate;
};

/// Bisection on r; hi is certified Robust and lo is below the minimal radius.
MinRadiusResult min_robust_radius(const Lattice& lat, double tol,
                                  const MinRadiusOptions& opts = {});

struct RobustCovering {
  std::string name;
  Lattice lattice;
  double radius;
  double density;
};

/// "hex", or "cube(d)" / "cubeD" for (Z^d, sqrt d).
RobustCovering builtin_covering(const std::string& name);

struct SearchOptions {
  unsigned threads = 0;
  double tol = 1e-3;
  /// Points per side of the coarse screening grid.
  int screen_grid = 24;
};

struct SearchResult {
  Lattice lattice;
  double radius;
  double density;
  Interval bracket;
  int iters = 0;
  int screened_out = 0;
  int certified = 0;
  int improvements = 0;
  bool baseline = true;
};

/// Local search over det-1 planar lattices b1 = (1, 0), b2 = (x, y).
SearchResult search_robust_2d(std::uint64_t seed, int iters, const SearchOptions& opts = {});

}  // namespace latcover
