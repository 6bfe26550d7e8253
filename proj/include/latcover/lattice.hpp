#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace latcover {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Coeffs = std::vector<std::int64_t>;

/// Relative slack used for closed-ball membership (|p - c| <= R).
inline constexpr double kBoundaryRelTol = 1e-12;

inline bool within_closed_ball(double dist_sq, double radius) noexcept {
  const double r = radius * (1.0 + kBoundaryRelTol) + 1e-300;
  return dist_sq <= r * r;
}

struct EnumOptions {
  /// Cap on visited enumeration nodes before EnumerationBudgetExceeded.
  std::size_t max_candidates = 20'000'000;
};

/// Gram-Schmidt data of the basis columns, taken in order b_1..b_n.
struct Gso {
  Matrix mu;         // mu(i, j) = <b_i, b_j*> / |b_j*|^2 for i > j
  Vector bstar_sq;   // |b_j*|^2
};

struct LatticePoint {
  Coeffs coeffs;
  Vector coords;
};

/// Full-rank lattice in R^n given by the columns of `basis`. Immutable; the
/// basis is kept exactly as supplied.
class Lattice {
 public:
  static Lattice from_basis(const Matrix& basis, double rank_tol = 1e-10);

  int dim() const noexcept { return static_cast<int>(basis_.rows()); }
  const Matrix& basis() const noexcept { return basis_; }
  const Matrix& basis_inverse() const noexcept { return inverse_; }
  double det_abs() const noexcept { return det_abs_; }
  const Gso& gso() const noexcept { return gso_; }

  Vector point(const Coeffs& coeffs) const;
  /// Real coefficients of x in the basis.
  Vector coefficients(const Vector& x) const { return inverse_ * x; }
  /// Centre B * (1/2, ..., 1/2) of the basis cell.
  Vector cell_center() const;
  /// Largest distance from the cell centre to a cell vertex.
  double cell_circumradius() const;
  /// Sum of generator lengths; bounds the diameter of the basis cell.
  double cell_diameter_bound() const;

 private:
  Lattice(Matrix basis, Matrix inverse, double det_abs, Gso gso)
      : basis_(std::move(basis)), inverse_(std::move(inverse)), det_abs_(det_abs),
        gso_(std::move(gso)) {}

  Matrix basis_;
  Matrix inverse_;
  double det_abs_;
  Gso gso_;
};

Gso gram_schmidt(const Matrix& basis);

/// All lattice points in the closed ball B_radius(center), sorted
/// lexicographically by coefficients.
std::vector<LatticePoint> enumerate_lattice_points(const Lattice& lat, const Vector& center,
                                                   double radius, const EnumOptions& opts = {});

/// Nearest lattice point; ties (equal distance up to 1e-12 relative) go to
/// the lexicographically smallest coefficient vector.
LatticePoint closest_lattice_point(const Lattice& lat, const Vector& target,
                                   const EnumOptions& opts = {});

double distance_to_lattice(const Lattice& lat, const Vector& target,
                           const EnumOptions& opts = {});

struct CoveringRadiusOptions {
  int max_dim = 4;
  /// GridTooCoarse when hi / lo exceeds this.
  double max_ratio = 2.0;
  std::size_t max_grid_points = 200'000'000;
  unsigned threads = 0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  double width() const noexcept { return hi - lo; }
};

/// Bracket on the covering radius from a cell-centred grid of spacing grid_h
/// over the bounding box of the basis cell; hi = lo + grid_h * sqrt(n) / 2.
Interval covering_radius(const Lattice& lat, double grid_h, const CoveringRadiusOptions& opts = {});

/// vol(B_r^n) / |det|. Does not check that r actually covers.
double covering_density(const Lattice& lat, double r);

/// x - B floor(B^{-1} x): the representative with coefficients in [0, 1).
Vector reduce_mod_lattice(const Lattice& lat, const Vector& x);

/// Lattice points that can be nearest to, or within `reach` of, some point
/// of the basis cell. Sorted by distance to the cell centre.
std::vector<LatticePoint> points_near_cell(const Lattice& lat, double reach,
                                           const EnumOptions& opts = {});

}  // namespace latcover
