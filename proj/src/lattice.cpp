#include "latcover/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "latcover/constants.hpp"
#include "latcover/error.hpp"
#include "latcover/parallel.hpp"
#include "latcover/simd/kernels.hpp"

namespace latcover {

namespace {

constexpr double kSnapTol = 1e-10;

double sq_distance(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s = s + d * d;
  }
  return s;
}

// Fincke-Pohst recursion on the coefficients from the last one down. Visits
// every c with |B c - t|^2 <= bound_sq and hands it to `emit`.
template <class Emit>
class Enumerator {
 public:
  Enumerator(const Lattice& lat, const Vector& target, double bound_sq, std::size_t cap, Emit emit)
      : gso_(lat.gso()), y_(lat.coefficients(target)), bound_sq_(bound_sq), cap_(cap),
        coeffs_(lat.dim(), 0), emit_(emit) {}

  void run() {
    if (bound_sq_ < 0.0) return;
    descend(static_cast<int>(coeffs_.size()) - 1, 0.0);
  }

 private:
  void descend(int j, double acc) {
    double centre = y_[j];
    for (int i = j + 1; i < static_cast<int>(coeffs_.size()); ++i) {
      centre -= gso_.mu(i, j) * (static_cast<double>(coeffs_[i]) - y_[i]);
    }
    const double rem = bound_sq_ - acc;
    if (rem < 0.0) return;
    const double w = std::sqrt(rem / gso_.bstar_sq[j]);
    const double lo_d = std::ceil(centre - w);
    const double hi_d = std::floor(centre + w);
    if (hi_d < lo_d) return;
    if (hi_d - lo_d + 1.0 > static_cast<double>(cap_)) budget();
    const auto lo = static_cast<std::int64_t>(lo_d);
    const auto hi = static_cast<std::int64_t>(hi_d);
    for (std::int64_t v = lo; v <= hi; ++v) {
      if (++visited_ > cap_) budget();
      const double t = static_cast<double>(v) - centre;
      const double next = acc + gso_.bstar_sq[j] * t * t;
      if (next > bound_sq_) continue;
      coeffs_[j] = v;
      if (j == 0) {
        emit_(coeffs_);
      } else {
        descend(j - 1, next);
      }
    }
    coeffs_[j] = 0;
  }

  [[noreturn]] void budget() const {
    fail(ErrorCode::EnumerationBudgetExceeded,
         "more than " + std::to_string(cap_) + " enumeration candidates");
  }

  const Gso& gso_;
  Vector y_;
  double bound_sq_;
  std::size_t cap_;
  std::size_t visited_ = 0;
  Coeffs coeffs_;
  Emit emit_;
};

template <class Emit>
void for_each_point(const Lattice& lat, const Vector& center, double radius,
                    const EnumOptions& opts, Emit emit) {
  const double padded = radius * (1.0 + 1e-8) + 1e-10;
  Enumerator<Emit> e(lat, center, padded * padded, opts.max_candidates, emit);
  e.run();
}

void check_target(const Lattice& lat, const Vector& v) {
  require(v.size() == lat.dim(), ErrorCode::DimensionMismatch,
          "vector of size " + std::to_string(v.size()) + " for a lattice of dimension " +
              std::to_string(lat.dim()));
  require(v.allFinite(), ErrorCode::InvalidArgument, "non-finite coordinates");
}

Coeffs babai(const Lattice& lat, const Vector& target) {
  const Gso& g = lat.gso();
  const Vector y = lat.coefficients(target);
  const int n = lat.dim();
  Coeffs c(n, 0);
  for (int j = n - 1; j >= 0; --j) {
    double centre = y[j];
    for (int i = j + 1; i < n; ++i) centre -= g.mu(i, j) * (static_cast<double>(c[i]) - y[i]);
    c[j] = static_cast<std::int64_t>(std::llround(centre));
  }
  return c;
}

}  // namespace

Gso gram_schmidt(const Matrix& basis) {
  const Eigen::Index n = basis.cols();
  Gso g;
  g.mu = Matrix::Zero(n, n);
  g.bstar_sq = Vector::Zero(n);
  Matrix bstar = basis;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      g.mu(i, j) = basis.col(i).dot(bstar.col(j)) / g.bstar_sq[j];
      bstar.col(i) -= g.mu(i, j) * bstar.col(j);
    }
    g.mu(i, i) = 1.0;
    g.bstar_sq[i] = bstar.col(i).squaredNorm();
  }
  return g;
}

Lattice Lattice::from_basis(const Matrix& basis, double rank_tol) {
  require(basis.rows() == basis.cols(), ErrorCode::DimensionMismatch,
          "basis must be square, got " + std::to_string(basis.rows()) + "x" +
              std::to_string(basis.cols()));
  require(basis.rows() >= 1, ErrorCode::DimensionMismatch, "empty basis");
  require(basis.allFinite(), ErrorCode::InvalidArgument, "basis has non-finite entries");

  double scale = 1.0;
  for (Eigen::Index j = 0; j < basis.cols(); ++j) scale *= basis.col(j).norm();
  const double det = std::abs(basis.fullPivLu().determinant());
  require(scale > 0.0 && det > rank_tol * scale, ErrorCode::SingularBasis,
          "|det| = " + std::to_string(det) + " is below tolerance");

  Gso g = gram_schmidt(basis);
  for (Eigen::Index j = 0; j < g.bstar_sq.size(); ++j) {
    require(g.bstar_sq[j] > 0.0, ErrorCode::SingularBasis, "degenerate orthogonalization");
  }
  return Lattice(basis, basis.inverse(), det, std::move(g));
}

Vector Lattice::point(const Coeffs& coeffs) const {
  require(static_cast<int>(coeffs.size()) == dim(), ErrorCode::DimensionMismatch,
          "coefficient vector has the wrong length");
  Vector c(dim());
  for (int i = 0; i < dim(); ++i) c[i] = static_cast<double>(coeffs[i]);
  return basis_ * c;
}

Vector Lattice::cell_center() const { return basis_ * Vector::Constant(dim(), 0.5); }

double Lattice::cell_circumradius() const {
  const int n = dim();
  if (n > 16) return 0.5 * cell_diameter_bound();
  const Vector centre = cell_center();
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Vector v = Vector::Zero(n);
    for (int j = 0; j < n; ++j) {
      if (mask & (1u << j)) v += basis_.col(j);
    }
    best = std::max(best, sq_distance(v, centre));
  }
  return std::sqrt(best);
}

double Lattice::cell_diameter_bound() const {
  double s = 0.0;
  for (int j = 0; j < dim(); ++j) s += basis_.col(j).norm();
  return s;
}

std::vector<LatticePoint> enumerate_lattice_points(const Lattice& lat, const Vector& center,
                                                   double radius, const EnumOptions& opts) {
  check_target(lat, center);
  require(std::isfinite(radius) && radius >= 0.0, ErrorCode::InvalidArgument,
          "radius must be finite and >= 0");
  std::vector<LatticePoint> out;
  for_each_point(lat, center, radius, opts, [&](const Coeffs& c) {
    Vector x = lat.point(c);
    if (within_closed_ball(sq_distance(x, center), radius)) out.push_back({c, std::move(x)});
  });
  std::sort(out.begin(), out.end(),
            [](const LatticePoint& a, const LatticePoint& b) { return a.coeffs < b.coeffs; });
  return out;
}

LatticePoint closest_lattice_point(const Lattice& lat, const Vector& target,
                                   const EnumOptions& opts) {
  check_target(lat, target);
  const Coeffs start = babai(lat, target);
  const double bound = std::sqrt(sq_distance(lat.point(start), target)) * (1.0 + 1e-9) + 1e-12;

  std::vector<LatticePoint> cands;
  std::vector<double> dists;
  for_each_point(lat, target, bound, opts, [&](const Coeffs& c) {
    Vector x = lat.point(c);
    dists.push_back(sq_distance(x, target));
    cands.push_back({c, std::move(x)});
  });
  double best = std::numeric_limits<double>::infinity();
  for (double d : dists) best = std::min(best, d);
  // Compare distances rather than squares for the relative tie window.
  const double limit = std::sqrt(best) * (1.0 + 1e-12);
  std::size_t pick = cands.size();
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (std::sqrt(dists[i]) > limit) continue;
    if (pick == cands.size() || cands[i].coeffs < cands[pick].coeffs) pick = i;
  }
  if (pick == cands.size()) {
    // Only reachable if the Babai point itself fell outside the padded bound.
    return {start, lat.point(start)};
  }
  return cands[pick];
}

double distance_to_lattice(const Lattice& lat, const Vector& target, const EnumOptions& opts) {
  const LatticePoint p = closest_lattice_point(lat, target, opts);
  return std::sqrt(sq_distance(p.coords, target));
}

std::vector<LatticePoint> points_near_cell(const Lattice& lat, double reach,
                                           const EnumOptions& opts) {
  const Vector centre = lat.cell_center();
  std::vector<LatticePoint> pts =
      enumerate_lattice_points(lat, centre, reach + lat.cell_circumradius(), opts);
  std::stable_sort(pts.begin(), pts.end(), [&](const LatticePoint& a, const LatticePoint& b) {
    return sq_distance(a.coords, centre) < sq_distance(b.coords, centre);
  });
  return pts;
}

Interval covering_radius(const Lattice& lat, double grid_h, const CoveringRadiusOptions& opts) {
  require(std::isfinite(grid_h) && grid_h > 0.0, ErrorCode::InvalidArgument,
          "grid spacing must be positive");
  const int n = lat.dim();
  require(n <= opts.max_dim, ErrorCode::InvalidArgument,
          "covering radius grid limited to dimension " + std::to_string(opts.max_dim));

  // Bounding box of the basis cell.
  Vector lo = Vector::Zero(n), hi = Vector::Zero(n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const double v = lat.basis()(k, j);
      (v < 0 ? lo[k] : hi[k]) += v;
    }
  }
  std::vector<std::size_t> steps(n);
  double total = 1.0;
  for (int k = 0; k < n; ++k) {
    steps[k] = static_cast<std::size_t>(std::max(1.0, std::ceil((hi[k] - lo[k]) / grid_h)));
    total *= static_cast<double>(steps[k]);
  }
  require(total <= static_cast<double>(opts.max_grid_points),
          ErrorCode::EnumerationBudgetExceeded,
          "covering radius grid needs " + std::to_string(total) + " points");
  const auto n_points = static_cast<std::size_t>(total);

  // Every grid point lies in the box; its nearest lattice point is within
  // the Babai bound of it.
  double babai_sq = 0.0;
  for (int j = 0; j < n; ++j) babai_sq += lat.gso().bstar_sq[j];
  const Vector box_centre = 0.5 * (lo + hi);
  const double reach = 0.5 * (hi - lo).norm() + 0.5 * std::sqrt(babai_sq);
  const auto pts = enumerate_lattice_points(lat, box_centre, reach);
  std::vector<double> centres;
  centres.reserve(pts.size() * n);
  for (const auto& p : pts) {
    for (int k = 0; k < n; ++k) centres.push_back(p.coords[k]);
  }

  constexpr std::size_t kChunk = 8192;
  const std::size_t n_chunks = (n_points + kChunk - 1) / kChunk;
  std::vector<double> chunk_max(n_chunks, 0.0);
  const auto& kern = simd::kernels();
  parallel_for(n_chunks, opts.threads, [&](std::size_t chunk) {
    const std::size_t begin = chunk * kChunk;
    const std::size_t count = std::min(kChunk, n_points - begin);
    std::vector<double> soa(count * n);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t idx = begin + i;
      for (int k = 0; k < n; ++k) {
        const std::size_t s = idx % steps[k];
        idx /= steps[k];
        soa[k * count + i] = lo[k] + (static_cast<double>(s) + 0.5) * grid_h;
      }
    }
    kern.min_sq_dist(simd::PointBatch{soa.data(), count, count, n}, centres.data(), pts.size(),
                     out.data());
    double m = 0.0;
    for (double v : out) m = std::max(m, v);
    chunk_max[chunk] = m;
  });
  double worst_sq = 0.0;
  for (double v : chunk_max) worst_sq = std::max(worst_sq, v);

  Interval result;
  result.lo = std::sqrt(worst_sq);
  result.hi = result.lo + grid_h * std::sqrt(static_cast<double>(n)) / 2.0;
  require(result.lo > 0.0 && result.hi / result.lo <= opts.max_ratio, ErrorCode::GridTooCoarse,
          "bracket [" + std::to_string(result.lo) + ", " + std::to_string(result.hi) +
              "] is too wide; use a finer grid");
  return result;
}

double covering_density(const Lattice& lat, double r) {
  require(std::isfinite(r) && r >= 0.0, ErrorCode::InvalidArgument, "radius must be >= 0");
  return constants::ball_volume(lat.dim(), r) / lat.det_abs();
}

Vector reduce_mod_lattice(const Lattice& lat, const Vector& x) {
  check_target(lat, x);
  Vector u = lat.coefficients(x);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double r = std::round(u[i]);
    u[i] = std::abs(u[i] - r) <= kSnapTol ? r : std::floor(u[i]);
  }
  return x - lat.basis() * u;
}

}  // namespace latcover
