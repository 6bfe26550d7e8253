#include "latcover/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <regex>
#include <set>

#include "latcover/constants.hpp"
#include "latcover/error.hpp"
#include "latcover/intmat.hpp"
#include "latcover/parallel.hpp"
#include "latcover/rng.hpp"
#include "latcover/simd/kernels.hpp"

namespace latcover {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kWitnessSlack = 1e-12;

double sq_distance(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s = s + d * d;
  }
  return s;
}

void check_robust_dim(const Lattice& lat) {
  require(lat.dim() <= 3, ErrorCode::InvalidArgument,
          "robustness tools support dimension <= 3, got " + std::to_string(lat.dim()));
}

void check_radius(double r) {
  require(std::isfinite(r) && r > 0.0, ErrorCode::InvalidArgument, "radius must be positive");
}

Coeffs add(const Coeffs& a, const Coeffs& b) {
  Coeffs c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

// Axis-aligned box around the basis cell and a cell-centred grid over it.
struct CellGrid {
  Vector lo;
  Vector hi;
  std::vector<std::size_t> steps;
  double h = 0.0;
  std::size_t total = 0;

  CellGrid(const Lattice& lat, double grid_h, std::size_t max_points) : h(grid_h) {
    const int n = lat.dim();
    lo = Vector::Zero(n);
    hi = Vector::Zero(n);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double v = lat.basis()(k, j);
        (v < 0 ? lo[k] : hi[k]) += v;
      }
    }
    double t = 1.0;
    steps.resize(n);
    for (int k = 0; k < n; ++k) {
      steps[k] = static_cast<std::size_t>(std::max(1.0, std::ceil((hi[k] - lo[k]) / h)));
      t *= static_cast<double>(steps[k]);
    }
    require(t <= static_cast<double>(max_points), ErrorCode::EnumerationBudgetExceeded,
            "grid of spacing " + std::to_string(h) + " needs " + std::to_string(t) + " points");
    total = static_cast<std::size_t>(t);
  }

  double coord(int k, std::size_t i) const { return lo[k] + (static_cast<double>(i) + 0.5) * h; }
};

// Rectangular block of grid indices processed together with one group list.
struct Tile {
  std::vector<std::size_t> begin;
  std::vector<std::size_t> end;
};

std::vector<Tile> make_tiles(const CellGrid& g) {
  const int n = static_cast<int>(g.steps.size());
  const std::size_t side = n == 1 ? 4096 : n == 2 ? 48 : 12;
  std::vector<std::size_t> count(n);
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) {
    count[k] = (g.steps[k] + side - 1) / side;
    total *= count[k];
  }
  std::vector<Tile> tiles(total);
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t idx = t;
    tiles[t].begin.resize(n);
    tiles[t].end.resize(n);
    for (int k = 0; k < n; ++k) {
      const std::size_t c = idx % count[k];
      idx /= count[k];
      tiles[t].begin[k] = c * side;
      tiles[t].end[k] = std::min(g.steps[k], (c + 1) * side);
    }
  }
  return tiles;
}

using GroupList = std::shared_ptr<const std::vector<double>>;

struct Cell {
  Vector centre;
  double h;
  int depth;
  double value;
  GroupList groups;
};

struct TileOutcome {
  double max_value = -kInf;
  Vector argmax;
  double min_margin = kInf;
  std::size_t points = 0;
  std::vector<Cell> suspicious;
};

}  // namespace

Parallelepiped Parallelepiped::make(const Vector& anchor, const std::vector<Vector>& gens) {
  Parallelepiped p;
  p.anchor = anchor;
  p.gens = gens;
  const std::size_t nv = std::size_t{1} << gens.size();
  p.vertices.reserve(nv);
  for (std::size_t mask = 0; mask < nv; ++mask) {
    Vector v = anchor;
    for (std::size_t j = 0; j < gens.size(); ++j) {
      if (mask & (std::size_t{1} << j)) v += gens[j];
    }
    p.vertices.push_back(std::move(v));
  }
  return p;
}

std::vector<Parallelepiped> enumerate_fundamental_parallelepipeds(const Lattice& lat, double R,
                                                                  const EnumOptions& opts) {
  check_robust_dim(lat);
  require(std::isfinite(R) && R >= 0.0, ErrorCode::InvalidArgument, "R must be finite and >= 0");
  const int d = lat.dim();
  std::vector<LatticePoint> pts;
  for (auto& p : enumerate_lattice_points(lat, Vector::Zero(d), R, opts)) {
    if (std::any_of(p.coeffs.begin(), p.coeffs.end(), [](auto c) { return c != 0; })) {
      pts.push_back(std::move(p));
    }
  }

  struct Found {
    std::vector<Coeffs> key;
    std::vector<std::size_t> gens;
  };
  std::vector<Found> found;
  std::set<std::vector<Coeffs>> seen;
  std::size_t visited = 0;

  std::vector<std::size_t> chosen;
  std::vector<Coeffs> verts{Coeffs(d, 0)};
  auto inside = [&](const Coeffs& c) {
    return within_closed_ball(lat.point(c).squaredNorm(), R);
  };

  auto recurse = [&](auto&& self, std::size_t start) -> void {
    if (static_cast<int>(chosen.size()) == d) {
      IntMatrix m(d, std::vector<std::int64_t>(d));
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) m[i][j] = pts[chosen[j]].coeffs[i];
      }
      if (!is_unimodular(m)) return;
      std::vector<Coeffs> key = verts;
      std::sort(key.begin(), key.end());
      if (seen.insert(key).second) found.push_back({std::move(key), chosen});
      return;
    }
    for (std::size_t i = start; i < pts.size(); ++i) {
      if (++visited > opts.max_candidates) {
        fail(ErrorCode::EnumerationBudgetExceeded, "too many generator combinations");
      }
      const std::size_t before = verts.size();
      // Appending verts[v] + g keeps the list in subset-mask order.
      bool ok = true;
      for (std::size_t v = 0; v < before && ok; ++v) {
        Coeffs c = add(verts[v], pts[i].coeffs);
        ok = inside(c);
        if (ok) verts.push_back(std::move(c));
      }
      if (ok) {
        chosen.push_back(i);
        self(self, i + 1);
        chosen.pop_back();
      }
      verts.resize(before);
    }
  };
  recurse(recurse, 0);

  std::sort(found.begin(), found.end(),
            [](const Found& a, const Found& b) { return a.key < b.key; });
  std::vector<Parallelepiped> out;
  out.reserve(found.size());
  for (const auto& f : found) {
    std::vector<Vector> gens;
    std::vector<Coeffs> gc;
    for (auto idx : f.gens) {
      gens.push_back(pts[idx].coords);
      gc.push_back(pts[idx].coeffs);
    }
    Parallelepiped p = Parallelepiped::make(Vector::Zero(d), gens);
    p.gen_coeffs = std::move(gc);
    out.push_back(std::move(p));
  }
  return out;
}

double robust_deficit(const Lattice& lat, double r, const Vector& w, const EnumOptions& opts) {
  check_robust_dim(lat);
  check_radius(r);
  require(w.size() == lat.dim(), ErrorCode::DimensionMismatch, "point dimension mismatch");
  const auto family = enumerate_fundamental_parallelepipeds(lat, 2.0 * r, opts);
  const auto anchors = enumerate_lattice_points(lat, w, r, opts);
  double best = kInf;
  for (const auto& s : anchors) {
    const Vector rel = w - s.coords;
    for (const auto& p : family) {
      double m = 0.0;
      for (const auto& v : p.vertices) m = std::max(m, sq_distance(rel, v));
      best = std::min(best, m);
    }
  }
  return std::sqrt(best);
}

DeficitEvaluator::DeficitEvaluator(const Lattice& lat, double r, const Vector& region_lo,
                                   const Vector& region_hi, const EnumOptions& opts)
    : dim_(lat.dim()), r_(r), n_vertices_(1 << lat.dim()) {
  check_robust_dim(lat);
  check_radius(r);
  const Vector centre = 0.5 * (region_lo + region_hi);
  const double halfdiag = 0.5 * (region_hi - region_lo).norm();
  const auto family = enumerate_fundamental_parallelepipeds(lat, 2.0 * r, opts);
  const auto anchors = enumerate_lattice_points(lat, centre, r + halfdiag, opts);
  groups_.reserve(family.size() * anchors.size() * n_vertices_ * dim_);
  for (const auto& s : anchors) {
    for (const auto& p : family) {
      for (const auto& v : p.vertices) {
        for (int k = 0; k < dim_; ++k) groups_.push_back(s.coords[k] + v[k]);
      }
    }
  }
  n_groups_ = family.size() * anchors.size();
}

std::vector<double> DeficitEvaluator::groups_for(const Vector& lo, const Vector& hi) const {
  return filter_groups(groups_, lo, hi);
}

std::vector<double> DeficitEvaluator::filter_groups(const std::vector<double>& src,
                                                    const Vector& lo, const Vector& hi) const {
  const Vector c = 0.5 * (lo + hi);
  const double hd = 0.5 * (hi - lo).norm();
  const double reach = r_ * (1.0 + 1e-9) + 1e-12 + hd;
  const std::size_t stride = static_cast<std::size_t>(n_vertices_) * dim_;
  std::vector<double> out;
  for (std::size_t g = 0; g < src.size() / stride; ++g) {
    const double* grp = src.data() + g * stride;
    double far = 0.0;
    for (int v = 0; v < n_vertices_; ++v) {
      double s = 0.0;
      for (int k = 0; k < dim_; ++k) {
        const double d = c[k] - grp[v * dim_ + k];
        s += d * d;
      }
      far = std::max(far, s);
    }
    // The anchor is vertex 0, so far >= anchor distance: one test covers both.
    if (far <= reach * reach) out.insert(out.end(), grp, grp + stride);
  }
  return out;
}

void DeficitEvaluator::evaluate(const std::vector<double>& groups, const double* soa,
                                std::size_t count, double* out) const {
  const std::size_t stride = static_cast<std::size_t>(n_vertices_) * dim_;
  const double limit = r_ * (1.0 + kBoundaryRelTol);
  simd::kernels().min_max_vertex_sq_dist(simd::PointBatch{soa, count, count, dim_},
                                         groups.data(), groups.size() / stride, n_vertices_,
                                         limit * limit, out);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::sqrt(out[i]);
}

double DeficitEvaluator::at(const Vector& w) const {
  const auto groups = groups_for(w, w);
  double v = kInf;
  evaluate(groups, w.data(), 1, &v);
  return v;
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Robust: return "Robust";
    case Verdict::NotRobust: return "NotRobust";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

namespace {

// Evaluates every tile of the base grid. `visit` sees (tile index, soa,
// count, values) for callers that want the raw field.
template <class Visit>
std::vector<TileOutcome> sweep(const Lattice& lat, const DeficitEvaluator& eval,
                               const CellGrid& grid, double slack, const CertifyOptions& opts,
                               Visit visit) {
  const int n = lat.dim();
  const double r = eval.radius();
  const auto tiles = make_tiles(grid);
  std::vector<TileOutcome> outcomes(tiles.size());
  parallel_for(tiles.size(), opts.threads, [&](std::size_t t) {
    const Tile& tile = tiles[t];
    Vector lo(n), hi(n);
    std::size_t count = 1;
    std::vector<std::size_t> extent(n);
    for (int k = 0; k < n; ++k) {
      lo[k] = grid.lo[k] + static_cast<double>(tile.begin[k]) * grid.h;
      hi[k] = grid.lo[k] + static_cast<double>(tile.end[k]) * grid.h;
      extent[k] = tile.end[k] - tile.begin[k];
      count *= extent[k];
    }
    const auto groups = std::make_shared<const std::vector<double>>(eval.groups_for(lo, hi));
    std::vector<double> soa(count * n), vals(count);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t idx = i;
      for (int k = 0; k < n; ++k) {
        soa[k * count + i] = grid.coord(k, tile.begin[k] + idx % extent[k]);
        idx /= extent[k];
      }
    }
    eval.evaluate(*groups, soa.data(), count, vals.data());
    visit(t, soa, count, vals);

    TileOutcome& out = outcomes[t];
    out.points = count;
    for (std::size_t i = 0; i < count; ++i) {
      const double v = vals[i];
      if (v > out.max_value) {
        out.max_value = v;
        out.argmax = Vector(n);
        for (int k = 0; k < n; ++k) out.argmax[k] = soa[k * count + i];
      }
      if (v > r) continue;
      if (v > r - slack) {
        Vector c(n);
        for (int k = 0; k < n; ++k) c[k] = soa[k * count + i];
        out.suspicious.push_back({std::move(c), grid.h, 0, v, groups});
      } else {
        out.min_margin = std::min(out.min_margin, r - v - slack);
      }
    }
  });
  return outcomes;
}

}  // namespace

RobustnessCertificate certify_robust(const Lattice& lat, double r, double grid_h,
                                     const CertifyOptions& opts) {
  check_robust_dim(lat);
  check_radius(r);
  require(std::isfinite(grid_h) && grid_h > 0.0, ErrorCode::InvalidArgument,
          "grid spacing must be positive");
  const int n = lat.dim();
  const double root_d = std::sqrt(static_cast<double>(n));
  const CellGrid grid(lat, grid_h, opts.max_grid_points);
  const DeficitEvaluator eval(lat, r, grid.lo, grid.hi, opts.enumeration);

  auto outcomes = sweep(lat, eval, grid, grid_h * root_d / 2.0, opts,
                        [](std::size_t, const std::vector<double>&, std::size_t,
                           const std::vector<double>&) {});

  RobustnessCertificate cert;
  cert.radius = r;
  cert.grid_h = grid_h;
  cert.finest_h = grid_h;
  double max_value = -kInf;
  Vector argmax;
  double min_margin = kInf;
  std::vector<Cell> pending;
  for (auto& o : outcomes) {
    cert.grid_points += o.points;
    if (o.max_value > max_value) {
      max_value = o.max_value;
      argmax = o.argmax;
    }
    min_margin = std::min(min_margin, o.min_margin);
    for (auto& c : o.suspicious) pending.push_back(std::move(c));
  }

  // A grid value above r is exact up to rounding; confirm it with the
  // reference deficit before calling it a witness.
  auto confirm = [&](const Vector& w) -> std::optional<double> {
    const double f = robust_deficit(lat, r, w, opts.enumeration);
    if (f > r + kWitnessSlack) return f;
    return std::nullopt;
  };

  if (max_value > r) {
    if (auto f = confirm(argmax)) {
      cert.verdict = Verdict::NotRobust;
      cert.witness = argmax;
      cert.worst_deficit = *f;
      cert.margin = r - *f - grid_h * root_d / 2.0;
      return cert;
    }
  }

  // Adaptive refinement, one depth level at a time.
  const std::size_t n_children = std::size_t{1} << n;
  double unresolved_margin = kInf;
  while (!pending.empty()) {
    if (cert.refined_points + pending.size() * n_children > opts.max_refined_points) {
      for (const auto& c : pending) {
        unresolved_margin = std::min(unresolved_margin, r - c.value - c.h * root_d / 2.0);
      }
      cert.unresolved_cells += pending.size();
      break;
    }
    struct Result {
      std::vector<Cell> next;
      double max_value = -kInf;
      Vector argmax;
      double min_margin = kInf;
      double unresolved = kInf;
      std::size_t unresolved_count = 0;
    };
    std::vector<Result> results(pending.size());
    parallel_for(pending.size(), opts.threads, [&](std::size_t ci) {
      const Cell& cell = pending[ci];
      Result& res = results[ci];
      const double ch = cell.h / 2.0;
      const Vector half = Vector::Constant(n, cell.h / 2.0);
      const auto groups = std::make_shared<const std::vector<double>>(
          eval.filter_groups(*cell.groups, cell.centre - half, cell.centre + half));
      std::vector<double> soa(n_children * n), vals(n_children);
      for (std::size_t m = 0; m < n_children; ++m) {
        for (int k = 0; k < n; ++k) {
          const double off = (m >> k) & 1 ? 0.5 * ch : -0.5 * ch;
          soa[k * n_children + m] = cell.centre[k] + off;
        }
      }
      eval.evaluate(*groups, soa.data(), n_children, vals.data());
      const double slack = ch * root_d / 2.0;
      for (std::size_t m = 0; m < n_children; ++m) {
        const double v = vals[m];
        Vector c(n);
        for (int k = 0; k < n; ++k) c[k] = soa[k * n_children + m];
        if (v > res.max_value) {
          res.max_value = v;
          res.argmax = c;
        }
        if (v > r) continue;
        if (v <= r - slack) {
          res.min_margin = std::min(res.min_margin, r - v - slack);
        } else if (cell.depth + 1 >= opts.max_refine_depth) {
          res.unresolved = std::min(res.unresolved, r - v - slack);
          ++res.unresolved_count;
        } else {
          res.next.push_back({std::move(c), ch, cell.depth + 1, v, groups});
        }
      }
    });
    cert.refined_points += pending.size() * n_children;
    cert.finest_h = pending.front().h / 2.0;
    std::vector<Cell> next;
    double level_max = -kInf;
    Vector level_arg;
    for (auto& res : results) {
      if (res.max_value > level_max) {
        level_max = res.max_value;
        level_arg = res.argmax;
      }
      if (res.max_value > max_value) {
        max_value = res.max_value;
        argmax = res.argmax;
      }
      min_margin = std::min(min_margin, res.min_margin);
      unresolved_margin = std::min(unresolved_margin, res.unresolved);
      cert.unresolved_cells += res.unresolved_count;
      for (auto& c : res.next) next.push_back(std::move(c));
    }
    if (level_max > r) {
      if (auto f = confirm(level_arg)) {
        cert.verdict = Verdict::NotRobust;
        cert.witness = level_arg;
        cert.worst_deficit = *f;
        cert.margin = r - *f - cert.finest_h * root_d / 2.0;
        return cert;
      }
      // Deficit within rounding of r: cannot be decided on this grid.
      ++cert.unresolved_cells;
      unresolved_margin = std::min(unresolved_margin, r - level_max);
    }
    pending = std::move(next);
  }

  if (max_value > r && cert.unresolved_cells == 0) {
    ++cert.unresolved_cells;
    unresolved_margin = std::min(unresolved_margin, r - max_value);
  }
  cert.worst_deficit = max_value;
  if (cert.unresolved_cells == 0) {
    cert.verdict = Verdict::Robust;
    cert.margin = min_margin;
  } else {
    cert.verdict = Verdict::Inconclusive;
    cert.margin = std::min(min_margin, unresolved_margin);
  }
  return cert;
}

void dump_deficit_grid(const Lattice& lat, double r, double grid_h, std::ostream& out,
                       const CertifyOptions& opts) {
  check_robust_dim(lat);
  check_radius(r);
  const int n = lat.dim();
  const CellGrid grid(lat, grid_h, opts.max_grid_points);
  const DeficitEvaluator eval(lat, r, grid.lo, grid.hi, opts.enumeration);
  const auto tiles = make_tiles(grid);
  std::vector<std::string> text(tiles.size());
  sweep(lat, eval, grid, 0.0, opts,
        [&](std::size_t t, const std::vector<double>& soa, std::size_t count,
            const std::vector<double>& vals) {
          std::string s;
          char buf[64];
          for (std::size_t i = 0; i < count; ++i) {
            for (int k = 0; k < n; ++k) {
              std::snprintf(buf, sizeof buf, "%.17g,", soa[k * count + i]);
              s += buf;
            }
            std::snprintf(buf, sizeof buf, "%.17g\n", vals[i]);
            s += buf;
          }
          text[t] = std::move(s);
        });
  for (int k = 0; k < n; ++k) out << 'w' << (k + 1) << ',';
  out << "f\n";
  for (const auto& s : text) out << s;
}

MinRadiusResult min_robust_radius(const Lattice& lat, double tol, const MinRadiusOptions& opts) {
  check_robust_dim(lat);
  require(std::isfinite(tol) && tol > 0.0, ErrorCode::InvalidArgument, "tol must be positive");
  const int d = lat.dim();
  const double unit = std::pow(lat.det_abs(), 1.0 / d);

  MinRadiusResult res;
  // A ball of radius r holds no parallelepiped of volume above the inscribed
  // cube's (2r / sqrt d)^d.
  double lo = 0.5 * std::sqrt(static_cast<double>(d)) * unit * (1.0 - 1e-9);
  double hi = lat.cell_diameter_bound() * 1.05;
  auto step_h = [&](double width) {
    return std::clamp(width / 8.0, tol / 2.0, 0.05 * unit);
  };

  RobustnessCertificate hi_cert;
  for (;;) {
    hi_cert = certify_robust(lat, hi, step_h(hi - lo), opts.certify);
    ++res.steps;
    if (hi_cert.verdict == Verdict::Robust) break;
    lo = std::max(lo, hi);
    hi *= 2.0;
    require(res.steps < opts.max_steps, ErrorCode::BisectionStalled,
            "no robust radius found while bracketing");
  }

  double h = step_h(hi - lo);
  int stalls = 0;
  while (hi - lo > tol) {
    require(res.steps < opts.max_steps, ErrorCode::BisectionStalled,
            "bisection step budget exhausted at [" + std::to_string(lo) + ", " +
                std::to_string(hi) + "]");
    const double mid = 0.5 * (lo + hi);
    h = std::min(h, step_h(hi - lo));
    const RobustnessCertificate cert = certify_robust(lat, mid, h, opts.certify);
    ++res.steps;
    switch (cert.verdict) {
      case Verdict::Robust:
        hi = mid;
        hi_cert = cert;
        // The worst grid value is attained, so the minimal radius is at least it.
        lo = std::max(lo, cert.worst_deficit * (1.0 - 1e-12));
        stalls = 0;
        break;
      case Verdict::NotRobust:
        lo = std::max(mid, cert.worst_deficit * (1.0 - 1e-12));
        stalls = 0;
        break;
      case Verdict::Inconclusive:
        ++res.inconclusive_steps;
        h /= 4.0;
        require(++stalls <= 4 && h >= opts.min_grid_h, ErrorCode::BisectionStalled,
                "grid refinement budget exhausted at r = " + std::to_string(mid));
        break;
    }
  }
  res.bracket = Interval{lo, hi};
  res.hi_certificate = hi_cert;
  return res;
}

RobustCovering builtin_covering(const std::string& name) {
  if (name == "hex") {
    Matrix b(2, 2);
    b << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
    Lattice lat = Lattice::from_basis(b);
    const double r = 2.0 / std::sqrt(3.0);
    return {"hex", lat, r, constants::hex_robust_density()};
  }
  static const std::regex cube(R"(cube(?:\((\d+)\)|(\d+)))");
  std::smatch m;
  if (std::regex_match(name, m, cube)) {
    const std::string digits = m[1].matched ? m[1].str() : m[2].str();
    const int d = digits.size() <= 3 ? std::stoi(digits) : 0;
    require(d >= 1 && d <= 64, ErrorCode::InvalidArgument, "cube dimension out of range");
    Lattice lat = Lattice::from_basis(Matrix::Identity(d, d));
    return {"cube(" + std::to_string(d) + ")", lat, std::sqrt(static_cast<double>(d)),
            constants::nu(d)};
  }
  fail(ErrorCode::UnknownName, "unknown robust covering '" + name + "'");
}

namespace {

// Upper half-plane point tau = x + iy moved into x in [0, 1/2], |tau| >= 1.
// Lattices Z + tau Z related by these moves are similar.
std::pair<double, double> reduce_shape(double x, double y) {
  for (int it = 0; it < 100; ++it) {
    x -= std::round(x);
    const double n2 = x * x + y * y;
    if (n2 < 1.0 - 1e-15) {
      x = -x / n2;
      y = y / n2;
      continue;
    }
    break;
  }
  return {std::abs(x), y};
}

Lattice shape_lattice(double x, double y) {
  const double s = 1.0 / std::sqrt(y);
  Matrix b(2, 2);
  b << s, s * x, 0.0, s * y;
  return Lattice::from_basis(b);
}

}  // namespace

SearchResult search_robust_2d(std::uint64_t seed, int iters, const SearchOptions& opts) {
  require(iters >= 0, ErrorCode::InvalidArgument, "iters must be >= 0");
  const double hex_y = std::sqrt(3.0) / 2.0;
  Lattice best_lat = shape_lattice(0.5, hex_y);
  const double hex_r = 2.0 / std::sqrt(3.0) / std::sqrt(hex_y);
  SearchResult out{best_lat, hex_r, constants::hex_robust_density(), Interval{hex_r, hex_r}};
  double best_x = 0.5, best_y = hex_y;

  Rng rng = Rng::stream(seed, rng_tag::kSearch, 0);
  MinRadiusOptions mr;
  mr.certify.threads = opts.threads;
  for (int it = 0; it < iters; ++it) {
    ++out.iters;
    double x, y;
    if (rng.uniform() < 0.25) {
      x = rng.uniform(0.0, 0.5);
      y = rng.uniform(std::sqrt(1.0 - x * x), 2.0);
    } else {
      const double sigma = 0.15 * (1.0 - static_cast<double>(it) / iters) + 0.002;
      x = best_x + sigma * rng.normal();
      y = std::abs(best_y + sigma * rng.normal()) + 1e-3;
    }
    std::tie(x, y) = reduce_shape(x, y);
    const Lattice lat = shape_lattice(x, y);

    // Screening: a grid value above the incumbent radius rules the shape out.
    const double r_best = out.radius;
    const CellGrid grid(lat, lat.cell_diameter_bound() / opts.screen_grid, 1'000'000);
    const DeficitEvaluator eval(lat, r_best, grid.lo, grid.hi);
    double lb = 0.0;
    Vector arg;
    bool rejected = false;
    for (const auto& o : sweep(lat, eval, grid, 0.0, CertifyOptions{1},
                               [](std::size_t, const std::vector<double>&, std::size_t,
                                  const std::vector<double>&) {})) {
      if (o.max_value > lb) {
        lb = o.max_value;
        arg = o.argmax;
      }
    }
    rejected = lb > r_best;
    // Pattern search upwards from the best grid point.
    for (double step = grid.h; !rejected && step > 1e-7; step /= 2.0) {
      bool moved = true;
      while (moved && !rejected) {
        moved = false;
        for (int k = 0; k < 8; ++k) {
          const double ang = constants::kPi * k / 4.0;
          const Vector w = arg + step * Vector{{std::cos(ang), std::sin(ang)}};
          const double v = eval.at(w);
          if (v > lb) {
            lb = v;
            arg = w;
            moved = true;
            rejected = lb > r_best;
            if (rejected) break;
          }
        }
      }
    }
    if (rejected || lb >= r_best * (1.0 - 1e-4)) {
      ++out.screened_out;
      continue;
    }
    const MinRadiusResult cert = min_robust_radius(lat, opts.tol, mr);
    ++out.certified;
    const double density = covering_density(lat, cert.bracket.hi);
    if (density < out.density) {
      out.lattice = lat;
      out.radius = cert.bracket.hi;
      out.density = density;
      out.bracket = cert.bracket;
      out.baseline = false;
      ++out.improvements;
      best_x = x;
      best_y = y;
    }
  }
  return out;
}

}  // namespace latcover
