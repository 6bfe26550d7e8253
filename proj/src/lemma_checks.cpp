#include "latcover/lemma_checks.hpp"

#include <cmath>
#include <numbers>

#include "latcover/constants.hpp"
#include "latcover/density.hpp"
#include "latcover/error.hpp"
#include "latcover/lift.hpp"
#include "latcover/rng.hpp"
#include "latcover/robust.hpp"
#include "latcover/stats.hpp"

namespace latcover {

namespace {

// Points of B_R(0) by scanning the coefficient box from the dual norms.
std::size_t box_scan_count(const Lattice& lat, double R) {
  const int n = lat.dim();
  const Matrix& inv = lat.basis_inverse();
  std::vector<std::int64_t> bound(n);
  for (int i = 0; i < n; ++i) {
    bound[i] = static_cast<std::int64_t>(std::ceil(R * inv.row(i).norm())) + 1;
  }
  std::vector<std::int64_t> c(n);
  for (int i = 0; i < n; ++i) c[i] = -bound[i];
  std::size_t count = 0;
  while (true) {
    Vector v = Vector::Zero(n);
    for (int i = 0; i < n; ++i) v += static_cast<double>(c[i]) * lat.basis().col(i);
    if (within_closed_ball(v.squaredNorm(), R)) ++count;
    int i = 0;
    while (i < n && ++c[i] > bound[i]) {
      c[i] = -bound[i];
      ++i;
    }
    if (i == n) break;
  }
  return count;
}

Vector uniform_in_ball(Rng& rng, int d, double r) {
  Vector g(d);
  for (int i = 0; i < d; ++i) g[i] = rng.normal();
  return g.normalized() * (r * std::pow(rng.uniform(), 1.0 / d));
}

}  // namespace

IntMatrix random_unimodular(int d, std::uint64_t seed, int steps) {
  require(d >= 1, ErrorCode::InvalidArgument, "d must be >= 1");
  Rng rng = Rng::stream(seed, rng_tag::kLemmaChecks, 99);
  IntMatrix m(d, std::vector<std::int64_t>(d, 0));
  for (int i = 0; i < d; ++i) m[i][i] = 1;
  if (d == 1) return m;
  for (int s = 0; s < steps; ++s) {
    const auto i = static_cast<std::size_t>(rng.integer(0, d - 1));
    auto j = static_cast<std::size_t>(rng.integer(0, d - 2));
    if (j >= i) ++j;
    const std::int64_t f = rng.integer(-2, 2);
    for (int c = 0; c < d; ++c) m[i][c] += f * m[j][c];
    if (rng.uniform() < 0.25) {
      for (int c = 0; c < d; ++c) m[i][c] = -m[i][c];
    }
  }
  return m;
}

bool torus_grid_bijective(const IntMatrix& M, std::int64_t denominator) {
  const std::size_t d = M.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= static_cast<std::size_t>(denominator);
  IntMatrix X(d, std::vector<std::int64_t>(total));
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t rest = p;
    for (std::size_t i = 0; i < d; ++i) {
      X[i][p] = static_cast<std::int64_t>(rest % denominator);
      rest /= denominator;
    }
  }
  const IntMatrix Y = torus_map_apply_grid(M, X, denominator);
  std::vector<bool> seen(total, false);
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t key = 0;
    for (std::size_t i = d; i-- > 0;) key = key * denominator + static_cast<std::size_t>(Y[i][p]);
    if (seen[key]) return false;
    seen[key] = true;
  }
  return true;
}

LemmaCheck check_point_counts(const LemmaCheckOptions&) {
  LemmaCheck out{"point-counts", true, {}, ""};
  struct Case {
    const char* name;
    Lattice lat;
    double R;
  };
  Matrix hex(2, 2);
  hex << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
  const Case cases[] = {
      {"hex", Lattice::from_basis(hex), 4.0 / std::sqrt(3.0)},
      {"z2", Lattice::from_basis(Matrix::Identity(2, 2)), 2.0 * std::sqrt(2.0)},
      {"z1", Lattice::from_basis(Matrix::Identity(1, 1)), 2.0},
  };
  for (const auto& c : cases) {
    const std::size_t points = enumerate_lattice_points(c.lat, Vector::Zero(c.lat.dim()), c.R).size();
    const std::size_t scanned = box_scan_count(c.lat, c.R);
    const std::size_t family = enumerate_fundamental_parallelepipeds(c.lat, c.R).size();
    const double c_pt = constants::lift_constants(c.lat.dim()).c_pt;
    out.metrics.emplace_back(std::string(c.name) + ".points", static_cast<double>(points));
    out.metrics.emplace_back(std::string(c.name) + ".parallelepipeds", static_cast<double>(family));
    out.passed = out.passed && points == scanned && family >= 1 &&
                 static_cast<double>(family) <= c_pt;
  }
  return out;
}

LemmaCheck check_translation_mean(const LemmaCheckOptions& opts) {
  LemmaCheck out{"translation-mean", true, {}, ""};
  McOptions mc;
  mc.threads = opts.threads;
  struct Case {
    const char* name;
    ProductBody body;
    double delta;
  };
  const Case cases[] = {
      {"z2-ball-0.5", ProductBody::ball(2, 0.5), 1.0 - std::numbers::pi / 4.0},
      {"z1-interval-0.25", ProductBody::ball(1, 0.25), 0.5},
      {"z2-ball-covering", ProductBody::ball(2, std::sqrt(0.5) * (1.0 + 1e-9)), 0.0},
  };
  std::uint64_t stream = 0;
  for (const auto& c : cases) {
    const auto tm = random_translation_mean(c.body, opts.translation_trials,
                                            opts.translation_samples,
                                            derive_seed(opts.seed, rng_tag::kLemmaChecks, stream++),
                                            mc);
    const double target = c.delta * c.delta;
    // Analytic target, so the trial spread is the only error term.
    const bool ok = c.delta == 0.0 ? tm.mean == 0.0
                                   : std::abs(tm.mean - target) <= 3.0 * tm.std_error;
    out.metrics.emplace_back(std::string(c.name) + ".mean", tm.mean);
    out.metrics.emplace_back(std::string(c.name) + ".target", target);
    out.metrics.emplace_back(std::string(c.name) + ".std_error", tm.std_error);
    out.passed = out.passed && ok;
  }
  return out;
}

LemmaCheck check_torus_maps(const LemmaCheckOptions& opts) {
  LemmaCheck out{"torus-maps", true, {}, ""};
  const IntMatrix shear = {{1, 1}, {0, 1}};
  const IntMatrix random3 = random_unimodular(3, opts.seed);
  const bool b2 = torus_grid_bijective(shear, 64);
  const bool b3 = torus_grid_bijective(random3, 64);
  out.metrics.emplace_back("shear.bijective", b2 ? 1.0 : 0.0);
  out.metrics.emplace_back("random3.bijective", b3 ? 1.0 : 0.0);
  out.passed = b2 && b3;

  constexpr int kBins = 8;
  double min_p = 1.0;
  std::uint64_t stream = 10;
  for (const IntMatrix* M : {&shear, &random3}) {
    const int d = static_cast<int>(M->size());
    Rng rng = Rng::stream(opts.seed, rng_tag::kLemmaChecks, stream++);
    Matrix X(d, static_cast<Eigen::Index>(opts.chi_square_samples));
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
      for (int i = 0; i < d; ++i) X(i, c) = rng.uniform();
    }
    const Matrix Y = torus_map_apply(*M, X);
    for (int a = 0; a < d; ++a) {
      for (int b = a + 1; b < d; ++b) {
        std::vector<std::uint64_t> counts(kBins * kBins, 0);
        for (Eigen::Index c = 0; c < Y.cols(); ++c) {
          const int u = std::min(kBins - 1, static_cast<int>(Y(a, c) * kBins));
          const int v = std::min(kBins - 1, static_cast<int>(Y(b, c) * kBins));
          ++counts[u * kBins + v];
        }
        min_p = std::min(min_p, chi_square_uniform(counts).p_value);
      }
    }
  }
  out.metrics.emplace_back("chi_square.min_p", min_p);
  out.passed = out.passed && min_p > 1e-3;
  return out;
}

LemmaCheck check_product_containment(const LemmaCheckOptions& opts) {
  LemmaCheck out{"product-containment", true, {}, ""};
  const auto pv = constants::product_volume(4, 1, 2);
  const double expect = 4.0 * std::numbers::pi * std::numbers::pi;
  out.metrics.emplace_back("volume", pv.volume);
  out.metrics.emplace_back("volume.expected", expect);
  std::uint64_t outside = 0;
  Rng rng = Rng::stream(opts.seed, rng_tag::kLemmaChecks, 20);
  const double r = std::sqrt(2.0);
  for (std::uint64_t s = 0; s < opts.containment_samples; ++s) {
    const Vector a = uniform_in_ball(rng, 2, r);
    const Vector b = uniform_in_ball(rng, 2, r);
    if (!within_closed_ball(a.squaredNorm() + b.squaredNorm(), 2.0)) ++outside;
  }
  out.metrics.emplace_back("outside", static_cast<double>(outside));
  out.passed = std::abs(pv.volume - expect) <= 1e-12 * expect && outside == 0;
  return out;
}

std::vector<LemmaCheck> run_lemma_checks(const LemmaCheckOptions& opts) {
  return {check_point_counts(opts), check_translation_mean(opts), check_torus_maps(opts),
          check_product_containment(opts)};
}

}  // namespace latcover
