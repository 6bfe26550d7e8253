#include "latcover/lift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "latcover/constants.hpp"
#include "latcover/error.hpp"
#include "latcover/rng.hpp"

namespace latcover {

namespace {

constexpr double kIntegralTol = 1e-6;

void check_robust(const RobustCovering& robust) {
  const int d = robust.lattice.dim();
  require(robust.density <= constants::nu(d) * (1.0 + 1e-12), ErrorCode::DensityOutOfRange,
          "robust density " + std::to_string(robust.density) + " exceeds nu_" +
              std::to_string(d));
}

Coeffs integral_coeffs(const Matrix& basis_inverse, const Vector& z) {
  const Vector mu = basis_inverse * z;
  Coeffs c(mu.size());
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    const double r = std::round(mu[j]);
    require(std::abs(mu[j] - r) <= kIntegralTol, ErrorCode::NotALatticePoint,
            "coefficient " + std::to_string(mu[j]) + " is not integral");
    c[j] = static_cast<std::int64_t>(r);
  }
  return c;
}

Vector combine(const Matrix& ys, const Coeffs& mu) {
  Vector out = Vector::Zero(ys.rows());
  for (std::size_t j = 0; j < mu.size(); ++j) out += static_cast<double>(mu[j]) * ys.col(j);
  return out;
}

void check_unimodular(const IntMatrix& M) {
  require(integer_determinant(M) == 1 || integer_determinant(M) == -1, ErrorCode::NotUnimodular,
          "|det M| must be 1");
}

double acceptance_threshold(int d, double delta, const LiftOptions& opts) {
  const double power = std::ldexp(1.0, d);
  if (opts.paper_constants) {
    const double log2_c = constants::lift_constants(d).log2_c_lift;
    return std::exp2(log2_c + power * std::log2(delta));
  }
  return opts.tau * std::pow(delta, power);
}

}  // namespace

Vector phi_map(const Matrix& robust_basis, const Matrix& ys, const Vector& z) {
  require(robust_basis.rows() == robust_basis.cols() && robust_basis.cols() == ys.cols() &&
              z.size() == robust_basis.rows(),
          ErrorCode::DimensionMismatch, "phi_map dimension mismatch");
  const Lattice lat = Lattice::from_basis(robust_basis);
  return combine(ys, integral_coeffs(lat.basis_inverse(), z));
}

Matrix torus_map_apply(const IntMatrix& M, const Matrix& X) {
  require(static_cast<Eigen::Index>(M.size()) == X.rows(), ErrorCode::DimensionMismatch,
          "M must be d x d for a d x n array");
  check_unimodular(M);
  const std::size_t d = M.size();
  Matrix out(X.rows(), X.cols());
  for (std::size_t i = 0; i < d; ++i) {
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += static_cast<double>(M[i][j]) * X(j, c);
      out(i, c) = s - std::floor(s);
    }
  }
  return out;
}

IntMatrix torus_map_apply_grid(const IntMatrix& M, const IntMatrix& X, std::int64_t denominator) {
  require(denominator >= 1, ErrorCode::InvalidArgument, "denominator must be >= 1");
  require(M.size() == X.size(), ErrorCode::DimensionMismatch, "M must be d x d for a d x n array");
  check_unimodular(M);
  const std::size_t d = M.size();
  const std::size_t n = d == 0 ? 0 : X[0].size();
  IntMatrix out(d, std::vector<std::int64_t>(n));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t c = 0; c < n; ++c) {
      std::int64_t s = 0;
      for (std::size_t j = 0; j < d; ++j) s += M[i][j] * X[j][c];
      out[i][c] = ((s % denominator) + denominator) % denominator;
    }
  }
  return out;
}

LiftedLattice lift_with_ys(const Lattice& base, const RobustCovering& robust, const Matrix& ys) {
  const int n = base.dim();
  const int d = robust.lattice.dim();
  require(ys.rows() == n && ys.cols() == d, ErrorCode::DimensionMismatch,
          "ys must be n x d");
  require((ys.array() >= 0.0).all() && (ys.array() < 1.0).all(), ErrorCode::InvalidArgument,
          "torus points must lie in [0,1)^n");
  Matrix b = Matrix::Zero(n + d, n + d);
  b.topLeftCorner(n, n) = base.basis();
  b.topRightCorner(n, d) = base.basis() * ys;
  b.bottomRightCorner(d, d) = robust.lattice.basis();
  return LiftedLattice{base, robust, ys, Lattice::from_basis(b)};
}

LiftedLattice random_lift(const Lattice& base, const RobustCovering& robust,
                          const ProductBody& body, std::uint64_t seed) {
  check_robust(robust);
  body.validate();
  require(body.ambient_dim() == base.dim(), ErrorCode::DimensionMismatch,
          "body and base lattice dimensions differ");
  const int n = base.dim();
  const int d = robust.lattice.dim();
  Rng rng = Rng::stream(seed, rng_tag::kLiftTranslations, 0);
  Matrix ys(n, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < n; ++i) ys(i, j) = rng.uniform();
  }
  return lift_with_ys(base, robust, ys);
}

ProductBody lifted_body(const ProductBody& body, const RobustCovering& robust) {
  body.validate();
  ProductBody out;
  for (const auto& b : body.blocks) out.blocks.push_back({b.dim, b.radius * body.scale});
  out.blocks.push_back({robust.lattice.dim(), robust.radius});
  const int n = body.ambient_dim();
  const int d = robust.lattice.dim();
  for (const auto& t : body.translates) {
    Vector padded = Vector::Zero(n + d);
    padded.head(n) = t;
    out.translates.push_back(std::move(padded));
  }
  return out;
}

std::vector<EventCheck> check_events(const LiftedLattice& lift, const ProductBody& body,
                                     double threshold, std::uint64_t samples, std::uint64_t seed,
                                     const McOptions& mc) {
  const auto family =
      enumerate_fundamental_parallelepipeds(lift.robust.lattice, 2.0 * lift.robust.radius);
  const int d = lift.robust.lattice.dim();
  std::vector<EventCheck> out;
  out.reserve(family.size());
  for (std::size_t e = 0; e < family.size(); ++e) {
    const auto& P = family[e];
    ProductBody kp = body;
    kp.translates.clear();
    for (const Vector& t : body.effective_translates()) {
      for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
        Coeffs mu(d, 0);
        for (int j = 0; j < d; ++j) {
          if (mask & (1u << j)) {
            for (int i = 0; i < d; ++i) mu[i] += P.gen_coeffs[j][i];
          }
        }
        kp.translates.push_back(t + lift.base.basis() * combine(lift.ys, mu));
      }
    }
    EventCheck ev;
    ev.generators = P.gen_coeffs;
    ev.estimate = estimate_uncovered_density(lift.base, kp, samples, derive_seed(seed, 0, e), mc);
    ev.passed = ev.estimate.ci95_upper <= threshold;
    out.push_back(std::move(ev));
  }
  return out;
}

LiftOutcome lift_until_good(const Lattice& base, const RobustCovering& robust,
                            const ProductBody& body, double delta, std::uint64_t seed,
                            int max_tries, const LiftOptions& opts) {
  require(max_tries >= 1, ErrorCode::MaxTriesExceeded, "max_tries must be >= 1");
  require(delta > 0.0 && delta < 1.0, ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
  require(opts.tau > 0.0, ErrorCode::InvalidArgument, "tau must be positive");
  check_robust(robust);
  const int d = robust.lattice.dim();
  const double threshold = acceptance_threshold(d, delta, opts);
  const ProductBody target = lifted_body(body, robust);

  std::optional<LiftOutcome> best;
  for (int t = 0; t < max_tries; ++t) {
    LiftOutcome cand{random_lift(base, robust, body,
                                 derive_seed(seed, rng_tag::kLiftTranslations, t)),
                     {}, t + 1, threshold, {}};
    cand.estimate = estimate_uncovered_density(
        cand.lift.lifted, target, opts.samples, derive_seed(seed, rng_tag::kLiftEstimate, t),
        opts.mc);
    bool ok = cand.estimate.ci95_upper <= threshold;
    if (ok && opts.per_event) {
      cand.events = check_events(cand.lift, body, threshold, opts.samples,
                                 derive_seed(seed, rng_tag::kLiftEstimate, 1000003 + t), opts.mc);
      ok = std::all_of(cand.events.begin(), cand.events.end(),
                       [](const EventCheck& e) { return e.passed; });
    }
    if (ok) return cand;
    if (!best || cand.estimate.estimate < best->estimate.estimate) best = std::move(cand);
  }
  std::ostringstream msg;
  msg << "no lift accepted in " << max_tries << " tries (threshold " << threshold
      << "); best estimate " << best->estimate.estimate << " with CI upper "
      << best->estimate.ci95_upper << " at try " << best->tries;
  fail(ErrorCode::MaxTriesExceeded, msg.str());
}

TranslationMean random_translation_mean(const ProductBody& body, int trials,
                                        std::uint64_t samples, std::uint64_t seed,
                                        const McOptions& mc) {
  require(trials >= 1, ErrorCode::InvalidArgument, "trials must be >= 1");
  body.validate();
  const int n = body.ambient_dim();
  const Lattice zn = Lattice::from_basis(Matrix::Identity(n, n));
  TranslationMean out;
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(seed, rng_tag::kTranslationTrial, 2 * static_cast<std::uint64_t>(t));
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.uniform();
    ProductBody k2 = body;
    k2.translates.clear();
    for (const Vector& v : body.effective_translates()) k2.translates.push_back(v);
    for (const Vector& v : body.effective_translates()) k2.translates.push_back(v + y);
    const auto est = estimate_uncovered_density(
        zn, k2, samples, derive_seed(seed, rng_tag::kTranslationTrial, 2 * t + 1), mc);
    out.trials.push_back(est.estimate);
  }
  for (double v : out.trials) out.mean += v;
  out.mean /= trials;
  if (trials > 1) {
    double ss = 0.0;
    for (double v : out.trials) ss += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(ss / (trials - 1)) / std::sqrt(static_cast<double>(trials));
  }
  return out;
}

ExpandedBody expand_body(const ProductBody& body, int n) {
  require(n >= 1, ErrorCode::InvalidArgument, "n must be >= 1");
  body.validate();
  ExpandedBody out{body, 1.0 / (std::pow(static_cast<double>(n), n) + 1.0)};
  out.body.scale *= 1.0 + 1.0 / n;
  return out;
}

Lattice dual_root_lattice(int m) {
  require(m >= 1, ErrorCode::InvalidArgument, "m must be >= 1");
  const Matrix gram =
      Matrix::Identity(m, m) - Matrix::Constant(m, m, 1.0 / (m + 1.0));
  const Matrix upper = gram.llt().matrixU();
  const double det = std::abs(upper.diagonal().prod());
  return Lattice::from_basis(upper / std::pow(det, 1.0 / m));
}

namespace {

// Ball radius whose uncovered density (fixed sample stream, so monotone in
// the radius) is closest to `target`.
double tune_radius(const Lattice& lat, double target, std::uint64_t samples, std::uint64_t seed,
                   const McOptions& mc) {
  double babai = 0.0;
  for (int j = 0; j < lat.dim(); ++j) babai += lat.gso().bstar_sq[j];
  double lo = 0.0, hi = 0.5 * std::sqrt(babai) * 1.01;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto est = estimate_uncovered_density(lat, ProductBody::ball(lat.dim(), mid), samples,
                                                seed, mc);
    (est.estimate > target ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

PipelineResult pipeline_run(const PipelineOptions& opts) {
  require(opts.d >= 1 && opts.k >= 0, ErrorCode::InvalidArgument, "need d >= 1 and k >= 0");
  const int m = opts.n - opts.k * opts.d;
  require(m >= 1, ErrorCode::InfeasibleDimensions,
          "n = " + std::to_string(opts.n) + " leaves no room for k d = " +
              std::to_string(opts.k * opts.d));
  const RobustCovering robust = builtin_covering(opts.robust);
  require(robust.lattice.dim() == opts.d, ErrorCode::InvalidArgument,
          "robust covering '" + opts.robust + "' has dimension " +
              std::to_string(robust.lattice.dim()) + ", not d = " + std::to_string(opts.d));
  check_robust(robust);

  const McOptions& mc = opts.lift.mc;
  std::string source;
  std::optional<Lattice> lat;
  ProductBody body;
  if (opts.initial) {
    lat = opts.initial->first;
    body = opts.initial->second;
    require(lat->dim() == m, ErrorCode::InfeasibleDimensions,
            "initial lattice has dimension " + std::to_string(lat->dim()) + ", expected " +
                std::to_string(m));
    body.validate();
    require(body.ambient_dim() == m, ErrorCode::DimensionMismatch,
            "initial body dimension differs from the initial lattice");
    source = "explicit";
  } else {
    require(opts.delta0_target > 0.0 && opts.delta0_target < 1.0, ErrorCode::InvalidArgument,
            "delta0 target must lie in (0, 1)");
    lat = dual_root_lattice(m);
    const double rho =
        tune_radius(*lat, opts.delta0_target, std::min<std::uint64_t>(opts.samples, 200'000),
                    derive_seed(opts.seed, rng_tag::kPipeline, 1u << 20), mc);
    body = ProductBody::ball(m, rho);
    std::ostringstream s;
    s << "A_" << m << "^* (det 1), ball radius tuned to delta0 " << opts.delta0_target;
    source = s.str();
  }

  PipelineResult res{.stages = {},
                     .initial_source = source,
                     .final_lattice = *lat,
                     .final_body = body,
                     .coverage_check = {},
                     .ball_lattice = *lat};
  const auto est0 = estimate_uncovered_density(*lat, body, opts.samples,
                                               derive_seed(opts.seed, rng_tag::kPipeline, 0), mc);
  require(est0.ci95_upper < 1.0, ErrorCode::InvalidArgument,
          "initial body leaves almost everything uncovered");
  res.stages.push_back({m, body, *lat, est0, est0.ci95_upper, 0});

  double target = est0.ci95_upper;
  for (int i = 1; i <= opts.k; ++i) {
    const LiftOutcome out =
        lift_until_good(*lat, robust, body, target,
                        derive_seed(opts.seed, rng_tag::kPipeline, i), opts.max_tries, opts.lift);
    body = lifted_body(body, robust);
    lat = out.lift.lifted;
    res.stages.push_back({lat->dim(), body, *lat, out.estimate, out.threshold, out.tries});
    target = std::min(out.threshold, 1.0 - 1e-12);
  }

  const ExpandedBody ex = expand_body(body, opts.n);
  res.final_lattice = *lat;
  res.final_body = ex.body;
  res.expansion_threshold = ex.threshold;
  res.expansion_hypothesis_met = res.stages.back().delta_estimate.ci95_upper <= ex.threshold;
  res.coverage_check =
      verify_covering_empirical(*lat, ex.body, opts.verify_samples,
                                derive_seed(opts.seed, rng_tag::kPipeline, opts.k + 1), mc);

  // T maps block j of the unexpanded body onto the ball of radius sqrt(dim_j),
  // so T K lies in B_{sqrt n} and (1 + 1/n) T K in the final ball.
  const int n = opts.n;
  Vector diag(n);
  int k = 0;
  for (const auto& b : body.blocks) {
    const double rho = b.radius * body.scale;
    require(rho > 0.0, ErrorCode::InvalidArgument, "zero-radius block");
    for (int e = 0; e < b.dim; ++e) diag[k++] = std::sqrt(static_cast<double>(b.dim)) / rho;
  }
  res.ball_lattice = Lattice::from_basis(diag.asDiagonal() * lat->basis());
  double shift = 0.0;
  for (const Vector& t : body.translates) {
    shift = std::max(shift, (diag.asDiagonal() * t).norm());
  }
  res.ball_radius = (1.0 + 1.0 / n) * (std::sqrt(static_cast<double>(n)) + shift);
  res.final_density = covering_density(res.ball_lattice, res.ball_radius);
  return res;
}

PipelineResult pipeline(const PipelineOptions& opts) {
  PipelineResult res = pipeline_run(opts);
  if (!res.coverage_check.all_covered) {
    std::ostringstream msg;
    msg << "uncovered point after expansion:";
    for (Eigen::Index i = 0; i < res.coverage_check.first_failure->size(); ++i) {
      msg << ' ' << (*res.coverage_check.first_failure)[i];
    }
    fail(ErrorCode::CoverageCheckFailed, msg.str());
  }
  return res;
}

}  // namespace latcover
