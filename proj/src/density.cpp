#include "latcover/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "latcover/error.hpp"
#include "latcover/parallel.hpp"
#include "latcover/rng.hpp"
#include "latcover/simd/kernels.hpp"
#include "latcover/stats.hpp"

namespace latcover {

ProductBody ProductBody::ball(int dim, double radius) {
  ProductBody b;
  b.blocks.push_back({dim, radius});
  return b;
}

int ProductBody::ambient_dim() const {
  int n = 0;
  for (const auto& b : blocks) n += b.dim;
  return n;
}

double ProductBody::enclosing_radius() const {
  double s = 0.0;
  for (const auto& b : blocks) s += b.radius * b.radius;
  return scale * std::sqrt(s);
}

std::vector<Vector> ProductBody::effective_translates() const {
  if (!translates.empty()) return translates;
  return {Vector::Zero(ambient_dim())};
}

double ProductBody::block_limit_sq(std::size_t block) const {
  const double r = scale * blocks[block].radius * (1.0 + kBoundaryRelTol);
  return r * r;
}

void ProductBody::validate() const {
  require(!blocks.empty(), ErrorCode::InvalidArgument, "body needs at least one block");
  for (const auto& b : blocks) {
    require(b.dim >= 1, ErrorCode::InvalidArgument, "block dimension must be >= 1");
    require(std::isfinite(b.radius) && b.radius >= 0.0, ErrorCode::InvalidArgument,
            "block radius must be finite and >= 0");
  }
  require(std::isfinite(scale) && scale > 0.0, ErrorCode::InvalidArgument,
          "scale must be positive");
  for (const auto& t : translates) {
    require(t.size() == ambient_dim(), ErrorCode::DimensionMismatch,
            "translate dimension differs from the body dimension");
    require(t.allFinite(), ErrorCode::InvalidArgument, "non-finite translate");
  }
}

namespace {

void check_pair(const Lattice& lat, const ProductBody& body) {
  body.validate();
  require(body.ambient_dim() == lat.dim(), ErrorCode::DimensionMismatch,
          "body dimension " + std::to_string(body.ambient_dim()) + " vs lattice dimension " +
              std::to_string(lat.dim()));
}

bool in_product(const ProductBody& body, const Vector& y) {
  int k = 0;
  for (std::size_t b = 0; b < body.blocks.size(); ++b) {
    double s = 0.0;
    for (int e = k + body.blocks[b].dim; k < e; ++k) s = s + y[k] * y[k];
    if (!(s <= body.block_limit_sq(b))) return false;
  }
  return true;
}

std::uint64_t n_chunks(std::uint64_t samples, std::size_t chunk) {
  return (samples + chunk - 1) / chunk;
}

}  // namespace

bool body_membership(const Lattice& lat, const ProductBody& body, const Vector& x,
                     const EnumOptions& opts) {
  check_pair(lat, body);
  require(x.size() == lat.dim(), ErrorCode::DimensionMismatch, "point dimension mismatch");
  const double reach = body.enclosing_radius() * (1.0 + kBoundaryRelTol);
  for (const Vector& t : body.effective_translates()) {
    const Vector rel = x - t;
    for (const auto& p : enumerate_lattice_points(lat, rel, reach, opts)) {
      if (in_product(body, rel - p.coords)) return true;
    }
  }
  return false;
}

CoverageEvaluator::CoverageEvaluator(const Lattice& lat, const ProductBody& body, double slack,
                                     const EnumOptions& opts)
    : dim_(lat.dim()) {
  check_pair(lat, body);
  int end = 0;
  for (std::size_t b = 0; b < body.blocks.size(); ++b) {
    end += body.blocks[b].dim;
    block_end_.push_back(end);
    limit_sq_.push_back(body.block_limit_sq(b));
  }
  // p + t can cover a point x of the cell (or within `slack` of it) only if
  // |x - p - t| <= R, so p lies within R + circumradius + slack of the cell
  // centre shifted by -t.
  const Vector centre = lat.cell_center();
  const double reach =
      body.enclosing_radius() * (1.0 + 1e-9) + lat.cell_circumradius() + slack + 1e-12;
  struct Offset {
    double dist_sq;
    Vector v;
  };
  std::vector<Offset> all;
  for (const Vector& t : body.effective_translates()) {
    for (const auto& p : enumerate_lattice_points(lat, centre - t, reach, opts)) {
      Vector v = p.coords + t;
      all.push_back({(v - centre).squaredNorm(), std::move(v)});
    }
  }
  // Nearest offsets first so the kernel's early exit fires sooner.
  std::stable_sort(all.begin(), all.end(),
                   [](const Offset& a, const Offset& b) { return a.dist_sq < b.dist_sq; });
  offsets_.reserve(all.size() * dim_);
  for (const auto& o : all) {
    for (int k = 0; k < dim_; ++k) offsets_.push_back(o.v[k]);
  }
}

void CoverageEvaluator::covered(const double* soa, std::size_t count, std::uint8_t* out) const {
  const simd::BlockSpec spec{block_end_.data(), limit_sq_.data(),
                             static_cast<int>(block_end_.size())};
  simd::kernels().covered_mask(simd::PointBatch{soa, count, count, dim_}, spec, offsets_.data(),
                               offset_count(), out);
}

void sample_cell_chunk(const Lattice& lat, std::uint64_t seed, std::uint64_t chunk,
                       std::size_t count, std::vector<double>& soa) {
  const int n = lat.dim();
  const Matrix& B = lat.basis();
  Rng rng = Rng::stream(seed, rng_tag::kDensitySamples, chunk);
  soa.assign(count * n, 0.0);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < count; ++i) {
    for (int j = 0; j < n; ++j) u[j] = rng.uniform();
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s = s + B(k, j) * u[j];
      soa[k * count + i] = s;
    }
  }
}

DensityEstimate estimate_uncovered_density(const Lattice& lat, const ProductBody& body,
                                           std::uint64_t samples, std::uint64_t seed,
                                           const McOptions& opts) {
  require(samples >= 1, ErrorCode::InvalidArgument, "samples must be >= 1");
  require(opts.chunk >= 1, ErrorCode::InvalidArgument, "chunk must be >= 1");
  const CoverageEvaluator eval(lat, body, 0.0, opts.enumeration);
  const std::uint64_t chunks = n_chunks(samples, opts.chunk);
  std::vector<std::uint64_t> misses(chunks, 0);
  parallel_for(chunks, opts.threads, [&](std::size_t c) {
    const std::size_t count =
        static_cast<std::size_t>(std::min<std::uint64_t>(opts.chunk, samples - c * opts.chunk));
    std::vector<double> soa;
    std::vector<std::uint8_t> mask(count);
    sample_cell_chunk(lat, seed, c, count, soa);
    eval.covered(soa.data(), count, mask.data());
    std::uint64_t m = 0;
    for (auto v : mask) m += v ? 0 : 1;
    misses[c] = m;
  });
  std::uint64_t uncovered = 0;
  for (auto m : misses) uncovered += m;

  DensityEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.uncovered = uncovered;
  est.estimate = static_cast<double>(uncovered) / static_cast<double>(samples);
  const BinomialInterval ci = wilson_interval(uncovered, samples);
  est.ci95_lower = ci.lower;
  est.ci95_upper = ci.upper;
  est.ci95_halfwidth = ci.halfwidth;
  est.method = uncovered == 0 ? "cell-uniform/rule-of-three" : "cell-uniform/wilson";
  return est;
}

CoverageCheck verify_covering_empirical(const Lattice& lat, const ProductBody& body,
                                        std::uint64_t samples, std::uint64_t seed,
                                        const McOptions& opts) {
  require(samples >= 1, ErrorCode::InvalidArgument, "samples must be >= 1");
  const CoverageEvaluator eval(lat, body, 0.0, opts.enumeration);
  const int n = lat.dim();
  const std::uint64_t chunks = n_chunks(samples, opts.chunk);
  const unsigned wave = resolve_threads(opts.threads);
  CoverageCheck result;
  // Chunks run in waves; within a wave the lowest failing index wins, so the
  // witness does not depend on the thread count.
  for (std::uint64_t first = 0; first < chunks; first += wave) {
    const std::uint64_t last = std::min<std::uint64_t>(chunks, first + wave);
    std::vector<std::optional<std::pair<std::size_t, Vector>>> failure(last - first);
    std::vector<std::size_t> counts(last - first);
    parallel_for(last - first, opts.threads, [&](std::size_t w) {
      const std::uint64_t c = first + w;
      const std::size_t count =
          static_cast<std::size_t>(std::min<std::uint64_t>(opts.chunk, samples - c * opts.chunk));
      counts[w] = count;
      std::vector<double> soa;
      std::vector<std::uint8_t> mask(count);
      sample_cell_chunk(lat, seed, c, count, soa);
      eval.covered(soa.data(), count, mask.data());
      for (std::size_t i = 0; i < count; ++i) {
        if (mask[i]) continue;
        Vector x(n);
        for (int k = 0; k < n; ++k) x[k] = soa[k * count + i];
        failure[w] = std::make_pair(i, std::move(x));
        return;
      }
    });
    for (std::size_t w = 0; w < failure.size(); ++w) {
      if (failure[w]) {
        result.all_covered = false;
        result.checked += failure[w]->first + 1;
        result.first_failure = std::move(failure[w]->second);
        return result;
      }
      result.checked += counts[w];
    }
  }
  return result;
}

}  // namespace latcover
