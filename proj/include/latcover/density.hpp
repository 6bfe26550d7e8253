#pragma once

// Uncovered density of Lambda + K for bodies K that are unions of translates
// of a scaled product of balls, estimated on the torus R^n / Lambda.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latcover/lattice.hpp"

namespace latcover {

struct Block {
  int dim;
  double radius;
};

/// K = union over t in translates of (t + scale * (B^{d_1}_{r_1} x ... )).
struct ProductBody {
  std::vector<Block> blocks;
  double scale = 1.0;
  std::vector<Vector> translates;  // empty means {0}

  static ProductBody ball(int dim, double radius);

  int ambient_dim() const;
  /// Radius of the smallest origin-centred ball holding scale * (product).
  double enclosing_radius() const;
  /// Translates, with the implicit {0} made explicit.
  std::vector<Vector> effective_translates() const;
  /// Squared per-block membership limit, closed-ball slack included.
  double block_limit_sq(std::size_t block) const;
  void validate() const;
};

struct DensityEstimate {
  double estimate = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t uncovered = 0;
  double ci95_halfwidth = 0.0;
  double ci95_lower = 0.0;
  double ci95_upper = 0.0;
  std::string method;
};

struct McOptions {
  unsigned threads = 0;
  /// Samples per independent RNG stream; part of the reproducibility contract.
  std::size_t chunk = 8192;
  EnumOptions enumeration{};
};

/// x in Lambda + K, decided by enumerating lattice points in the enclosing
/// ball around x - t and testing each block.
bool body_membership(const Lattice& lat, const ProductBody& body, const Vector& x,
                     const EnumOptions& opts = {});

/// Fraction of uniform points of the basis cell not covered by Lambda + K.
DensityEstimate estimate_uncovered_density(const Lattice& lat, const ProductBody& body,
                                           std::uint64_t samples, std::uint64_t seed,
                                           const McOptions& opts = {});

struct CoverageCheck {
  bool all_covered = true;
  std::optional<Vector> first_failure;
  std::uint64_t checked = 0;
};

/// Tests the same sample stream as estimate_uncovered_density and stops at
/// the first uncovered point.
CoverageCheck verify_covering_empirical(const Lattice& lat, const ProductBody& body,
                                        std::uint64_t samples, std::uint64_t seed,
                                        const McOptions& opts = {});

/// Batched membership for points of the basis cell (and anything within
/// `slack` of it). Offsets p + t are precomputed once.
class CoverageEvaluator {
 public:
  CoverageEvaluator(const Lattice& lat, const ProductBody& body, double slack = 0.0,
                    const EnumOptions& opts = {});

  int dim() const noexcept { return dim_; }
  std::size_t offset_count() const noexcept { return offsets_.size() / dim_; }

  /// SoA coordinates (coordinate k of point i at soa[k * count + i]).
  void covered(const double* soa, std::size_t count, std::uint8_t* out) const;

 private:
  int dim_;
  std::vector<int> block_end_;
  std::vector<double> limit_sq_;
  std::vector<double> offsets_;
};

/// Fills soa (dim x count) with points B u, u uniform in [0,1)^n, drawn from
/// stream `chunk` of `seed`.
void sample_cell_chunk(const Lattice& lat, std::uint64_t seed, std::uint64_t chunk,
                       std::size_t count, std::vector<double>& soa);

}  // namespace latcover
