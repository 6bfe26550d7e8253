#pragma once

// Batched distance kernels behind the Monte Carlo estimator, the covering
// radius grid and the robustness grid. Each kernel has a scalar reference
// implementation and vector variants; all variants perform the same IEEE
// operations in the same order (no FMA contraction), so their outputs are
// bit-identical and the choice of variant never changes a result.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace latcover::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;
std::optional<Isa> parse_isa(std::string_view name) noexcept;

/// Whether this binary contains the variant and the CPU can run it.
bool isa_available(Isa isa) noexcept;

/// Variant used by the dispatching entry points: a forced choice if any,
/// else the LATCOVER_SIMD environment variable (scalar|avx2|neon), else the
/// best available.
Isa active_isa() noexcept;

/// Forces a variant (nullopt restores automatic selection). Unavailable
/// variants are ignored.
void force_isa(std::optional<Isa> isa) noexcept;

/// Structure-of-arrays point block: coordinate k of point i is
/// coords[k * stride + i].
struct PointBatch {
  const double* coords;
  std::size_t count;
  std::size_t stride;
  int dim;
};

/// Coordinates [block_end[b-1], block_end[b]) form block b.
struct BlockSpec {
  const int* block_end;
  const double* radius_sq;
  int n_blocks;
};

/// Widest dimension handled by the vector variants; larger inputs fall back
/// to the scalar kernels.
inline constexpr int kMaxVectorDim = 16;

using MinSqDistFn = void (*)(const PointBatch&, const double* centers, std::size_t n_centers,
                             double* out);
using CoveredMaskFn = void (*)(const PointBatch&, const BlockSpec&, const double* offsets,
                               std::size_t n_offsets, std::uint8_t* out);
using MinMaxVertexFn = void (*)(const PointBatch&, const double* vertices, std::size_t n_groups,
                                int n_vertices, double anchor_limit_sq, double* out);

struct KernelTable {
  /// out[i] = min over centers c (row-major n_centers x dim) of |p_i - c|^2.
  MinSqDistFn min_sq_dist;
  /// out[i] = 1 iff some offset o satisfies, for every block b,
  /// sum_{k in b} (p_ik - o_k)^2 <= radius_sq[b].
  CoveredMaskFn covered_mask;
  /// Groups are n_vertices consecutive points (row-major); vertex 0 is the
  /// anchor. out[i] = min over groups whose anchor lies within
  /// sqrt(anchor_limit_sq) of p_i of max_v |p_i - v|^2, or +inf.
  MinMaxVertexFn min_max_vertex_sq_dist;
};

const KernelTable& kernels(Isa isa);
inline const KernelTable& kernels() { return kernels(active_isa()); }

namespace scalar {
void min_sq_dist(const PointBatch&, const double*, std::size_t, double*);
void covered_mask(const PointBatch&, const BlockSpec&, const double*, std::size_t, std::uint8_t*);
void min_max_vertex_sq_dist(const PointBatch&, const double*, std::size_t, int, double, double*);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void min_sq_dist(const PointBatch&, const double*, std::size_t, double*);
void covered_mask(const PointBatch&, const BlockSpec&, const double*, std::size_t, std::uint8_t*);
void min_max_vertex_sq_dist(const PointBatch&, const double*, std::size_t, int, double, double*);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void min_sq_dist(const PointBatch&, const double*, std::size_t, double*);
void covered_mask(const PointBatch&, const BlockSpec&, const double*, std::size_t, std::uint8_t*);
void min_max_vertex_sq_dist(const PointBatch&, const double*, std::size_t, int, double, double*);
}  // namespace neon
#endif

}  // namespace latcover::simd
