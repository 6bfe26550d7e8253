#include "latcover/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <limits>

#define LATCOVER_AVX2 __attribute__((target("avx2")))

namespace latcover::simd::avx2 {

namespace {

constexpr std::size_t kLanes = 4;

PointBatch tail(const PointBatch& pts, std::size_t start) {
  return PointBatch{pts.coords + start, pts.count - start, pts.stride, pts.dim};
}

LATCOVER_AVX2 inline void load_points(const PointBatch& pts, std::size_t i, __m256d* p) {
  for (int k = 0; k < pts.dim; ++k) p[k] = _mm256_loadu_pd(pts.coords + k * pts.stride + i);
}

LATCOVER_AVX2 inline __m256d sq_dist(const __m256d* p, const double* c, int dim) {
  __m256d s = _mm256_setzero_pd();
  for (int k = 0; k < dim; ++k) {
    const __m256d d = _mm256_sub_pd(p[k], _mm256_broadcast_sd(c + k));
    s = _mm256_add_pd(s, _mm256_mul_pd(d, d));
  }
  return s;
}

}  // namespace

LATCOVER_AVX2 void min_sq_dist(const PointBatch& pts, const double* centers,
                               std::size_t n_centers, double* out) {
  if (pts.dim > kMaxVectorDim) return scalar::min_sq_dist(pts, centers, n_centers, out);
  __m256d p[kMaxVectorDim];
  std::size_t i = 0;
  for (; i + kLanes <= pts.count; i += kLanes) {
    load_points(pts, i, p);
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < n_centers; ++c) {
      const __m256d s = sq_dist(p, centers + c * pts.dim, pts.dim);
      best = _mm256_min_pd(s, best);
    }
    _mm256_storeu_pd(out + i, best);
  }
  if (i < pts.count) scalar::min_sq_dist(tail(pts, i), centers, n_centers, out + i);
}

LATCOVER_AVX2 void covered_mask(const PointBatch& pts, const BlockSpec& blocks,
                                const double* offsets, std::size_t n_offsets, std::uint8_t* out) {
  if (pts.dim > kMaxVectorDim) return scalar::covered_mask(pts, blocks, offsets, n_offsets, out);
  __m256d p[kMaxVectorDim];
  std::size_t i = 0;
  for (; i + kLanes <= pts.count; i += kLanes) {
    load_points(pts, i, p);
    __m256d covered = _mm256_setzero_pd();
    for (std::size_t o = 0; o < n_offsets; ++o) {
      const double* off = offsets + o * pts.dim;
      __m256d inside = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
      int k = 0;
      for (int b = 0; b < blocks.n_blocks; ++b) {
        __m256d s = _mm256_setzero_pd();
        for (; k < blocks.block_end[b]; ++k) {
          const __m256d d = _mm256_sub_pd(p[k], _mm256_broadcast_sd(off + k));
          s = _mm256_add_pd(s, _mm256_mul_pd(d, d));
        }
        inside = _mm256_and_pd(
            inside, _mm256_cmp_pd(s, _mm256_broadcast_sd(blocks.radius_sq + b), _CMP_LE_OQ));
        if (_mm256_movemask_pd(inside) == 0) break;
      }
      covered = _mm256_or_pd(covered, inside);
      if (_mm256_movemask_pd(covered) == 0xF) break;
    }
    const int bits = _mm256_movemask_pd(covered);
    for (std::size_t l = 0; l < kLanes; ++l) out[i + l] = static_cast<std::uint8_t>((bits >> l) & 1);
  }
  if (i < pts.count) scalar::covered_mask(tail(pts, i), blocks, offsets, n_offsets, out + i);
}

LATCOVER_AVX2 void min_max_vertex_sq_dist(const PointBatch& pts, const double* vertices,
                                          std::size_t n_groups, int n_vertices,
                                          double anchor_limit_sq, double* out) {
  if (pts.dim > kMaxVectorDim) {
    return scalar::min_max_vertex_sq_dist(pts, vertices, n_groups, n_vertices, anchor_limit_sq,
                                          out);
  }
  const std::size_t group_stride = static_cast<std::size_t>(n_vertices) * pts.dim;
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  const __m256d limit = _mm256_set1_pd(anchor_limit_sq);
  __m256d p[kMaxVectorDim];
  std::size_t i = 0;
  for (; i + kLanes <= pts.count; i += kLanes) {
    load_points(pts, i, p);
    __m256d best = inf;
    for (std::size_t g = 0; g < n_groups; ++g) {
      const double* grp = vertices + g * group_stride;
      const __m256d a = sq_dist(p, grp, pts.dim);
      const __m256d usable = _mm256_cmp_pd(a, limit, _CMP_LE_OQ);
      if (_mm256_movemask_pd(usable) == 0) continue;
      __m256d m = a;
      for (int v = 1; v < n_vertices; ++v) {
        m = _mm256_max_pd(sq_dist(p, grp + v * pts.dim, pts.dim), m);
      }
      best = _mm256_min_pd(_mm256_blendv_pd(inf, m, usable), best);
    }
    _mm256_storeu_pd(out + i, best);
  }
  if (i < pts.count) {
    scalar::min_max_vertex_sq_dist(tail(pts, i), vertices, n_groups, n_vertices, anchor_limit_sq,
                                   out + i);
  }
}

}  // namespace latcover::simd::avx2

#endif
