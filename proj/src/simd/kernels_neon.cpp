#include "latcover/simd/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <limits>

namespace latcover::simd::neon {

namespace {

constexpr std::size_t kLanes = 2;

PointBatch tail(const PointBatch& pts, std::size_t start) {
  return PointBatch{pts.coords + start, pts.count - start, pts.stride, pts.dim};
}

inline void load_points(const PointBatch& pts, std::size_t i, float64x2_t* p) {
  for (int k = 0; k < pts.dim; ++k) p[k] = vld1q_f64(pts.coords + k * pts.stride + i);
}

// vsubq/vmulq/vaddq only: a fused multiply-add would round differently from
// the scalar reference.
inline float64x2_t sq_dist(const float64x2_t* p, const double* c, int dim) {
  float64x2_t s = vdupq_n_f64(0.0);
  for (int k = 0; k < dim; ++k) {
    const float64x2_t d = vsubq_f64(p[k], vdupq_n_f64(c[k]));
    s = vaddq_f64(s, vmulq_f64(d, d));
  }
  return s;
}

// (a < b) ? a : b lane-wise, matching the scalar select exactly.
inline float64x2_t select_min(float64x2_t a, float64x2_t b) {
  return vbslq_f64(vcltq_f64(a, b), a, b);
}

inline float64x2_t select_max(float64x2_t a, float64x2_t b) {
  return vbslq_f64(vcgtq_f64(a, b), a, b);
}

inline bool any_lane(uint64x2_t m) { return (vgetq_lane_u64(m, 0) | vgetq_lane_u64(m, 1)) != 0; }
inline bool all_lanes(uint64x2_t m) { return (vgetq_lane_u64(m, 0) & vgetq_lane_u64(m, 1)) != 0; }

}  // namespace

void min_sq_dist(const PointBatch& pts, const double* centers, std::size_t n_centers,
                 double* out) {
  if (pts.dim > kMaxVectorDim) return scalar::min_sq_dist(pts, centers, n_centers, out);
  float64x2_t p[kMaxVectorDim];
  std::size_t i = 0;
  for (; i + kLanes <= pts.count; i += kLanes) {
    load_points(pts, i, p);
    float64x2_t best = vdupq_n_f64(std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < n_centers; ++c) {
      best = select_min(sq_dist(p, centers + c * pts.dim, pts.dim), best);
    }
    vst1q_f64(out + i, best);
  }
  if (i < pts.count) scalar::min_sq_dist(tail(pts, i), centers, n_centers, out + i);
}

void covered_mask(const PointBatch& pts, const BlockSpec& blocks, const double* offsets,
                  std::size_t n_offsets, std::uint8_t* out) {
  if (pts.dim > kMaxVectorDim) return scalar::covered_mask(pts, blocks, offsets, n_offsets, out);
  float64x2_t p[kMaxVectorDim];
  std::size_t i = 0;
  for (; i + kLanes <= pts.count; i += kLanes) {
    load_points(pts, i, p);
    uint64x2_t covered = vdupq_n_u64(0);
    for (std::size_t o = 0; o < n_offsets; ++o) {
      const double* off = offsets + o * pts.dim;
      uint64x2_t inside = vdupq_n_u64(~0ULL);
      int k = 0;
      for (int b = 0; b < blocks.n_blocks; ++b) {
        float64x2_t s = vdupq_n_f64(0.0);
        for (; k < blocks.block_end[b]; ++k) {
          const float64x2_t d = vsubq_f64(p[k], vdupq_n_f64(off[k]));
          s = vaddq_f64(s, vmulq_f64(d, d));
        }
        inside = vandq_u64(inside, vcleq_f64(s, vdupq_n_f64(blocks.radius_sq[b])));
        if (!any_lane(inside)) break;
      }
      covered = vorrq_u64(covered, inside);
      if (all_lanes(covered)) break;
    }
    out[i] = vgetq_lane_u64(covered, 0) ? 1 : 0;
    out[i + 1] = vgetq_lane_u64(covered, 1) ? 1 : 0;
  }
  if (i < pts.count) scalar::covered_mask(tail(pts, i), blocks, offsets, n_offsets, out + i);
}

void min_max_vertex_sq_dist(const PointBatch& pts, const double* vertices, std::size_t n_groups,
                            int n_vertices, double anchor_limit_sq, double* out) {
  if (pts.dim > kMaxVectorDim) {
    return scalar::min_max_vertex_sq_dist(pts, vertices, n_groups, n_vertices, anchor_limit_sq,
                                          out);
  }
  const std::size_t group_stride = static_cast<std::size_t>(n_vertices) * pts.dim;
  const float64x2_t inf = vdupq_n_f64(std::numeric_limits<double>::infinity());
  const float64x2_t limit = vdupq_n_f64(anchor_limit_sq);
  float64x2_t p[kMaxVectorDim];
  std::size_t i = 0;
  for (; i + kLanes <= pts.count; i += kLanes) {
    load_points(pts, i, p);
    float64x2_t best = inf;
    for (std::size_t g = 0; g < n_groups; ++g) {
      const double* grp = vertices + g * group_stride;
      const float64x2_t a = sq_dist(p, grp, pts.dim);
      const uint64x2_t usable = vcleq_f64(a, limit);
      if (!any_lane(usable)) continue;
      float64x2_t m = a;
      for (int v = 1; v < n_vertices; ++v) m = select_max(sq_dist(p, grp + v * pts.dim, pts.dim), m);
      best = select_min(vbslq_f64(usable, m, inf), best);
    }
    vst1q_f64(out + i, best);
  }
  if (i < pts.count) {
    scalar::min_max_vertex_sq_dist(tail(pts, i), vertices, n_groups, n_vertices, anchor_limit_sq,
                                   out + i);
  }
}

}  // namespace latcover::simd::neon

#endif
