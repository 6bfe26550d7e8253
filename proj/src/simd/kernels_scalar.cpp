#include "latcover/simd/kernels.hpp"

#include <limits>

namespace latcover::simd::scalar {

namespace {

inline double sq_dist(const PointBatch& pts, std::size_t i, const double* c) {
  double s = 0.0;
  for (int k = 0; k < pts.dim; ++k) {
    const double d = pts.coords[k * pts.stride + i] - c[k];
    s = s + d * d;
  }
  return s;
}

}  // namespace

void min_sq_dist(const PointBatch& pts, const double* centers, std::size_t n_centers,
                 double* out) {
  for (std::size_t i = 0; i < pts.count; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n_centers; ++c) {
      const double s = sq_dist(pts, i, centers + c * pts.dim);
      best = s < best ? s : best;
    }
    out[i] = best;
  }
}

void covered_mask(const PointBatch& pts, const BlockSpec& blocks, const double* offsets,
                  std::size_t n_offsets, std::uint8_t* out) {
  for (std::size_t i = 0; i < pts.count; ++i) {
    std::uint8_t covered = 0;
    for (std::size_t o = 0; o < n_offsets && !covered; ++o) {
      const double* off = offsets + o * pts.dim;
      bool inside = true;
      int k = 0;
      for (int b = 0; b < blocks.n_blocks && inside; ++b) {
        double s = 0.0;
        for (; k < blocks.block_end[b]; ++k) {
          const double d = pts.coords[k * pts.stride + i] - off[k];
          s = s + d * d;
        }
        inside = s <= blocks.radius_sq[b];
      }
      covered = inside ? 1 : 0;
    }
    out[i] = covered;
  }
}

void min_max_vertex_sq_dist(const PointBatch& pts, const double* vertices, std::size_t n_groups,
                            int n_vertices, double anchor_limit_sq, double* out) {
  const std::size_t group_stride = static_cast<std::size_t>(n_vertices) * pts.dim;
  for (std::size_t i = 0; i < pts.count; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < n_groups; ++g) {
      const double* grp = vertices + g * group_stride;
      const double a = sq_dist(pts, i, grp);
      if (!(a <= anchor_limit_sq)) continue;
      double m = a;
      for (int v = 1; v < n_vertices; ++v) {
        const double s = sq_dist(pts, i, grp + v * pts.dim);
        m = s > m ? s : m;
      }
      best = m < best ? m : best;
    }
    out[i] = best;
  }
}

}  // namespace latcover::simd::scalar
