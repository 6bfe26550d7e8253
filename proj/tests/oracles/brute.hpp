#pragma once

// Brute-force references. They scan coefficient boxes directly and share no
// code with the library's enumeration, reduction or certification paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Ints = std::vector<std::int64_t>;

struct Point {
  Ints c;
  Vec x;
};

/// Every lattice point within (closed) distance R of `center`, with a
/// relative boundary slack of 1e-12.
inline std::vector<Point> points_in_ball(const Mat& B, const Vec& center, double R) {
  const int n = static_cast<int>(B.cols());
  const Mat inv = B.inverse();
  const Vec c0 = inv * center;
  std::vector<std::int64_t> lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    const double span = R * inv.row(i).norm() + 1e-9;
    lo[i] = static_cast<std::int64_t>(std::floor(c0[i] - span)) - 1;
    hi[i] = static_cast<std::int64_t>(std::ceil(c0[i] + span)) + 1;
  }
  std::vector<Point> out;
  Ints c(lo);
  const double lim = R * (1.0 + 1e-12);
  while (true) {
    Vec x = Vec::Zero(n);
    for (int i = 0; i < n; ++i) x += static_cast<double>(c[i]) * B.col(i);
    if ((x - center).squaredNorm() <= lim * lim) out.push_back({c, x});
    int i = 0;
    while (i < n && ++c[i] > hi[i]) {
      c[i] = lo[i];
      ++i;
    }
    if (i == n) break;
  }
  return out;
}

/// Distance from t to the nearest lattice point.
inline double distance(const Mat& B, const Vec& t) {
  const Vec r = B * (B.inverse() * t).array().round().matrix();
  const double bound = (t - r).norm();
  double best = bound;
  for (const auto& p : points_in_ball(B, t, bound)) best = std::min(best, (p.x - t).norm());
  return best;
}

/// |det| of an integer matrix by cofactor expansion (d <= 3 here).
inline std::int64_t int_det(const std::vector<Ints>& m) {
  const std::size_t d = m.size();
  if (d == 1) return m[0][0];
  if (d == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  std::int64_t s = 0;
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<Ints> minor;
    for (std::size_t i = 1; i < d; ++i) {
      Ints row;
      for (std::size_t k = 0; k < d; ++k) {
        if (k != j) row.push_back(m[i][k]);
      }
      minor.push_back(row);
    }
    s += (j % 2 ? -1 : 1) * m[0][j] * int_det(minor);
  }
  return s;
}

/// A fundamental parallelepiped with vertex 0, as the sorted set of its
/// vertex coefficient vectors.
using VertexSet = std::vector<Ints>;

/// All fundamental parallelepipeds with vertex 0 whose vertices lie in the
/// closed ball B_R(0): every unordered generator set of nonzero points with
/// unimodular coefficient matrix, deduplicated by vertex set.
inline std::vector<VertexSet> parallelepipeds(const Mat& B, double R) {
  const int d = static_cast<int>(B.cols());
  std::vector<Point> pts;
  for (auto& p : points_in_ball(B, Vec::Zero(d), R)) {
    if (std::any_of(p.c.begin(), p.c.end(), [](std::int64_t v) { return v != 0; })) {
      pts.push_back(p);
    }
  }
  const double lim = R * (1.0 + 1e-12);
  std::set<VertexSet> seen;
  std::vector<int> idx(d);
  auto visit = [&](auto&& self, int depth, int start) -> void {
    if (depth == d) {
      std::vector<Ints> m(d, Ints(d));
      for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) m[i][j] = pts[idx[j]].c[i];
      }
      const auto det = int_det(m);
      if (det != 1 && det != -1) return;
      VertexSet verts;
      for (int mask = 0; mask < (1 << d); ++mask) {
        Ints c(d, 0);
        Vec x = Vec::Zero(d);
        for (int j = 0; j < d; ++j) {
          if (mask & (1 << j)) {
            for (int i = 0; i < d; ++i) c[i] += pts[idx[j]].c[i];
            x += pts[idx[j]].x;
          }
        }
        if (x.squaredNorm() > lim * lim) return;
        verts.push_back(c);
      }
      std::sort(verts.begin(), verts.end());
      seen.insert(verts);
      return;
    }
    for (int i = start; i < static_cast<int>(pts.size()); ++i) {
      idx[depth] = i;
      self(self, depth + 1, i + 1);
    }
  };
  visit(visit, 0, 0);
  return {seen.begin(), seen.end()};
}

/// min over lattice points s within r of w and parallelepipeds P (vertex 0,
/// inside B_{2r}) of max_v |w - s - v|.
inline double deficit(const Mat& B, double r, const Vec& w) {
  const int d = static_cast<int>(B.cols());
  const auto family = parallelepipeds(B, 2.0 * r);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : points_in_ball(B, w, r)) {
    for (const auto& P : family) {
      double worst = 0.0;
      for (const auto& c : P) {
        Vec v = s.x;
        for (int i = 0; i < d; ++i) v += static_cast<double>(c[i]) * B.col(i);
        worst = std::max(worst, (w - v).norm());
      }
      best = std::min(best, worst);
    }
  }
  return best;
}

/// Largest distance to the lattice over an m^d grid of the basis cell: a
/// lower bound on the covering radius.
inline double covering_radius_lower(const Mat& B, int m) {
  const int d = static_cast<int>(B.cols());
  std::vector<int> c(d, 0);
  double best = 0.0;
  while (true) {
    Vec u(d);
    for (int i = 0; i < d; ++i) u[i] = (c[i] + 0.5) / m;
    best = std::max(best, distance(B, B * u));
    int i = 0;
    while (i < d && ++c[i] >= m) {
      c[i] = 0;
      ++i;
    }
    if (i == d) break;
  }
  return best;
}

}  // namespace oracle
