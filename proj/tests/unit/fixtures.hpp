#pragma once

#include <cmath>
#include <numbers>

#include "latcover/lattice.hpp"
#include "latcover/rng.hpp"

namespace fixtures {

inline const double kSqrt3 = std::sqrt(3.0);
inline const double kHexRadius = 2.0 / kSqrt3;
inline const double kHexDensity = 8.0 * std::numbers::pi / (3.0 * kSqrt3);

inline latcover::Matrix hex_basis() {
  latcover::Matrix b(2, 2);
  b << 1.0, 0.5, 0.0, kSqrt3 / 2.0;
  return b;
}

inline latcover::Lattice hex() { return latcover::Lattice::from_basis(hex_basis()); }

inline latcover::Lattice cubic(int n) {
  return latcover::Lattice::from_basis(latcover::Matrix::Identity(n, n));
}

/// Well-conditioned random basis: identity plus a bounded perturbation.
inline latcover::Lattice random_lattice(latcover::Rng& rng, int n, double spread = 0.6) {
  latcover::Matrix b = latcover::Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) b(i, j) += rng.uniform(-spread, spread);
  }
  return latcover::Lattice::from_basis(b);
}

inline latcover::Vector random_vector(latcover::Rng& rng, int n, double lo, double hi) {
  latcover::Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

}  // namespace fixtures
