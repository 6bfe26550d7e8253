#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "../oracles/brute.hpp"
#include "fixtures.hpp"
#include "latcover/error.hpp"
#include "latcover/lattice.hpp"

using namespace latcover;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("lattice") {

TEST_CASE("construction checks") {
  Matrix singular(2, 2);
  singular << 1, 2, 2, 4;
  CHECK(code_of([&] { Lattice::from_basis(singular); }) == ErrorCode::SingularBasis);
  CHECK(code_of([&] { Lattice::from_basis(Matrix::Ones(2, 3)); }) == ErrorCode::DimensionMismatch);
  CHECK(fixtures::hex().det_abs() == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
}

TEST_CASE("determinant and point reconstruction on random bases") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 4;
    const Lattice lat = fixtures::random_lattice(rng, n);
    CHECK(std::abs(lat.det_abs() - std::abs(lat.basis().determinant())) <=
          1e-12 * lat.det_abs());
    Coeffs c(n);
    for (auto& v : c) v = rng.integer(-5, 5);
    const Vector x = lat.point(c);
    const Vector back = lat.coefficients(x);
    for (int i = 0; i < n; ++i) CHECK(std::abs(back[i] - c[i]) <= 1e-9);
  }
}

TEST_CASE("enumeration matches a coefficient-box scan") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 4;
    const Lattice lat = fixtures::random_lattice(rng, n);
    const Vector c = fixtures::random_vector(rng, n, -2, 2);
    const double R = rng.uniform(0.3, 2.5);
    const auto got = enumerate_lattice_points(lat, c, R);
    auto want = oracle::points_in_ball(lat.basis(), c, R);
    std::sort(want.begin(), want.end(), [](auto& a, auto& b) { return a.c < b.c; });
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].coeffs == want[i].c);
    for (std::size_t i = 1; i < got.size(); ++i) CHECK(got[i - 1].coeffs < got[i].coeffs);
  }
}

TEST_CASE("frozen point counts") {
  CHECK(enumerate_lattice_points(fixtures::hex(), Vector::Zero(2), 4.0 / fixtures::kSqrt3).size() ==
        19);
  CHECK(enumerate_lattice_points(fixtures::cubic(2), Vector::Zero(2), 2.0 * std::sqrt(2.0)).size() ==
        25);
  CHECK(enumerate_lattice_points(fixtures::cubic(3), Vector::Zero(3), 2.0 * std::sqrt(3.0)).size() ==
        179);
}

TEST_CASE("enumeration budget") {
  EnumOptions tiny;
  tiny.max_candidates = 10;
  CHECK(code_of([&] { enumerate_lattice_points(fixtures::cubic(3), Vector::Zero(3), 5.0, tiny); }) ==
        ErrorCode::EnumerationBudgetExceeded);
}

TEST_CASE("closest point examples") {
  const Lattice z2 = fixtures::cubic(2);
  Vector t(2);
  t << 0.4, 0.6;
  CHECK(closest_lattice_point(z2, t).coeffs == Coeffs{0, 1});
  t << 0.5, 0.5;
  CHECK(closest_lattice_point(z2, t).coeffs == Coeffs{0, 0});
  Vector x(2);
  x << 1.0, 1.0 / fixtures::kSqrt3;
  CHECK(distance_to_lattice(fixtures::hex(), x) == doctest::Approx(1.0 / fixtures::kSqrt3).epsilon(1e-12));
}

TEST_CASE("closest point matches brute force") {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    const Lattice lat = fixtures::random_lattice(rng, n);
    const Vector t = fixtures::random_vector(rng, n, -3, 3);
    const double got = (closest_lattice_point(lat, t).coords - t).norm();
    CHECK(got == doctest::Approx(oracle::distance(lat.basis(), t)).epsilon(1e-12));
    CHECK(distance_to_lattice(lat, t) == doctest::Approx(got).epsilon(1e-14));
  }
}

TEST_CASE("reduction examples") {
  Vector x(2);
  x << 1.25, -0.5;
  const Vector r = reduce_mod_lattice(fixtures::cubic(2), x);
  CHECK(r[0] == doctest::Approx(0.25));
  CHECK(r[1] == doctest::Approx(0.5));
  x << 1.1, 0.1;
  const Vector h = reduce_mod_lattice(fixtures::hex(), x);
  CHECK(h[0] == doctest::Approx(0.1));
  CHECK(h[1] == doctest::Approx(0.1));
}

TEST_CASE("reduction lands in the cell and differs by a lattice vector") {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    const Lattice lat = fixtures::random_lattice(rng, n);
    const Vector x = fixtures::random_vector(rng, n, -10, 10);
    const Vector r = reduce_mod_lattice(lat, x);
    const Vector u = lat.coefficients(r);
    for (int i = 0; i < n; ++i) {
      CHECK(u[i] >= -1e-12);
      CHECK(u[i] < 1.0 + 1e-12);
    }
    const Vector diff = lat.coefficients(x - r);
    for (int i = 0; i < n; ++i) CHECK(std::abs(diff[i] - std::round(diff[i])) <= 1e-9);
    CHECK(distance_to_lattice(lat, r) == doctest::Approx(distance_to_lattice(lat, x)).epsilon(1e-9));
  }
}

TEST_CASE("covering radius brackets") {
  const double h = 1e-3;
  CHECK(covering_radius(fixtures::cubic(1), h).contains(0.5));
  const Interval z2 = covering_radius(fixtures::cubic(2), h);
  CHECK(z2.contains(std::sqrt(2.0) / 2.0));
  CHECK(z2.width() <= h * std::sqrt(2.0) / 2.0 + 1e-15);
  CHECK(covering_radius(fixtures::hex(), h).contains(1.0 / fixtures::kSqrt3));
}

TEST_CASE("covering radius agrees with a brute-force grid") {
  Rng rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + trial % 2;
    const Lattice lat = fixtures::random_lattice(rng, n, 0.4);
    const Interval iv = covering_radius(lat, n == 2 ? 2e-3 : 2e-2);
    const double lower = oracle::covering_radius_lower(lat.basis(), n == 2 ? 60 : 12);
    CHECK(lower <= iv.hi + 1e-12);
    CHECK(iv.lo <= iv.hi);
  }
}

TEST_CASE("coarse grids are rejected") {
  CHECK(code_of([] { covering_radius(fixtures::cubic(2), 2.0); }) == ErrorCode::GridTooCoarse);
}

TEST_CASE("covering density") {
  CHECK(std::abs(covering_density(fixtures::hex(), fixtures::kHexRadius) - fixtures::kHexDensity) <=
        1e-9);
  CHECK(covering_density(fixtures::cubic(1), 1.0) == doctest::Approx(2.0));
}

TEST_CASE("Gram-Schmidt reproduces the determinant") {
  Rng rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const Lattice lat = fixtures::random_lattice(rng, 1 + trial % 5);
    double prod = 1.0;
    for (Eigen::Index j = 0; j < lat.gso().bstar_sq.size(); ++j) prod *= lat.gso().bstar_sq[j];
    CHECK(std::sqrt(prod) == doctest::Approx(lat.det_abs()).epsilon(1e-10));
  }
}

TEST_CASE("points near the cell contain the nearest points of cell samples") {
  Rng rng(23);
  const Lattice lat = fixtures::random_lattice(rng, 3);
  const auto near = points_near_cell(lat, 0.0);
  for (int s = 0; s < 200; ++s) {
    const Vector x = lat.basis() * fixtures::random_vector(rng, 3, 0, 1);
    const Coeffs c = closest_lattice_point(lat, x).coeffs;
    CHECK(std::any_of(near.begin(), near.end(), [&](const LatticePoint& p) { return p.coeffs == c; }));
  }
}

}  // TEST_SUITE
