#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "latcover/density.hpp"
#include "latcover/error.hpp"
#include "latcover/stats.hpp"

using namespace latcover;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

ProductBody boxes(double r) {
  ProductBody b;
  b.blocks = {{1, r}, {1, r}};
  return b;
}

}  // namespace

TEST_SUITE("density") {

TEST_CASE("membership examples") {
  const Lattice z2 = fixtures::cubic(2);
  CHECK(body_membership(z2, ProductBody::ball(2, 1.0), v2(0.5, 0.5)));
  CHECK_FALSE(body_membership(z2, ProductBody::ball(2, 0.5), v2(0.5, 0.5)));
  CHECK_FALSE(body_membership(z2, boxes(0.4), v2(0.45, 0.0)));
  CHECK(body_membership(z2, boxes(0.4), v2(0.35, 0.6)));
}

TEST_CASE("membership agrees with the distance to the lattice") {
  Rng rng(31);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 1 + trial % 4;
    const Lattice lat = fixtures::random_lattice(rng, n);
    ProductBody body = ProductBody::ball(n, rng.uniform(0.2, 0.9));
    body.scale = rng.uniform(0.7, 1.3);
    const Vector x = fixtures::random_vector(rng, n, -2, 2);
    const double dist = distance_to_lattice(lat, x);
    const double lim = body.scale * body.blocks[0].radius;
    if (std::abs(dist - lim) < 1e-9) continue;
    CHECK(body_membership(lat, body, x) == (dist <= lim));
  }
}

TEST_CASE("body validation") {
  ProductBody bad = ProductBody::ball(2, 0.5);
  bad.scale = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.scale = 1.0;
  bad.translates.push_back(Vector::Zero(3));
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(estimate_uncovered_density(fixtures::cubic(3), ProductBody::ball(2, 1.0), 10, 1),
                  Error);
}

TEST_CASE("estimate examples") {
  const auto full = estimate_uncovered_density(fixtures::cubic(2), ProductBody::ball(2, 1.0), 20'000, 4);
  CHECK(full.estimate == 0.0);
  CHECK(full.uncovered == 0);
  CHECK(full.ci95_upper == doctest::Approx(3.0 / 20'000));

  const double target = 1.0 - std::numbers::pi / 4.0;
  const auto half = estimate_uncovered_density(fixtures::cubic(2), ProductBody::ball(2, 0.5), 100'000, 1);
  CHECK(std::abs(half.estimate - target) <= 3.0 * half.ci95_halfwidth);
  CHECK(half.ci95_lower <= half.estimate);
  CHECK(half.estimate <= half.ci95_upper);

  const auto line = estimate_uncovered_density(fixtures::cubic(1), ProductBody::ball(1, 0.25), 100'000, 2);
  CHECK(std::abs(line.estimate - 0.5) <= 3.0 * line.ci95_halfwidth);
}

TEST_CASE("estimates do not depend on the thread count") {
  const Lattice lat = fixtures::hex();
  const ProductBody body = ProductBody::ball(2, 0.5);
  McOptions one;
  one.threads = 1;
  McOptions three;
  three.threads = 3;
  const auto a = estimate_uncovered_density(lat, body, 50'000, 9, one);
  const auto b = estimate_uncovered_density(lat, body, 50'000, 9, three);
  CHECK(a.uncovered == b.uncovered);
  const auto c = estimate_uncovered_density(lat, body, 50'000, 10, one);
  CHECK(a.uncovered != c.uncovered);
}

TEST_CASE("estimator is unbiased with binomial variance") {
  const double p = 1.0 - std::numbers::pi / 4.0;
  const std::uint64_t n = 10'000;
  std::vector<double> values;
  for (int i = 0; i < 50; ++i) {
    values.push_back(estimate_uncovered_density(fixtures::cubic(2), ProductBody::ball(2, 0.5), n,
                                                derive_seed(77, 0, i))
                         .estimate);
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  const double var = p * (1.0 - p) / n;
  CHECK(std::abs(mean - p) <= 4.0 * std::sqrt(var / values.size()));
  CHECK(chi_square_variance(values, var).p_value > 1e-3);
}

TEST_CASE("translates and scale never increase the uncovered density") {
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 3;
    const Lattice lat = fixtures::random_lattice(rng, n, 0.3);
    ProductBody body = ProductBody::ball(n, 0.3);
    const auto base = estimate_uncovered_density(lat, body, 20'000, 5);
    ProductBody more = body;
    more.translates = {Vector::Zero(n), fixtures::random_vector(rng, n, 0, 1)};
    CHECK(estimate_uncovered_density(lat, more, 20'000, 5).uncovered <= base.uncovered);
    ProductBody bigger = body;
    bigger.scale = 1.2;
    CHECK(estimate_uncovered_density(lat, bigger, 20'000, 5).uncovered <= base.uncovered);
  }
}

TEST_CASE("sampler matches the membership predicate") {
  const Lattice lat = fixtures::hex();
  ProductBody body;
  body.blocks = {{1, 0.3}, {1, 0.35}};
  body.translates = {v2(0, 0), v2(0.4, 0.2)};
  const std::size_t count = 3000;
  std::vector<double> soa;
  sample_cell_chunk(lat, 3, 0, count, soa);
  std::vector<std::uint8_t> mask(count);
  CoverageEvaluator(lat, body).covered(soa.data(), count, mask.data());
  for (std::size_t i = 0; i < count; ++i) {
    const Vector x = v2(soa[i], soa[count + i]);
    const Vector u = lat.coefficients(x);
    CHECK(u[0] >= 0.0);
    CHECK(u[0] < 1.0);
    CHECK(u[1] >= 0.0);
    CHECK(u[1] < 1.0);
    CHECK((mask[i] != 0) == body_membership(lat, body, x));
  }
}

TEST_CASE("empirical covering checks") {
  CHECK(verify_covering_empirical(fixtures::cubic(2), ProductBody::ball(2, 1.0), 20'000, 1).all_covered);
  const auto miss = verify_covering_empirical(fixtures::cubic(2), ProductBody::ball(2, 0.5), 20'000, 1);
  CHECK_FALSE(miss.all_covered);
  REQUIRE(miss.first_failure.has_value());
  CHECK(distance_to_lattice(fixtures::cubic(2), *miss.first_failure) > 0.5);
  const Vector w = reduce_mod_lattice(fixtures::cubic(2), *miss.first_failure);
  CHECK((w - v2(0.5, 0.5)).norm() < 0.5);
  CHECK(verify_covering_empirical(fixtures::hex(), ProductBody::ball(2, 1.001 / fixtures::kSqrt3),
                                  100'000, 1)
            .all_covered);
}

TEST_CASE("Wilson interval") {
  const auto ci = wilson_interval(50, 100);
  CHECK(ci.lower == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(ci.upper == doctest::Approx(0.5962).epsilon(1e-3));
  const auto zero = wilson_interval(0, 1000);
  CHECK(zero.lower == 0.0);
  CHECK(zero.upper == doctest::Approx(0.003));
}

TEST_CASE("chi-square helpers") {
  CHECK(chi_square_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-9));
  const auto flat = chi_square_uniform({100, 100, 100, 100});
  CHECK(flat.statistic == 0.0);
  CHECK(flat.p_value == doctest::Approx(1.0));
}

}  // TEST_SUITE
