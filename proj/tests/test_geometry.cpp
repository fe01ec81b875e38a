#include "capdual/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "capdual/shapes.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace capdual;
using namespace capdual::geometry;

namespace {
const JordanPolygon& unit_square() {
  static const JordanPolygon sq = shapes::unit_square();
  return sq;
}
const JordanPolygon& disk256() {
  static const JordanPolygon d = shapes::disk(1.0, 256);
  return d;
}
}  // namespace

TEST_CASE("dist_to_boundary on the unit square") {
  CHECK(dist_to_boundary({0.5, 0.5}, unit_square()) == doctest::Approx(0.5));
  CHECK(dist_to_boundary({0.25, 0.5}, unit_square()) == doctest::Approx(0.25));
  CHECK(dist_to_boundary({0.0, 0.0}, unit_square()) == 0.0);  // on a vertex
  CHECK(dist_to_boundary({1.5, 0.5}, unit_square()) == doctest::Approx(0.5));
}

TEST_CASE("dist_to_boundary is 1-Lipschitz") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int i = 0; i < 500; ++i) {
    const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const double da = dist_to_boundary(a, unit_square());
    const double db = dist_to_boundary(b, unit_square());
    CHECK(std::abs(da - db) <= dist(a, b) + 1e-14);
  }
}

TEST_CASE("point_in_domain convention") {
  CHECK(point_in_domain({0.5, 0.5}, unit_square()));
  CHECK_FALSE(point_in_domain({1.5, 0.5}, unit_square()));
  CHECK_FALSE(point_in_domain({1.0, 0.5}, unit_square()));  // on an edge
  CHECK_FALSE(point_in_domain({0.0, 0.0}, unit_square()));  // on a vertex
}

TEST_CASE("weighted_length radial closed form in the disk") {
  const Polyline gamma = segment({0.0, 0.0}, {0.9, 0.0});
  const double got = weighted_length(gamma, disk256(), -0.5);
  const double exact = 2.0 * (1.0 - std::sqrt(0.1));
  CHECK(got == doctest::Approx(exact).epsilon(5e-3));
  CHECK(exact == doctest::Approx((1.0 - std::pow(0.1, 0.5)) / 0.5));
}

TEST_CASE("weighted_length with exponent 0 is the Euclidean length") {
  const Polyline gamma({{0.1, 0.2}, {0.4, 0.8}, {0.9, 0.5}});
  CHECK(weighted_length(gamma, unit_square(), 0.0) == gamma.length());
}

TEST_CASE("quasihyperbolic segment against midpoint-rule oracle") {
  const Polyline gamma = segment({0.25, 0.5}, {0.75, 0.5});
  const double got = weighted_length(gamma, unit_square(), -1.0);
  const double oracle = oracles::midpoint_rule(
      [&](double t) {
        const Point2 p{0.25 + 0.5 * t, 0.5};
        return 0.5 / dist_to_boundary(p, unit_square());
      },
      0.0, 1.0, 10000);
  CHECK(got == doctest::Approx(oracle).epsilon(1e-4));
  // Independent closed form: ln 2 + ln 2.
  CHECK(got == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("weighted_length additive under concatenation") {
  const Polyline left({{0.2, 0.3}, {0.5, 0.52}});
  const Polyline right({{0.5, 0.52}, {0.8, 0.7}});
  const double sum = weighted_length(left, unit_square(), -0.5) +
                     weighted_length(right, unit_square(), -0.5);
  const double whole = weighted_length(left.concat(right), unit_square(), -0.5);
  CHECK(whole == doctest::Approx(sum).epsilon(1e-9));
}

TEST_CASE("weighted_length divergence and boundary endpoints") {
  const Polyline to_boundary = segment({0.5, 0.5}, {1.0, 0.5});
  CHECK_THROWS_AS(weighted_length(to_boundary, unit_square(), -1.0),
                  DivergentIntegral);
  // Integrable singularity: finite for exponent in (-1, 0).
  const double v = weighted_length(to_boundary, unit_square(), -0.5);
  CHECK(std::isfinite(v));
  // Exact: int_0^0.5 min(0.5, 0.5-x')^... distances: from (0.5,0.5) to (1,0.5)
  // the boundary distance is min(0.5, 1-x); on [0.5,1]: 1-x.
  CHECK(v == doctest::Approx(2.0 * std::sqrt(0.5)).epsilon(1e-5));
  CHECK_THROWS_AS(
      weighted_length(segment({1.0, 0.5}, {1.5, 0.5}).concat(
                          segment({1.5, 0.5}, {2.0, 0.5})),
                      unit_square(), -0.5),
      PreconditionError);
}

TEST_CASE("split_boundary on the unit square") {
  const auto quad = split_boundary(unit_square(), {0.0, 1.0, 2.0, 3.0});
  for (int i = 0; i < 4; ++i)
    CHECK(quad.arcs[i].length() == doctest::Approx(1.0));
  double total = 0.0;
  for (const auto& a : quad.arcs) total += a.length();
  CHECK(total == doctest::Approx(unit_square().perimeter()));

  const auto corner = split_boundary(unit_square(), {0.5, 1.5, 2.5, 3.5});
  for (int i = 0; i < 4; ++i)
    CHECK(corner.arcs[i].length() == doctest::Approx(1.0));
  CHECK(corner.arcs[3].contains(0.25));  // wrapping arc covers the seam
  CHECK(corner.arcs[3].contains(3.75));
  CHECK_FALSE(corner.arcs[3].contains(1.0));

  CHECK_THROWS_AS(split_boundary(unit_square(), {0.0, 1.0, 1.0, 3.0}),
                  InvalidCuts);
}

TEST_CASE("segment_in_domain") {
  CHECK(segment_in_domain({0.2, 0.2}, {0.8, 0.8}, unit_square()));
  CHECK_FALSE(segment_in_domain({0.2, 0.2}, {1.8, 0.8}, unit_square()));
  // Endpoints on the boundary with interior in between.
  CHECK(segment_in_domain({0.0, 0.5}, {1.0, 0.5}, unit_square()));
  const JordanPolygon l = shapes::lshape(2.0);
  CHECK_FALSE(segment_in_domain({0.5, 1.5}, {1.5, 0.5}, l));
  CHECK(segment_in_domain({0.5, 0.5}, {1.5, 0.5}, l));
}

TEST_CASE("polygon validation") {
  CHECK_THROWS_AS(JordanPolygon({{0, 0}, {1, 0}}), PreconditionError);
  // Clockwise: negative area.
  CHECK_THROWS_AS(JordanPolygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}),
                  PreconditionError);
  // Self-crossing bowtie.
  CHECK_THROWS_AS(JordanPolygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}),
                  PreconditionError);
  const auto& d = disk256();
  CHECK(d.area() == doctest::Approx(std::numbers::pi).epsilon(1e-3));
  CHECK(d.perimeter() == doctest::Approx(2 * std::numbers::pi).epsilon(1e-3));
}

TEST_CASE("point_at and nearest_boundary_param roundtrip") {
  const auto& sq = unit_square();
  const Point2 p = sq.point_at(2.5);
  CHECK(p.x == doctest::Approx(0.5));
  CHECK(p.y == doctest::Approx(1.0));
  CHECK(sq.nearest_boundary_param({0.5, 1.2}) == doctest::Approx(2.5));
  CHECK(sq.nearest_boundary_param({-0.3, 0.5}) == doctest::Approx(3.5));
}
