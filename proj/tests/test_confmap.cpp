#include "capdual/confmap.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "capdual/shapes.hpp"
#include "doctest.h"

using namespace capdual;
using namespace capdual::geometry;
using namespace capdual::confmap;
using std::numbers::pi;

namespace {

const JordanPolygon& disk_poly() {
  static const JordanPolygon p = shapes::disk(1.0, 256);
  return p;
}

const JordanPolygon& square_poly() {
  static const JordanPolygon p = shapes::unit_square();
  return p;
}

const RiemannMap& disk_map() {
  static const RiemannMap map = build_map(disk_poly(), {0.0, 0.0}, 0.05);
  return map;
}

const RiemannMap& square_map() {
  static const RiemannMap map = build_map(square_poly(), {0.5, 0.5}, 0.03);
  return map;
}

double hausdorff(const Polyline& a, const Polyline& b) {
  const auto one_sided = [](const Polyline& p, const Polyline& q) {
    double worst = 0.0;
    for (const Point2 x : p.vertices()) {
      double best = 1e300;
      const auto& v = q.vertices();
      for (std::size_t i = 0; i + 1 < v.size(); ++i)
        best = std::min(best, segment_point_distance(v[i], v[i + 1], x));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

}  // namespace

TEST_CASE("the disk map is close to the identity") {
  const auto& map = disk_map();
  double worst = 0.0;
  for (std::size_t i = 0; i < map.mesh->nodes.size(); ++i)
    worst = std::max(worst, dist(map.image_nodes[i], map.mesh->nodes[i]));
  CHECK(worst <= 2e-2);
  // Green function invariants.
  for (const auto& [i, s] : map.mesh->boundary_params)
    CHECK(std::abs(map.green.values[i]) <= 1e-8);
  for (double g : map.green.values) CHECK(g >= -1e-6);
  for (const Point2 w : map.image_nodes)
    CHECK(norm(w) <= 1.0 + 1e-6);
}

TEST_CASE("square map: unit modulus on the boundary and 4-fold symmetry") {
  const auto& map = square_map();
  for (const auto& [i, s] : map.mesh->boundary_params)
    CHECK(std::abs(norm(map.image_nodes[i]) - 1.0) <= 1e-2);
  // Boundary angles at the four side midpoints are a quarter turn apart.
  const double t0 = map.boundary.theta_at(0.5);
  const double t1 = map.boundary.theta_at(1.5);
  const double t2 = map.boundary.theta_at(2.5);
  const double t3 = map.boundary.theta_at(3.5);
  CHECK(std::abs(std::remainder(t1 - t0 - pi / 2, 2 * pi)) <= 1e-2);
  CHECK(std::abs(std::remainder(t2 - t1 - pi / 2, 2 * pi)) <= 1e-2);
  CHECK(std::abs(std::remainder(t3 - t2 - pi / 2, 2 * pi)) <= 1e-2);
}

TEST_CASE("base point too near the boundary is rejected") {
  CHECK_THROWS_AS(build_map(shapes::unit_square(), {0.5, 0.05}, 0.05),
                  PreconditionError);
  CHECK_THROWS_AS(build_map(shapes::unit_square(), {1.5, 0.5}, 0.05),
                  PreconditionError);
}

TEST_CASE("boundary correspondence is monotone with total increase 2 pi") {
  for (const RiemannMap* map : {&disk_map(), &square_map()}) {
    CHECK(map->boundary.monotone());
    CHECK(map->boundary.total_increase() ==
          doctest::Approx(2 * pi).epsilon(1e-2 / (2 * pi) * 10));
    CHECK(std::abs(map->boundary.total_increase() - 2 * pi) <= 1e-2);
  }
}

TEST_CASE("hyperbolic distance closed form in the disk") {
  const auto& map = disk_map();
  const double d = hyperbolic_distance(map, {0.0, 0.0}, {0.5, 0.0});
  CHECK(d == doctest::Approx(std::log(3.0)).epsilon(0.02));
  CHECK(hyperbolic_distance(map, {0.3, 0.2}, {0.3, 0.2}) == 0.0);
  const double ab = hyperbolic_distance(map, {0.3, 0.2}, {-0.4, 0.1});
  const double ba = hyperbolic_distance(map, {-0.4, 0.1}, {0.3, 0.2});
  CHECK(ab == ba);
}

TEST_CASE("hyperbolic distance matches the analytic disk formula at random pairs") {
  const auto& map = disk_map();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-0.75, 0.75);
  int checked = 0;
  for (int i = 0; i < 200 && checked < 100; ++i) {
    const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    if (norm(a) > 0.85 || norm(b) > 0.85 || dist(a, b) < 0.05) continue;
    ++checked;
    const std::complex<double> wa{a.x, a.y}, wb{b.x, b.y};
    const double delta = std::abs(wa - wb) / std::abs(1.0 - std::conj(wa) * wb);
    const double exact = std::log((1 + delta) / (1 - delta));
    CHECK(hyperbolic_distance(map, a, b) ==
          doctest::Approx(exact).epsilon(0.02));
  }
  CHECK(checked == 100);
}

TEST_CASE("triangle inequality for hyperbolic distance") {
  const auto& map = square_map();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int i = 0; i < 50; ++i) {
    const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    const double ab = hyperbolic_distance(map, a, b);
    const double bc = hyperbolic_distance(map, b, c);
    const double ac = hyperbolic_distance(map, a, c);
    CHECK(ac <= ab + bc + 1e-6);
  }
}

TEST_CASE("geodesic through the center is a diameter segment") {
  const auto& map = disk_map();
  const Polyline g = hyperbolic_geodesic(map, {-0.5, 0.0}, {0.5, 0.0}, 33);
  const Polyline chord = segment({-0.5, 0.0}, {0.5, 0.0});
  CHECK(hausdorff(g, chord) <= 2e-2);
  CHECK(dist(g.front(), {-0.5, 0.0}) == 0.0);
  CHECK(dist(g.back(), {0.5, 0.0}) == 0.0);
}

TEST_CASE("off-center geodesic matches the orthogonal circular arc") {
  const auto& map = disk_map();
  const Point2 z1{0.5, 0.0}, z2{0.0, 0.5};
  const Polyline g = hyperbolic_geodesic(map, z1, z2, 65);
  // Analytic circle orthogonal to the unit circle through z1, z2:
  // dot(c, zi) = (1 + |zi|^2) / 2.
  const double b1 = 0.5 * (1.0 + dot(z1, z1));
  const double b2 = 0.5 * (1.0 + dot(z2, z2));
  const double det = cross(z1, z2);
  const Point2 c{(b1 * z2.y - z1.y * b2) / det, (z1.x * b2 - b1 * z2.x) / det};
  const double R = std::sqrt(dot(c, c) - 1.0);
  const double a1 = std::atan2(z1.y - c.y, z1.x - c.x);
  const double a2 = std::atan2(z2.y - c.y, z2.x - c.x);
  const double da = std::remainder(a2 - a1, 2 * pi);
  std::vector<Point2> arc;
  for (int i = 0; i <= 64; ++i) {
    const double a = a1 + da * i / 64;
    arc.push_back({c.x + R * std::cos(a), c.y + R * std::sin(a)});
  }
  CHECK(hausdorff(g, Polyline(arc)) <= 3e-2);
}

TEST_CASE("geodesic subdivision is additive in hyperbolic distance") {
  const auto& map = square_map();
  const Point2 z1{0.2, 0.3}, z2{0.8, 0.6};
  const Polyline g = hyperbolic_geodesic(map, z1, z2, 48);
  double along = 0.0;
  const auto& v = g.vertices();
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    along += hyperbolic_distance(map, v[i], v[i + 1]);
  CHECK(along == doctest::Approx(hyperbolic_distance(map, z1, z2))
                     .epsilon(0.02));
}

TEST_CASE("boundary geodesic between antipodal disk points is a diameter") {
  const auto& map = disk_map();
  const double P = map.domain->perimeter();
  const Polyline g = boundary_geodesic(map, 0.0, P / 2, 64);
  CHECK(dist(g.front(), map.domain->point_at(0.0)) == 0.0);
  CHECK(dist(g.back(), map.domain->point_at(P / 2)) == 0.0);
  const Polyline diam =
      segment(map.domain->point_at(0.0), map.domain->point_at(P / 2));
  CHECK(hausdorff(g, diam) <= 2e-2);
  // Interior samples are strictly inside.
  const auto& v = g.vertices();
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    CHECK(dist_to_boundary(v[i], *map.domain) > 0.0);
}

TEST_CASE("boundary geodesic between opposite square midpoints is the axis") {
  const auto& map = square_map();
  // Midpoint of bottom (s=0.5) to midpoint of top (s=2.5).
  const Polyline g = boundary_geodesic(map, 0.5, 2.5, 64);
  const Polyline axis = segment({0.5, 0.0}, {0.5, 1.0});
  CHECK(hausdorff(g, axis) <= 3e-2);
  CHECK_THROWS_AS(boundary_geodesic(map, 1.25, 1.25, 64), PreconditionError);
}

TEST_CASE("conformal annulus on the disk") {
  const auto& map = disk_map();
  // y = (1,0) has boundary parameter 0.
  const ConformalAnnulus a1 = conformal_annulus(map, 0.0, 1);
  CHECK(!a1.node_ids.empty());
  CHECK(a1.r == doctest::Approx(0.5));
  // Area of the region against the analytic intersection of the annulus
  // (radii 0.25, 0.5 around (1,0)) with the unit disk.
  double area = 0.0;
  for (int t : a1.tri_ids) area += map.mesh->triangle_area(t);
  double exact = 0.0;
  {
    const int N = 4000;
    const double boxr = 0.5;
    const double cell = 2.0 * boxr / N;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const double x = 1.0 - boxr + (i + 0.5) * cell;
        const double y = -boxr + (j + 0.5) * cell;
        const double rho = std::hypot(x - 1.0, y);
        if (rho > 0.25 && rho < 0.5 && x * x + y * y < 1.0)
          exact += cell * cell;
      }
  }
  CHECK(area == doctest::Approx(exact).epsilon(0.10));

  // Nested radii halve by construction.
  const ConformalAnnulus a2 = conformal_annulus(map, 0.0, 2);
  CHECK(a2.r == doctest::Approx(0.5 * a1.r));

  // Too deep for the mesh.
  CHECK_THROWS_AS(conformal_annulus(map, 0.0, 12), UnresolvedScale);
}

TEST_CASE("annulus intersect extracts the expected diameter pieces") {
  const auto& map = disk_map();
  const double P = map.domain->perimeter();
  const Polyline g = boundary_geodesic(map, 0.0, P / 2, 128);
  const ConformalAnnulus a = conformal_annulus(map, 0.0, 2);  // radii 1/8..1/4
  const auto pieces = annulus_intersect(map, a, g);
  REQUIRE(!pieces.empty());
  double len = 0.0;
  for (const auto& p : pieces) len += p.length();
  // Identity map: the diameter meets the band in one segment of length 1/8.
  CHECK(len == doctest::Approx(0.125).epsilon(0.10));
}
