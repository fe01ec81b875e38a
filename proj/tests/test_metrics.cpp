#include "capdual/metrics.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "capdual/shapes.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace capdual;
using namespace capdual::geometry;
using namespace capdual::mesh;
using namespace capdual::metrics;

namespace {

const JordanPolygon& disk_poly() {
  static const JordanPolygon p = shapes::disk(1.0, 256);
  return p;
}
const JordanPolygon& square_poly() {
  static const JordanPolygon p = shapes::unit_square();
  return p;
}
const TriMesh& disk_mesh() {
  static const TriMesh m = triangulate(disk_poly(), 0.02);
  return m;
}
const TriMesh& square_mesh() {
  static const TriMesh m = triangulate(square_poly(), 0.05);
  return m;
}

}  // namespace

TEST_CASE("graph structure: connectivity, positive symmetric weights") {
  const PathGraph g = build_graph(square_poly(), square_mesh(), -0.5);
  CHECK(!g.nodes.empty());
  CHECK_FALSE(g.exponent_warning);
  // Symmetry of stored directed weights.
  for (std::size_t u = 0; u + 1 < g.offsets.size(); ++u)
    for (int k = g.offsets[u]; k < g.offsets[u + 1]; ++k) {
      const int v = g.neighbors[k];
      CHECK(g.weights[k] > 0.0);
      bool found = false;
      for (int k2 = g.offsets[v]; k2 < g.offsets[v + 1]; ++k2)
        if (g.neighbors[k2] == static_cast<int>(u)) {
          CHECK(g.weights[k2] == g.weights[k]);
          found = true;
        }
      CHECK(found);
    }
  const PathGraph gq = build_graph(square_poly(), square_mesh(), -1.0);
  CHECK(gq.exponent_warning);
}

TEST_CASE("subhyperbolic radial oracle in the disk") {
  const PathGraph g = build_graph(disk_poly(), disk_mesh(), -0.5);
  const auto res = subhyperbolic_distance(g, {0.0, 0.0}, {0.9, 0.0});
  const double exact = 2.0 * (1.0 - std::sqrt(0.1));
  CHECK(res.weighted_length == doctest::Approx(exact).epsilon(0.05));
  CHECK(res.snap1 <= 2.0 * g.h);
  CHECK(res.snap2 <= 2.0 * g.h);
  CHECK(res.path.front().x == 0.0);
  CHECK(res.path.back().x == 0.9);
}

TEST_CASE("exponent zero gives the Euclidean shortest path in a convex domain") {
  const PathGraph g = build_graph(square_poly(), square_mesh(), 0.0);
  const Point2 a{0.12, 0.2}, b{0.85, 0.77};
  const auto res = subhyperbolic_distance(g, a, b);
  CHECK(res.weighted_length == doctest::Approx(dist(a, b)).epsilon(0.03));
}

TEST_CASE("coincident query points give zero") {
  const PathGraph g = build_graph(square_poly(), square_mesh(), -0.5);
  const auto res = subhyperbolic_distance(g, {0.4, 0.4}, {0.4, 0.4});
  CHECK(res.weighted_length == 0.0);
  CHECK(res.euclid_length == 0.0);
}

TEST_CASE("quasihyperbolic radial oracle and monotonicity") {
  const PathGraph g = build_graph(disk_poly(), disk_mesh(), -1.0);
  const auto res = quasihyperbolic_distance(g, {0.0, 0.0}, {0.9, 0.0});
  CHECK(res.weighted_length == doctest::Approx(std::log(10.0)).epsilon(0.05));

  const auto ab = quasihyperbolic_distance(g, {0.3, 0.1}, {-0.2, 0.6});
  const auto ba = quasihyperbolic_distance(g, {-0.2, 0.6}, {0.3, 0.1});
  CHECK(ab.weighted_length == doctest::Approx(ba.weighted_length));

  // Value grows toward the boundary along a radius.
  double prev = 0.0;
  for (double r : {0.5, 0.7, 0.9}) {
    const auto v = quasihyperbolic_distance(g, {0.0, 0.0}, {r, 0.0});
    CHECK(v.weighted_length > prev);
    prev = v.weighted_length;
  }
  CHECK_THROWS_AS(
      quasihyperbolic_distance(build_graph(disk_poly(), disk_mesh(), -0.5),
                               {0, 0}, {0.5, 0.0}),
      PreconditionError);
}

TEST_CASE("graph distance is a metric on random triples") {
  const PathGraph g = build_graph(square_poly(), square_mesh(), -0.5);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.15, 0.85);
  for (int i = 0; i < 8; ++i) {
    const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    const double ab = subhyperbolic_distance(g, a, b).graph_length;
    const double ba = subhyperbolic_distance(g, b, a).graph_length;
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    const double bc = subhyperbolic_distance(g, b, c).graph_length;
    const double ac = subhyperbolic_distance(g, a, c).graph_length;
    // Snapped endpoints shift each leg by at most the connector cost, so the
    // triangle inequality holds up to the connector terms; on exact node
    // queries it is tight. Use node positions to make it exact.
    (void)bc;
    (void)ac;
  }
  // Exact triangle inequality on graph nodes.
  std::uniform_int_distribution<int> pick(0, static_cast<int>(g.nodes.size()) - 1);
  for (int i = 0; i < 12; ++i) {
    const Point2 a = g.mesh->nodes[g.nodes[pick(rng)]];
    const Point2 b = g.mesh->nodes[g.nodes[pick(rng)]];
    const Point2 c = g.mesh->nodes[g.nodes[pick(rng)]];
    const double ab = subhyperbolic_distance(g, a, b).graph_length;
    const double bc = subhyperbolic_distance(g, b, c).graph_length;
    const double ac = subhyperbolic_distance(g, a, c).graph_length;
    CHECK(ac <= ab + bc + 1e-9);
  }
}

TEST_CASE("shortcut edges never increase distances") {
  const PathGraph plain = build_graph(square_poly(), square_mesh(), -0.5,
                                      /*shortcuts=*/false);
  const PathGraph with = build_graph(square_poly(), square_mesh(), -0.5);
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> pick(0,
      static_cast<int>(plain.nodes.size()) - 1);
  for (int i = 0; i < 10; ++i) {
    const Point2 a = plain.mesh->nodes[plain.nodes[pick(rng)]];
    const Point2 b = plain.mesh->nodes[plain.nodes[pick(rng)]];
    const double d0 = subhyperbolic_distance(plain, a, b).graph_length;
    const double d1 = subhyperbolic_distance(with, a, b).graph_length;
    CHECK(d1 <= d0 + 1e-12);
  }
}

TEST_CASE("discrete length consistent with quadrature re-integration") {
  const PathGraph g = build_graph(disk_poly(), disk_mesh(), -0.5);
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int i = 0; i < 6; ++i) {
    const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    if (dist(a, b) < 0.2) continue;
    const auto res = subhyperbolic_distance(g, a, b);
    CHECK(res.graph_length ==
          doctest::Approx(res.weighted_length).epsilon(0.02));
  }
}

TEST_CASE("more negative exponents dominate when distances are below one") {
  const PathGraph g1 = build_graph(square_poly(), square_mesh(), -0.75);
  const PathGraph g2 = build_graph(square_poly(), square_mesh(), -0.25);
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  for (int i = 0; i < 6; ++i) {
    const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    if (dist(a, b) < 0.1) continue;
    const double d1 = subhyperbolic_distance(g1, a, b).weighted_length;
    const double d2 = subhyperbolic_distance(g2, a, b).weighted_length;
    CHECK(d1 >= d2 - 1e-12);
  }
}

TEST_CASE("capacity metric: candidates agree within a factor two on the disk") {
  solver::SolverConfig cfg = solver::default_config(1.5);
  const auto res =
      capacity_metric(disk_poly(), {-0.5, 0.0}, {0.5, 0.0}, cfg, 0.1);
  REQUIRE(res.candidates.size() >= 2);
  double lo = 1e300, hi = 0.0;
  for (const auto& [name, v] : res.candidates) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi / lo <= 2.0);
  CHECK(res.value == lo);
}

TEST_CASE("capacity metric degenerates to the point condenser") {
  solver::SolverConfig cfg = solver::default_config(1.5);
  const Point2 z{0.1, 0.05};
  const auto res = capacity_metric(disk_poly(), z, z, cfg, 0.1);
  const auto tiny = solver::curve_capacity(
      disk_poly(), segment(z, z + Point2{1e-4, 0.0}), cfg, 0.1);
  CHECK(res.value == doctest::Approx(tiny.value).epsilon(0.10));
}

TEST_CASE("capacity metric skips the segment candidate outside an L-domain") {
  static const JordanPolygon l = shapes::lshape(2.0);
  solver::SolverConfig cfg = solver::default_config(1.5);
  const auto res = capacity_metric(l, {0.5, 1.5}, {1.5, 0.5}, cfg, 0.1);
  for (const auto& [name, v] : res.candidates) CHECK(name != "segment");
  CHECK(res.value > 0.0);
}
