#include "capdual/mesh.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "capdual/shapes.hpp"
#include "doctest.h"

using namespace capdual;
using namespace capdual::geometry;
using namespace capdual::mesh;

TEST_CASE("triangulate unit square coarse") {
  const JordanPolygon sq = shapes::unit_square();
  const TriMesh m = triangulate(sq, 0.5);
  CHECK(m.triangles.size() >= 8);
  CHECK(m.max_edge_length() <= 0.5 + 1e-12);
  CHECK(m.min_angle_deg() >= 10.0);
  CHECK(m.total_area() == doctest::Approx(sq.area()).epsilon(1e-10));
  for (std::size_t t = 0; t < m.triangles.size(); ++t)
    CHECK(m.triangle_area(static_cast<int>(t)) > 0.0);
  // Original corners survive as mesh nodes.
  for (const Point2 v : sq.vertices()) {
    bool found = false;
    for (const Point2 n : m.nodes)
      if (n.x == v.x && n.y == v.y) found = true;
    CHECK(found);
  }
}

TEST_CASE("node count grows like h^-2") {
  const JordanPolygon sq = shapes::unit_square();
  const auto n1 = triangulate(sq, 0.1).nodes.size();
  const auto n2 = triangulate(sq, 0.05).nodes.size();
  const double ratio = static_cast<double>(n2) / (4.0 * n1);
  CHECK(ratio >= 0.25);
  CHECK(ratio <= 4.0);
}

TEST_CASE("collinear input vertices are merged silently") {
  const JordanPolygon degen({{0, 0}, {0.5, 0.0}, {1, 0}, {1, 1}, {0, 1}});
  const TriMesh m = triangulate(degen, 0.5);
  CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(m.min_angle_deg() >= 10.0);
}

TEST_CASE("disk and ring and spike meshes satisfy the contracts") {
  const JordanPolygon disk = shapes::disk(1.0, 256);
  const TriMesh dm = triangulate(disk, 0.15);
  CHECK(dm.max_edge_length() <= 0.15 + 1e-12);
  CHECK(dm.min_angle_deg() >= 10.0);
  CHECK(dm.total_area() == doctest::Approx(disk.area()).epsilon(1e-10));

  const auto ring = shapes::ring(0.5, 1.0, 128, 0.02);
  const TriMesh rm = triangulate(ring.polygon, 0.1);
  CHECK(rm.min_angle_deg() >= 10.0);
  CHECK(rm.total_area() == doctest::Approx(ring.polygon.area()).epsilon(1e-10));

  const JordanPolygon spike = shapes::spike_square(30.0);
  const TriMesh sm = triangulate(spike, 0.1);
  CHECK(sm.min_angle_deg() >= 10.0);
  CHECK(sm.total_area() == doctest::Approx(spike.area()).epsilon(1e-10));
}

TEST_CASE("boundary params follow the polygon parametrization") {
  const JordanPolygon sq = shapes::unit_square();
  const TriMesh m = triangulate(sq, 0.25);
  for (const auto& [i, s] : m.boundary_params) {
    const Point2 p = sq.point_at(s);
    CHECK(dist(p, m.nodes[i]) <= 1e-12);
  }
}

TEST_CASE("tag_arc counts and errors") {
  const JordanPolygon sq = shapes::unit_square();
  const TriMesh m = triangulate(sq, 0.25);
  const BoundaryArc bottom{&sq, 0.0, 1.0};
  const NodeSet set = tag_arc(m, bottom);
  CHECK(set.indices.size() == 5);

  const BoundaryArc all{&sq, 0.0, 4.0};
  CHECK(tag_arc(m, all).indices.size() == m.boundary_params.size());

  const BoundaryArc tiny{&sq, 0.1, 0.12};
  CHECK_THROWS_AS(tag_arc(m, tiny), EmptyTag);
}

TEST_CASE("quadrilateral tags are disjoint except at the cuts") {
  const JordanPolygon sq = shapes::unit_square();
  const TriMesh m = triangulate(sq, 0.25);
  const auto quad = split_boundary(sq, {0.0, 1.0, 2.0, 3.0});
  std::array<NodeSet, 4> tags;
  for (int i = 0; i < 4; ++i) tags[i] = tag_arc(m, quad.arcs[i]);
  for (int i = 0; i < 4; ++i) {
    std::set<int> a(tags[i].indices.begin(), tags[i].indices.end());
    const auto& b = tags[(i + 1) % 4].indices;
    int shared = 0;
    for (int idx : b) shared += a.count(idx);
    CHECK(shared == 1);  // exactly the cut node
    const auto& opp = tags[(i + 2) % 4].indices;
    int shared_opp = 0;
    for (int idx : opp) shared_opp += a.count(idx);
    CHECK(shared_opp == 0);
  }
}

TEST_CASE("tag_near_curve") {
  const JordanPolygon sq = shapes::unit_square();
  const TriMesh m = triangulate(sq, 0.25);
  const Polyline mid = segment({0.2, 0.5}, {0.8, 0.5});
  const NodeSet rows = tag_near_curve(m, mid, m.h);
  CHECK(rows.indices.size() >= 3);
  for (int i : rows.indices) CHECK_FALSE(m.is_boundary_node(i));

  const Polyline tinyc = segment({0.5, 0.5}, {0.52, 0.5});
  CHECK(tag_near_curve(m, tinyc, 2 * m.h).indices.size() >= 1);

  const Polyline off = segment({0.31, 0.47}, {0.33, 0.47});
  CHECK_THROWS_AS(tag_near_curve(m, off, 0.0), DisconnectedTag);
}

TEST_CASE("refine_near shrinks edges in the region only") {
  const JordanPolygon sq = shapes::unit_square();
  const TriMesh m = triangulate(sq, 0.25);
  const Point2 c{0.5, 0.5};
  const TriMesh fine = refine_near(
      m, [&](Point2 p) { return dist(p, c) <= 0.2; }, 4.0);
  CHECK(fine.min_angle_deg() >= 10.0);
  CHECK(fine.total_area() == doctest::Approx(1.0).epsilon(1e-10));
  double worst_inside = 0.0;
  for (const auto& tr : fine.triangles) {
    for (int e = 0; e < 3; ++e) {
      const Point2 a = fine.nodes[tr[e]];
      const Point2 b = fine.nodes[tr[(e + 1) % 3]];
      const Point2 mid = 0.5 * (a + b);
      if (dist(a, c) <= 0.2 && dist(b, c) <= 0.2 && dist(mid, c) <= 0.2)
        worst_inside = std::max(worst_inside, dist(a, b));
    }
  }
  CHECK(worst_inside <= 0.25 / 4.0 + 1e-12);
  CHECK(fine.nodes.size() > m.nodes.size());
}

TEST_CASE("submesh extraction inherits boundary data") {
  const JordanPolygon sq = shapes::unit_square();
  const TriMesh m = triangulate(sq, 0.25);
  std::vector<int> lower;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tr = m.triangles[t];
    const Point2 c = (1.0 / 3.0) *
                     (m.nodes[tr[0]] + m.nodes[tr[1]] + m.nodes[tr[2]]);
    if (c.y < 0.5) lower.push_back(static_cast<int>(t));
  }
  const Submesh sub = extract_submesh(m, lower);
  CHECK(sub.mesh.triangles.size() == lower.size());
  CHECK(sub.mesh.total_area() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(!sub.mesh.boundary_params.empty());
  const TriMesh finer = refine_all(sub.mesh, 0.1);
  CHECK(finer.max_edge_length() <= 0.1 + 1e-12);
  CHECK(finer.total_area() == doctest::Approx(0.5).epsilon(1e-9));
}
