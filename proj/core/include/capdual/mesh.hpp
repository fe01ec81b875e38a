#pragma once

#include <array>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "capdual/geometry.hpp"

namespace capdual::mesh {

using geometry::JordanPolygon;
using geometry::Point2;
using geometry::Polyline;

// Conforming triangulation of a Jordan polygon. Triangles are
// counterclockwise and cover the polygon exactly; every boundary edge of the
// triangulation lies on the polygon boundary.
struct TriMesh {
  std::vector<Point2> nodes;
  std::vector<std::array<int, 3>> triangles;
  // Node index -> arc-length parameter for nodes on the domain boundary.
  std::unordered_map<int, double> boundary_params;
  // Edges lying on the domain boundary (node index pairs, unordered).
  std::vector<std::array<int, 2>> domain_boundary_edges;
  double h = 0.0;  // max edge length
  const JordanPolygon* domain = nullptr;

  bool is_boundary_node(int i) const {
    return boundary_params.find(i) != boundary_params.end();
  }
  double triangle_area(int t) const;
  double total_area() const;
  double max_edge_length() const;
  double min_angle_deg() const;
  // Unique undirected edges (a<b), sorted lexicographically.
  std::vector<std::array<int, 2>> edges() const;
  // neighbors[t][e]: triangle across edge (tri[e], tri[(e+1)%3]) or -1.
  std::vector<std::array<int, 3>> triangle_neighbors() const;
};

struct NodeSet {
  std::vector<int> indices;  // sorted, unique
  std::string label;
};

struct MeshOptions {
  double min_angle_deg = 10.0;
  std::size_t max_nodes = 4'000'000;
  int quality_rounds = 60;
};

// Ear-clipping triangulation refined by longest-edge bisection with Delaunay
// edge flips until every edge is at most h and the minimum angle bound holds.
// Duplicate and collinear input vertices are merged with tolerance
// 1e-12 * diam before meshing.
TriMesh triangulate(const JordanPolygon& omega, double h,
                    const MeshOptions& opts = {});

// Same as triangulate but with additional local size targets: every edge
// intersecting region(p) must be at most local_h.
struct RefineRegion {
  std::function<bool(Point2)> region;
  double local_h;
};
TriMesh triangulate(const JordanPolygon& omega, double h,
                    const std::vector<RefineRegion>& regions,
                    const MeshOptions& opts = {});

// Refines an existing mesh so edges intersecting the region have length
// <= mesh.h / factor. Conformity and the angle bound are preserved.
TriMesh refine_near(const TriMesh& mesh,
                    const std::function<bool(Point2)>& region, double factor,
                    const MeshOptions& opts = {});

// Boundary nodes whose arc-length parameter lies in the closed arc.
NodeSet tag_arc(const TriMesh& mesh, const geometry::BoundaryArc& arc);

// All boundary nodes.
NodeSet tag_boundary(const TriMesh& mesh);

// Interior nodes within `radius` of the curve; must form an edge-connected
// set along the curve.
NodeSet tag_near_curve(const TriMesh& mesh, const Polyline& curve,
                       double radius);

// Interior nodes within `radius` of a point.
NodeSet tag_near_point(const TriMesh& mesh, Point2 center, double radius,
                       const std::string& label);

// Extracts the submesh formed by the listed triangles. Boundary parameters
// and domain-boundary edges are inherited; node indices are compacted.
struct Submesh {
  TriMesh mesh;
  std::vector<int> node_map;    // submesh node -> parent node
  std::vector<int> parent_tri;  // submesh triangle -> parent triangle
};
Submesh extract_submesh(const TriMesh& mesh, const std::vector<int>& tris);

// Refines every edge of a (sub)mesh to at most h. Edges on the submesh rim
// are bisected in place, so the covered region is unchanged.
TriMesh refine_all(const TriMesh& mesh, double h, const MeshOptions& opts = {});

}  // namespace capdual::mesh
