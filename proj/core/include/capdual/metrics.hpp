#pragma once

#include <string>
#include <utility>
#include <vector>

#include "capdual/confmap.hpp"
#include "capdual/geometry.hpp"
#include "capdual/mesh.hpp"
#include "capdual/solver.hpp"

namespace capdual::metrics {

using geometry::JordanPolygon;
using geometry::Point2;
using geometry::Polyline;
using mesh::TriMesh;

// Weighted neighbor graph over interior mesh nodes; edge weight
// |a-b| * (w(a)+w(b))/2 with w(z) = dist(z, boundary)^exponent.
struct PathGraph {
  const TriMesh* mesh = nullptr;
  const JordanPolygon* domain = nullptr;
  double exponent = 0.0;
  bool exponent_warning = false;  // outside (-1, 1]
  std::vector<int> nodes;         // mesh node ids, interior only
  std::vector<int> graph_of_mesh;  // mesh node -> graph index or -1
  std::vector<int> offsets;        // CSR adjacency
  std::vector<int> neighbors;
  std::vector<double> weights;
  std::vector<double> node_weight;  // dist^exponent per graph node
  double h = 0.0;

  int snap(Point2 z, double* snap_dist) const;
};

// Mesh edges between interior nodes plus two-hop shortcut edges that pass
// the interior test; Disconnected when the interior graph splits.
PathGraph build_graph(const JordanPolygon& omega, const TriMesh& mesh,
                      double exponent, bool shortcuts = true);

struct PathResult {
  std::vector<Point2> path;  // polyline vertices; single point when z1 == z2
  double weighted_length = 0.0;  // quadrature re-integration (authoritative)
  double graph_length = 0.0;     // discrete edge-sum diagnostic
  double euclid_length = 0.0;
  double exponent = 0.0;
  double snap1 = 0.0, snap2 = 0.0;
};

// Shortest weighted path between the snapped query points; the reported
// weighted length re-integrates the returned polyline with the adaptive
// quadrature. Snap distances beyond 2h are refused.
PathResult subhyperbolic_distance(const PathGraph& graph, Point2 z1, Point2 z2);

// The exponent -1 specialization.
PathResult quasihyperbolic_distance(const PathGraph& graph, Point2 z1,
                                    Point2 z2);

// Centroid of the polygon, replaced by a deep interior point when the
// centroid is outside or within clearance of the boundary.
Point2 default_base_point(const JordanPolygon& omega, double clearance);

struct CapacityMetricContext {
  const confmap::RiemannMap* map = nullptr;  // reused when provided
  const PathGraph* graph = nullptr;          // exponent 1-p graph
};

struct CapacityMetricResult {
  double value = 0.0;
  std::vector<Point2> curve;  // polyline vertices of the winning candidate
  std::string winner;
  std::vector<std::pair<std::string, double>> candidates;
};

// Best-of-three upper bound for the capacity metric: minimal
// Cap_p(gamma, boundary; Omega) over the hyperbolic geodesic, the
// subhyperbolic graph geodesic, and the straight segment when it stays
// inside the domain.
CapacityMetricResult capacity_metric(const JordanPolygon& omega, Point2 z1,
                                     Point2 z2,
                                     const solver::SolverConfig& cfg, double h,
                                     const CapacityMetricContext& ctx = {});

}  // namespace capdual::metrics
