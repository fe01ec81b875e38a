#pragma once

#include <memory>
#include <vector>

#include "capdual/geometry.hpp"
#include "capdual/mesh.hpp"
#include "capdual/solver.hpp"

namespace capdual::confmap {

using geometry::JordanPolygon;
using geometry::Point2;
using geometry::Polyline;
using mesh::TriMesh;

// Boundary correspondence s -> theta of the map, one row per boundary node,
// sorted by arc-length parameter with theta unwrapped to a single increasing
// branch (total increase 2 pi).
struct BoundaryTable {
  std::vector<double> s;
  std::vector<double> theta;
  std::vector<int> node;
  double perimeter = 0.0;

  double theta_at(double s_query) const;
  bool monotone() const;
  double total_increase() const;
};

// Point location in a triangle soup via a uniform grid.
class PointLocator {
 public:
  PointLocator(std::vector<Point2> nodes,
               std::vector<std::array<int, 3>> tris,
               std::vector<char> usable);
  // Containing triangle and barycentric coordinates, or -1.
  int locate(Point2 p, std::array<double, 3>* bary) const;

 private:
  std::vector<Point2> nodes_;
  std::vector<std::array<int, 3>> tris_;
  std::vector<char> usable_;
  Point2 lo_, hi_;
  int nx_ = 1, ny_ = 1;
  double cw_ = 1.0, ch_ = 1.0;
  std::vector<std::vector<int>> cells_;
};

// Discrete Riemann map phi: Omega -> D realized as exp(-G - i G~) with G the
// Green's function of the domain with pole at the base point.
struct RiemannMap {
  const JordanPolygon* domain = nullptr;
  Point2 base_point;
  std::shared_ptr<const TriMesh> mesh;
  solver::ScalarField green;      // G, zero on the boundary
  solver::ScalarField conjugate;  // G~
  std::vector<Point2> image_nodes;
  std::vector<char> image_tri_valid;  // folded image triangles excluded
  BoundaryTable boundary;
  double h = 0.0;
  double conjugate_closure_error = 0.0;  // edge-consistency diagnostic

  std::shared_ptr<const PointLocator> domain_locator;
  std::shared_ptr<const PointLocator> image_locator;

  // phi(z) by piecewise-linear interpolation; LookupFailure outside the mesh.
  Point2 map_point(Point2 z) const;
  // phi^{-1}(w) by point location in the image triangulation.
  Point2 inverse_point(Point2 w) const;
};

// Builds the map on a fresh mesh of size h (optionally locally refined).
// The base point must be interior with dist(z0, boundary) >= 4h.
RiemannMap build_map(const JordanPolygon& omega, Point2 z0, double h,
                     const std::vector<mesh::RefineRegion>& regions = {});

// Hyperbolic distance via the disk closed form applied to mapped points.
double hyperbolic_distance(const RiemannMap& map, Point2 z1, Point2 z2);

// Geodesic between interior points, n >= 16 samples equidistributed in
// hyperbolic length, pulled back by inverse lookup; endpoints exact.
Polyline hyperbolic_geodesic(const RiemannMap& map, Point2 z1, Point2 z2,
                             int n);

// Geodesic between boundary points given by arc-length parameters; endpoints
// exactly on the boundary, interior samples strictly inside.
Polyline boundary_geodesic(const RiemannMap& map, double y1, double y2, int n);

struct ConformalAnnulus {
  const RiemannMap* map = nullptr;
  Point2 center_boundary_point;
  double center_param = 0.0;
  int k = 0;
  double r = 0.0;  // 2^-k
  Point2 image_center;
  std::vector<int> tri_ids;   // triangles with image centroid in the annulus
  std::vector<int> node_ids;  // nodes with r/2 < |phi - image_center| < r
};

// Preimage of the half-open disk annulus of radii (r/2, r) centered at the
// prevertex of the boundary point y; UnresolvedScale when fewer than 8 mesh
// nodes land in it.
ConformalAnnulus conformal_annulus(const RiemannMap& map, double y, int k);

// Pieces of a curve inside the annulus, split by the image-side radii.
std::vector<Polyline> annulus_intersect(const RiemannMap& map,
                                        const ConformalAnnulus& annulus,
                                        const Polyline& curve);

}  // namespace capdual::confmap
