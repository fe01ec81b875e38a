#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "capdual/common.hpp"

namespace capdual::geometry {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }
inline bool finite(Point2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

// Twice the signed area of triangle (a,b,c); > 0 when counterclockwise.
inline double orient(Point2 a, Point2 b, Point2 c) {
  return cross(b - a, c - a);
}

double segment_point_distance(Point2 a, Point2 b, Point2 p);
bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d);

// Open polygonal curve with at least two vertices.
class Polyline {
 public:
  explicit Polyline(std::vector<Point2> vertices);
  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  Point2 front() const { return vertices_.front(); }
  Point2 back() const { return vertices_.back(); }
  double length() const;
  // Appends `tail` whose first vertex must coincide with back().
  Polyline concat(const Polyline& tail) const;

 private:
  std::vector<Point2> vertices_;
};

Polyline segment(Point2 a, Point2 b);

namespace detail {
class EdgeGrid;
}

// Simple closed polygon, counterclockwise, positive area. The computational
// stand-in for a Jordan domain; smooth boundaries are approximated by the
// caller with fine polygons.
class JordanPolygon {
 public:
  explicit JordanPolygon(std::vector<Point2> vertices);

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  double perimeter() const { return cum_length_.back(); }
  double area() const { return area_; }
  double diameter() const { return diameter_; }  // bounding-box diagonal
  Point2 bbox_min() const { return bbox_min_; }
  Point2 bbox_max() const { return bbox_max_; }
  Point2 centroid() const;

  // Cumulative arc length at each vertex; size n+1, front 0, back perimeter.
  const std::vector<double>& cum_length() const { return cum_length_; }
  double vertex_param(std::size_t i) const { return cum_length_[i]; }
  // Point at arc-length parameter s (wrapped into [0, perimeter)).
  Point2 point_at(double s) const;
  double wrap(double s) const;
  // Arc-length parameter of the boundary point nearest to z.
  double nearest_boundary_param(Point2 z) const;

  const detail::EdgeGrid& grid() const { return *grid_; }

 private:
  std::vector<Point2> vertices_;
  std::vector<double> cum_length_;
  double area_ = 0.0;
  double diameter_ = 0.0;
  Point2 bbox_min_, bbox_max_;
  std::shared_ptr<const detail::EdgeGrid> grid_;
};

// Counterclockwise boundary arc from s_start to s_end (wrapping allowed).
struct BoundaryArc {
  const JordanPolygon* domain = nullptr;
  double s_start = 0.0;
  double s_end = 0.0;

  double length() const;
  // Closed containment with a small parameter slack for node matching.
  bool contains(double s) const;
};

struct Quadrilateral {
  std::array<BoundaryArc, 4> arcs;
};

// Exact Euclidean distance from z to the closed polygonal boundary.
double dist_to_boundary(Point2 z, const JordanPolygon& omega);

// Strict interior test by the crossing-number rule; boundary points are
// reported as outside.
bool point_in_domain(Point2 z, const JordanPolygon& omega);

// True when the open segment (a,b) stays inside the closed domain, endpoints
// allowed on the boundary.
bool segment_in_domain(Point2 a, Point2 b, const JordanPolygon& omega);

// Cheap certificate that no boundary edge comes near the segment (no
// boundary edge registered in the grid cells it traverses).
bool segment_clear_of_boundary(Point2 a, Point2 b, const JordanPolygon& omega);

// Line integral of dist(z, boundary)^exponent along the polyline, adaptive
// per-segment Simpson with relative tolerance 1e-6; negative exponents use
// geometric subdivision clustering toward near-boundary endpoints.
double weighted_length(const Polyline& curve, const JordanPolygon& omega,
                       double exponent);

// Splits the boundary at four strictly increasing (mod perimeter) cut
// parameters into four counterclockwise arcs starting from cuts[0].
Quadrilateral split_boundary(const JordanPolygon& omega,
                             const std::array<double, 4>& cuts);

}  // namespace capdual::geometry
