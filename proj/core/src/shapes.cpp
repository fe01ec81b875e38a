#include "capdual/shapes.hpp"

#include <cmath>
#include <numbers>

namespace capdual::geometry::shapes {

using std::numbers::pi;

JordanPolygon rectangle(double w, double h) {
  require(w > 0.0 && h > 0.0, "rectangle sides must be positive");
  return JordanPolygon({{0.0, 0.0}, {w, 0.0}, {w, h}, {0.0, h}});
}

JordanPolygon disk(double radius, int n, Point2 center) {
  require(radius > 0.0 && n >= 3, "disk needs radius > 0 and n >= 3");
  std::vector<Point2> v;
  v.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * pi * i / n;
    v.push_back({center.x + radius * std::cos(a),
                 center.y + radius * std::sin(a)});
  }
  return JordanPolygon(std::move(v));
}

JordanPolygon lshape(double s) {
  require(s > 0.0, "lshape scale must be positive");
  const double h = 0.5 * s;
  return JordanPolygon(
      {{0.0, 0.0}, {s, 0.0}, {s, h}, {h, h}, {h, s}, {0.0, s}});
}

Ring ring(double r, double R, int n, double slit_half_angle) {
  require(0.0 < r && r < R, "ring needs 0 < r < R");
  require(n >= 8, "ring circles need n >= 8");
  require(slit_half_angle > 0.0 && slit_half_angle < pi / 4.0,
          "slit half angle out of range");
  const double a0 = slit_half_angle;
  const double a1 = 2.0 * pi - slit_half_angle;
  std::vector<Point2> v;
  // Outer circle counterclockwise from a0 to a1, then inner circle clockwise.
  const int m = n;
  for (int i = 0; i <= m; ++i) {
    const double a = a0 + (a1 - a0) * i / m;
    v.push_back({R * std::cos(a), R * std::sin(a)});
  }
  for (int i = 0; i <= m; ++i) {
    const double a = a1 - (a1 - a0) * i / m;
    v.push_back({r * std::cos(a), r * std::sin(a)});
  }
  Ring out{JordanPolygon(std::move(v)), 0, 0, 0, 0, slit_half_angle};
  const auto& cum = out.polygon.cum_length();
  // Vertices 0..m trace the outer arc, m+1..2m+2 the inner arc.
  out.outer_start = cum[0];
  out.outer_end = cum[m];
  out.inner_start = cum[m + 1];
  out.inner_end = cum[2 * m + 1];
  return out;
}

JordanPolygon spike_square(double aspect, double depth) {
  require(aspect > 1.0, "spike aspect must exceed 1");
  require(depth > 0.0 && depth < 1.0, "spike depth must lie in (0,1)");
  const double w = depth / aspect;
  require(w < 0.5, "spike mouth too wide");
  return JordanPolygon({{0.0, 0.0},
                        {1.0, 0.0},
                        {1.0, 1.0},
                        {0.5 + 0.5 * w, 1.0},
                        {0.5, 1.0 - depth},
                        {0.5 - 0.5 * w, 1.0},
                        {0.0, 1.0}});
}

}  // namespace capdual::geometry::shapes
