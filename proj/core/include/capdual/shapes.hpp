#pragma once

#include "capdual/geometry.hpp"

namespace capdual::geometry::shapes {

// Axis-aligned rectangle [0,w] x [0,h], counterclockwise from the origin.
JordanPolygon rectangle(double w, double h);

inline JordanPolygon unit_square() { return rectangle(1.0, 1.0); }

// Regular n-gon inscribed in the circle of given radius around the center;
// vertex 0 at angle 0.
JordanPolygon disk(double radius, int n, Point2 center = {0.0, 0.0});

// L-shaped hexagon (0,0),(s,0),(s,s/2),(s/2,s/2),(s/2,s),(0,s) scaled by s.
JordanPolygon lshape(double s = 2.0);

// Annulus r < |z| < R realized as a Jordan domain by removing the radial
// wedge |arg z| < slit_half_angle; both circles are n-gons. The radial
// minimizer of the ring condenser is preserved, so the ring capacity of the
// slit domain equals (1 - slit_half_angle/pi) times the full-ring value.
struct Ring {
  JordanPolygon polygon;
  // Boundary arcs spanning the inner and outer circle portions.
  double inner_start = 0.0, inner_end = 0.0;
  double outer_start = 0.0, outer_end = 0.0;
  double slit_half_angle = 0.0;
};
Ring ring(double r, double R, int n, double slit_half_angle = 0.01);

// Unit square with a triangular spike cut inward from the top side:
// mouth width = depth / aspect, tip at (0.5, 1 - depth).
JordanPolygon spike_square(double aspect, double depth = 0.8);

}  // namespace capdual::geometry::shapes
