#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "capdual/confmap.hpp"
#include "capdual/geometry.hpp"
#include "capdual/metrics.hpp"
#include "capdual/solver.hpp"

namespace capdual::analysis {

using geometry::JordanPolygon;
using geometry::Point2;
using geometry::Polyline;
using geometry::Quadrilateral;

// ---------------------------------------------------------------------------
// Duality identity: Cap_p(a1,a3)^(1/p) * Cap_q(a2,a4)^(1/q) = 1.

struct DualityReport {
  double p = 0.0, q = 0.0;
  double cap_13 = 0.0, cap_24 = 0.0;
  double product = 0.0;
  double deviation = 0.0;  // |product - 1|
  double h = 0.0;
  std::array<double, 4> cuts{};
  bool converged = true;
  bool richardson = false;
};

DualityReport duality_check(const JordanPolygon& omega,
                            const Quadrilateral& quad, double p, double h);

// Same check with both capacities Richardson-extrapolated from sizes 2h, h.
DualityReport duality_check_richardson(const JordanPolygon& omega,
                                       const Quadrilateral& quad, double p,
                                       double h);

// ---------------------------------------------------------------------------
// Comparability of the four quantities along the hyperbolic geodesic.

struct ComparabilityRow {
  Point2 z1, z2;
  double cap_geodesic = 0.0;      // Cap_p(gamma, boundary; Omega)
  double d_p = 0.0;               // subhyperbolic graph distance
  double d_cap = 0.0;             // best-of-three capacity metric
  double weighted_integral = 0.0; // integral of dist^(1-p) along gamma
  double max_ratio = 0.0;
  std::string dcap_winner;
};

struct ComparabilityReport {
  double p = 0.0, h = 0.0;
  std::uint64_t seed = 0;
  std::vector<ComparabilityRow> rows;
  double max_ratio = 0.0;
};

// Seeded interior pair sampler shared by the checks: points at least
// 0.12*diam from the boundary and 0.25*diam apart.
std::vector<std::pair<Point2, Point2>> sample_pairs(const JordanPolygon& omega,
                                                    int count,
                                                    std::uint64_t seed);

ComparabilityReport comparability_report(const JordanPolygon& omega, Point2 z1,
                                         Point2 z2, double p, double h);

// Shares the mesh, conformal map, and path graph across all pairs.
ComparabilityReport comparability_batch(
    const JordanPolygon& omega,
    const std::vector<std::pair<Point2, Point2>>& pairs, double p, double h);

// ---------------------------------------------------------------------------
// Conformal annuli along a boundary geodesic.

struct AnnulusRecord {
  int endpoint = 0;  // 1 or 2
  int k = 0;
  double diam = 0.0;
  double dist_boundary = 0.0;
  double len = 0.0;
  double len_next = 0.0;  // NaN when scale k+1 is unresolved
};

// Per endpoint and scale k <= k_max, the measured quantities of the geodesic
// piece inside the conformal annulus; unresolved scales truncate the list.
std::vector<AnnulusRecord> annuli_report(const confmap::RiemannMap& map,
                                         const Polyline& geodesic, int k_max);

// Minimal p-energy of the annulus condenser (u=1 near the geodesic piece,
// u=0 on the domain boundary inside the annulus), divided by len^(2-p).
double annulus_lower_bound_check(const confmap::RiemannMap& map,
                                 const Polyline& geodesic, int endpoint, int k,
                                 double p, double h);

// ---------------------------------------------------------------------------
// Extension-domain curve condition (q > 2).

struct CurveConditionRow {
  Point2 z1, z2;
  double best_weighted_length = 0.0;
  double separation_power = 0.0;  // |z1-z2|^((q-2)/(q-1))
  double ratio = 0.0;
  std::string route;
  bool boundary_pair = false;
};

struct CurveConditionReport {
  double q = 0.0, p = 0.0, exponent = 0.0, h = 0.0;
  std::uint64_t seed = 0;
  int requested_pairs = 0;
  int skipped_candidates = 0;
  bool literal_statement_exponent = false;
  std::vector<CurveConditionRow> rows;
  double sup_ratio = 0.0;
};

// For seeded interior pairs plus deterministic boundary-midpoint pairs,
// the minimal weighted length over candidate curves divided by
// |z1-z2|^((q-2)/(q-1)). The integrand exponent follows the proof line
// (1-p = 1/(1-q)); the literal flag switches to the statement's printed
// 1/(q-1) for comparison.
CurveConditionReport curve_condition_check(const JordanPolygon& omega,
                                           double q, int sample_pairs,
                                           std::uint64_t seed, double h,
                                           bool literal_statement_exponent =
                                               false);

// ---------------------------------------------------------------------------
// Gehring-Osgood quasidisk ratio (p = q = 2 remark).

struct GehringOsgoodRow {
  Point2 z1, z2;
  double integral = 0.0;
  double log_term = 0.0;
  double ratio = 0.0;
};

struct GehringOsgoodReport {
  double h = 0.0;
  std::uint64_t seed = 0;
  int requested_pairs = 0;
  int excluded_pairs = 0;  // pairs failing the relatively-far filter
  std::vector<GehringOsgoodRow> rows;
  double sup_ratio = 0.0;
};

// Sup over relatively-far pairs of the quasihyperbolic integral along the
// hyperbolic geodesic divided by log(1 + |z1-z2| / min boundary distance).
GehringOsgoodReport gehring_osgood_check(const JordanPolygon& omega,
                                         int sample_pairs, std::uint64_t seed,
                                         double h);

}  // namespace capdual::analysis
