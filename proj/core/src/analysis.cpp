#include "capdual/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "capdual/mesh.hpp"

namespace capdual::analysis {

using geometry::dist;
using geometry::dist_to_boundary;
using geometry::point_in_domain;
using geometry::segment_in_domain;
using mesh::NodeSet;
using mesh::TriMesh;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

solver::SolverConfig analysis_config(double p) {
  solver::SolverConfig cfg = solver::default_config(p);
  cfg.tol_energy = 1e-9;
  return cfg;
}

}  // namespace

// ---------------------------------------------------------------------------
// Duality

DualityReport duality_check(const JordanPolygon& omega,
                            const Quadrilateral& quad, double p, double h) {
  require(p > 1.0, "duality needs 1 < p < infinity");
  DualityReport rep;
  rep.p = p;
  rep.q = solver::conjugate_exponent(p);
  rep.h = h;
  for (int i = 0; i < 4; ++i) rep.cuts[i] = quad.arcs[i].s_start;

  // One mesh refined near all four cut points serves both condensers.
  std::vector<mesh::RefineRegion> regions;
  for (int i = 0; i < 4; ++i) {
    const Point2 c = omega.point_at(quad.arcs[i].s_start);
    regions.push_back(
        {[c, h](Point2 z) { return dist(z, c) <= 3.0 * h; }, h / 4.0});
  }
  const TriMesh m = mesh::triangulate(omega, h, regions);
  std::array<NodeSet, 4> tags;
  for (int i = 0; i < 4; ++i) tags[i] = mesh::tag_arc(m, quad.arcs[i]);
  // Each solve pairs opposite arcs, which share no cut node.

  const auto r13 =
      solver::minimize(m, {{tags[0], 1.0}, {tags[2], 0.0}}, analysis_config(p));
  const auto r24 = solver::minimize(m, {{tags[1], 1.0}, {tags[3], 0.0}},
                                    analysis_config(rep.q));
  rep.cap_13 = r13.value;
  rep.cap_24 = r24.value;
  rep.converged = r13.converged && r24.converged;
  rep.product = std::pow(rep.cap_13, 1.0 / p) * std::pow(rep.cap_24, 1.0 / rep.q);
  rep.deviation = std::abs(rep.product - 1.0);
  return rep;
}

DualityReport duality_check_richardson(const JordanPolygon& omega,
                                       const Quadrilateral& quad, double p,
                                       double h) {
  const DualityReport coarse = duality_check(omega, quad, p, 2.0 * h);
  DualityReport rep = duality_check(omega, quad, p, h);
  rep.cap_13 = solver::richardson(coarse.cap_13, rep.cap_13);
  rep.cap_24 = solver::richardson(coarse.cap_24, rep.cap_24);
  rep.converged = rep.converged && coarse.converged;
  rep.product =
      std::pow(rep.cap_13, 1.0 / rep.p) * std::pow(rep.cap_24, 1.0 / rep.q);
  rep.deviation = std::abs(rep.product - 1.0);
  rep.richardson = true;
  return rep;
}

// ---------------------------------------------------------------------------
// Pair sampling

std::vector<std::pair<Point2, Point2>> sample_pairs(const JordanPolygon& omega,
                                                    int count,
                                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Point2 lo = omega.bbox_min(), hi = omega.bbox_max();
  std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y);
  const double margin = 0.12 * omega.diameter();
  const double min_sep = 0.25 * omega.diameter();
  const auto draw = [&]() -> Point2 {
    for (int it = 0; it < 100000; ++it) {
      const Point2 z{ux(rng), uy(rng)};
      if (point_in_domain(z, omega) && dist_to_boundary(z, omega) >= margin)
        return z;
    }
    throw PreconditionError("pair sampling failed: domain margin too strict");
  };
  std::vector<std::pair<Point2, Point2>> pairs;
  pairs.reserve(count);
  while (static_cast<int>(pairs.size()) < count) {
    const Point2 a = draw();
    const Point2 b = draw();
    if (dist(a, b) < min_sep) continue;
    pairs.emplace_back(a, b);
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Comparability

namespace {

struct ComparabilityContext {
  const JordanPolygon* omega;
  double p, h;
  std::shared_ptr<TriMesh> mesh;
  confmap::RiemannMap map;
  metrics::PathGraph graph;

  ComparabilityContext(const JordanPolygon& om, double p_in, double h_in)
      : omega(&om), p(p_in), h(h_in) {
    map = confmap::build_map(om, metrics::default_base_point(om, 4.0 * h_in),
                             h_in);
    graph = metrics::build_graph(om, *map.mesh, 1.0 - p_in);
  }

  ComparabilityRow run_pair(Point2 z1, Point2 z2) const {
    require(dist(z1, z2) > 0.0, "comparability needs distinct points");
    require(point_in_domain(z1, *omega) && point_in_domain(z2, *omega),
            "comparability needs interior points");
    ComparabilityRow row;
    row.z1 = z1;
    row.z2 = z2;
    const solver::SolverConfig cfg = analysis_config(p);

    const Polyline geo = confmap::hyperbolic_geodesic(map, z1, z2, 65);
    row.cap_geodesic = solver::curve_capacity(*omega, geo, cfg, h).value;
    row.weighted_integral =
        geometry::weighted_length(geo, *omega, 1.0 - p);
    row.d_p = metrics::subhyperbolic_distance(graph, z1, z2).weighted_length;

    // Best-of-three: reuse the geodesic condenser value.
    double best = row.cap_geodesic;
    std::string winner = "hyperbolic_geodesic";
    {
      const auto path = metrics::subhyperbolic_distance(graph, z1, z2);
      if (path.path.size() >= 2) {
        const double v =
            solver::curve_capacity(*omega, Polyline(path.path), cfg, h).value;
        if (v < best) {
          best = v;
          winner = "subhyperbolic_path";
        }
      }
      if (segment_in_domain(z1, z2, *omega)) {
        const double v = solver::curve_capacity(
                             *omega, geometry::segment(z1, z2), cfg, h)
                             .value;
        if (v < best) {
          best = v;
          winner = "segment";
        }
      }
    }
    row.d_cap = best;
    row.dcap_winner = winner;

    const std::array<double, 4> qs{row.cap_geodesic, row.d_p, row.d_cap,
                                   row.weighted_integral};
    double lo = qs[0], hi = qs[0];
    for (double v : qs) {
      require(v > 0.0 && std::isfinite(v),
              "comparability quantity not positive finite");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    row.max_ratio = hi / lo;
    return row;
  }
};

}  // namespace

ComparabilityReport comparability_report(const JordanPolygon& omega, Point2 z1,
                                         Point2 z2, double p, double h) {
  require(p > 1.0 && p < 2.0, "comparability needs 1 < p < 2");
  ComparabilityContext ctx(omega, p, h);
  ComparabilityReport rep;
  rep.p = p;
  rep.h = h;
  rep.rows.push_back(ctx.run_pair(z1, z2));
  rep.max_ratio = rep.rows.front().max_ratio;
  return rep;
}

ComparabilityReport comparability_batch(
    const JordanPolygon& omega,
    const std::vector<std::pair<Point2, Point2>>& pairs, double p, double h) {
  require(p > 1.0 && p < 2.0, "comparability needs 1 < p < 2");
  ComparabilityContext ctx(omega, p, h);
  ComparabilityReport rep;
  rep.p = p;
  rep.h = h;
  rep.max_ratio = 0.0;
  for (const auto& [a, b] : pairs) {
    rep.rows.push_back(ctx.run_pair(a, b));
    rep.max_ratio = std::max(rep.max_ratio, rep.rows.back().max_ratio);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Annuli

namespace {

double polyline_diameter(const Polyline& poly) {
  const auto& v = poly.vertices();
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      d = std::max(d, dist(v[i], v[j]));
  return d;
}

double polyline_boundary_distance(const Polyline& poly,
                                  const JordanPolygon& omega) {
  double d = std::numeric_limits<double>::infinity();
  const auto& v = poly.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    d = std::min(d, dist_to_boundary(v[i], omega));
    if (i + 1 < v.size())
      d = std::min(d, dist_to_boundary(0.5 * (v[i] + v[i + 1]), omega));
  }
  return d;
}

// The geodesic piece inside A(y_endpoint, 2^-k), nearest that endpoint.
Polyline annulus_piece(const confmap::RiemannMap& map,
                       const confmap::ConformalAnnulus& annulus,
                       const Polyline& geodesic, int endpoint) {
  const auto pieces = confmap::annulus_intersect(map, annulus, geodesic);
  if (pieces.empty())
    throw UnresolvedScale("geodesic does not meet the annulus");
  return endpoint == 1 ? pieces.front() : pieces.back();
}

}  // namespace

std::vector<AnnulusRecord> annuli_report(const confmap::RiemannMap& map,
                                         const Polyline& geodesic, int k_max) {
  require(k_max >= 1, "annuli report needs k_max >= 1");
  const JordanPolygon& omega = *map.domain;
  const std::array<double, 2> params{
      omega.nearest_boundary_param(geodesic.front()),
      omega.nearest_boundary_param(geodesic.back())};

  std::vector<AnnulusRecord> out;
  for (int endpoint = 1; endpoint <= 2; ++endpoint) {
    std::vector<double> lengths(k_max + 2, kNaN);
    for (int k = 1; k <= k_max + 1; ++k) {
      try {
        const auto annulus =
            confmap::conformal_annulus(map, params[endpoint - 1], k);
        const Polyline piece = annulus_piece(map, annulus, geodesic, endpoint);
        lengths[k] = piece.length();
        if (k <= k_max) {
          AnnulusRecord rec;
          rec.endpoint = endpoint;
          rec.k = k;
          rec.len = lengths[k];
          rec.diam = polyline_diameter(piece);
          rec.dist_boundary = polyline_boundary_distance(piece, omega);
          out.push_back(rec);
        }
      } catch (const UnresolvedScale&) {
        break;  // deeper scales are unresolved as well; truncate
      }
    }
    for (auto& rec : out) {
      if (rec.endpoint == endpoint && rec.k + 1 <= k_max + 1)
        rec.len_next = lengths[rec.k + 1];
    }
  }
  return out;
}

double annulus_lower_bound_check(const confmap::RiemannMap& map,
                                 const Polyline& geodesic, int endpoint, int k,
                                 double p, double h) {
  require(endpoint == 1 || endpoint == 2, "endpoint must be 1 or 2");
  require(p > 1.0 && p < 2.0, "annulus lower bound needs 1 < p < 2");
  const JordanPolygon& omega = *map.domain;
  const double y = endpoint == 1
                       ? omega.nearest_boundary_param(geodesic.front())
                       : omega.nearest_boundary_param(geodesic.back());
  const auto annulus = confmap::conformal_annulus(map, y, k);
  const Polyline piece = annulus_piece(map, annulus, geodesic, endpoint);

  auto sub = mesh::extract_submesh(*map.mesh, annulus.tri_ids);
  mesh::MeshOptions opts;
  opts.min_angle_deg = 10.0;
  const TriMesh refined = mesh::refine_all(sub.mesh, h, opts);

  NodeSet plate = mesh::tag_near_curve(refined, piece, refined.h);
  plate.label = "geodesic_piece";
  NodeSet zero;
  zero.label = "domain_boundary";
  for (const auto& [i, s] : refined.boundary_params)
    zero.indices.push_back(i);
  std::sort(zero.indices.begin(), zero.indices.end());
  if (zero.indices.empty())
    throw UnresolvedScale("annulus does not touch the domain boundary");

  const auto res =
      solver::minimize(refined, {{plate, 1.0}, {zero, 0.0}},
                       analysis_config(p));
  const double denom = std::pow(piece.length(), 2.0 - p);
  require(denom > 0.0, "degenerate geodesic piece");
  return res.value / denom;
}

// ---------------------------------------------------------------------------
// Curve condition

CurveConditionReport curve_condition_check(const JordanPolygon& omega,
                                           double q, int n_pairs,
                                           std::uint64_t seed, double h,
                                           bool literal_statement_exponent) {
  require(q > 2.0, "curve condition needs q > 2");
  CurveConditionReport rep;
  rep.q = q;
  rep.p = q / (q - 1.0);
  rep.exponent = literal_statement_exponent ? 1.0 / (q - 1.0)
                                            : 1.0 - rep.p;  // = 1/(1-q)
  rep.literal_statement_exponent = literal_statement_exponent;
  rep.h = h;
  rep.seed = seed;
  rep.requested_pairs = n_pairs;
  const double sep_power = (q - 2.0) / (q - 1.0);

  // Shared infrastructure. The conformal map can fail on extreme geometry;
  // the graph routes keep the check alive and skips are counted.
  const TriMesh m = mesh::triangulate(omega, h);
  const metrics::PathGraph graph =
      metrics::build_graph(omega, m, rep.exponent);
  bool have_map = true;
  confmap::RiemannMap map;
  try {
    map = confmap::build_map(omega, metrics::default_base_point(omega, 4.0 * h),
                             h);
  } catch (const Error&) {
    have_map = false;
    ++rep.skipped_candidates;
  }

  const auto weighted = [&](const Polyline& curve) {
    return geometry::weighted_length(curve, omega, rep.exponent);
  };

  const auto eval_pair = [&](Point2 x1, Point2 x2, bool boundary_pair) {
    CurveConditionRow row;
    row.z1 = x1;
    row.z2 = x2;
    row.boundary_pair = boundary_pair;
    row.separation_power = std::pow(dist(x1, x2), sep_power);
    double best = std::numeric_limits<double>::infinity();
    std::string route = "none";
    const auto consider = [&](const char* name, double value) {
      if (std::isfinite(value) && value < best) {
        best = value;
        route = name;
      }
    };

    if (!boundary_pair) {
      const double d1 = dist_to_boundary(x1, omega);
      const double d2 = dist_to_boundary(x2, omega);
      if (2.0 * dist(x1, x2) <= std::max(d1, d2) &&
          segment_in_domain(x1, x2, omega)) {
        consider("segment", weighted(geometry::segment(x1, x2)));
      } else {
        // alpha = [x1,z1] + boundary geodesic + [z2,x2].
        if (have_map) {
          try {
            const double s1 = omega.nearest_boundary_param(x1);
            const double s2 = omega.nearest_boundary_param(x2);
            const Polyline mid = confmap::boundary_geodesic(map, s1, s2, 64);
            Polyline alpha =
                geometry::segment(x1, mid.front()).concat(mid).concat(
                    geometry::segment(mid.back(), x2));
            consider("boundary_route", weighted(alpha));
          } catch (const Error&) {
            ++rep.skipped_candidates;
          }
        }
      }
      if (have_map) {
        try {
          consider("hyperbolic_geodesic",
                   weighted(confmap::hyperbolic_geodesic(map, x1, x2, 65)));
        } catch (const Error&) {
          ++rep.skipped_candidates;
        }
      }
    } else if (have_map) {
      try {
        const double s1 = omega.nearest_boundary_param(x1);
        const double s2 = omega.nearest_boundary_param(x2);
        consider("boundary_geodesic",
                 weighted(confmap::boundary_geodesic(map, s1, s2, 64)));
      } catch (const Error&) {
        ++rep.skipped_candidates;
      }
    }
    // Graph route works for interior and boundary pairs alike.
    try {
      const auto path = metrics::subhyperbolic_distance(graph, x1, x2);
      if (path.path.size() >= 2) consider("graph_path", path.weighted_length);
    } catch (const Error&) {
      ++rep.skipped_candidates;
    }

    require(std::isfinite(best), "no admissible curve candidate for a pair");
    row.best_weighted_length = best;
    row.route = route;
    row.ratio = best / row.separation_power;
    rep.rows.push_back(row);
  };

  // Seeded interior pairs with a milder margin than the comparability
  // sampler (the curve condition concerns all interior pairs).
  {
    std::mt19937_64 rng(seed);
    const Point2 lo = omega.bbox_min(), hi = omega.bbox_max();
    std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y);
    const double margin = 0.05 * omega.diameter();
    const double min_sep = 0.05 * omega.diameter();
    const auto draw = [&]() -> Point2 {
      for (int it = 0; it < 200000; ++it) {
        const Point2 z{ux(rng), uy(rng)};
        if (point_in_domain(z, omega) && dist_to_boundary(z, omega) >= margin)
          return z;
      }
      throw PreconditionError("curve-condition sampling failed");
    };
    for (int i = 0; i < n_pairs; ++i) {
      Point2 a = draw(), b = draw();
      while (dist(a, b) < min_sep) b = draw();
      eval_pair(a, b, false);
    }
  }

  // Deterministic boundary pairs: midpoints of the polygon sides (capped to
  // eight evenly spaced boundary points on fine polygons).
  {
    std::vector<double> params;
    if (omega.size() <= 24) {
      for (std::size_t i = 0; i < omega.size(); ++i)
        params.push_back(0.5 * (omega.cum_length()[i] +
                                omega.cum_length()[i + 1]));
    } else {
      for (int i = 0; i < 8; ++i)
        params.push_back(omega.perimeter() * i / 8.0);
    }
    for (std::size_t i = 0; i < params.size(); ++i)
      for (std::size_t j = i + 1; j < params.size(); ++j) {
        const Point2 a = omega.point_at(params[i]);
        const Point2 b = omega.point_at(params[j]);
        if (dist(a, b) == 0.0) continue;
        eval_pair(a, b, true);
      }
  }

  rep.sup_ratio = 0.0;
  for (const auto& row : rep.rows)
    rep.sup_ratio = std::max(rep.sup_ratio, row.ratio);
  return rep;
}

// ---------------------------------------------------------------------------
// Gehring-Osgood

GehringOsgoodReport gehring_osgood_check(const JordanPolygon& omega,
                                         int sample_count, std::uint64_t seed,
                                         double h) {
  GehringOsgoodReport rep;
  rep.h = h;
  rep.seed = seed;
  rep.requested_pairs = sample_count;

  const confmap::RiemannMap map = confmap::build_map(
      omega, metrics::default_base_point(omega, 4.0 * h), h);

  std::mt19937_64 rng(seed);
  const Point2 lo = omega.bbox_min(), hi = omega.bbox_max();
  std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y);
  const double margin = 0.02 * omega.diameter();
  const auto draw = [&]() -> Point2 {
    for (int it = 0; it < 200000; ++it) {
      const Point2 z{ux(rng), uy(rng)};
      if (point_in_domain(z, omega) && dist_to_boundary(z, omega) >= margin)
        return z;
    }
    throw PreconditionError("gehring-osgood sampling failed");
  };

  for (int i = 0; i < sample_count; ++i) {
    const Point2 a = draw(), b = draw();
    const double d1 = dist_to_boundary(a, omega);
    const double d2 = dist_to_boundary(b, omega);
    if (dist(a, b) < 4.0 * std::min(d1, d2)) {
      ++rep.excluded_pairs;
      continue;  // relatively-near pair: outside the remark's regime
    }
    GehringOsgoodRow row;
    row.z1 = a;
    row.z2 = b;
    const Polyline geo = confmap::hyperbolic_geodesic(map, a, b, 65);
    row.integral = geometry::weighted_length(geo, omega, -1.0);
    row.log_term = std::log(1.0 + dist(a, b) / std::min(d1, d2));
    row.ratio = row.integral / row.log_term;
    rep.rows.push_back(row);
  }
  rep.sup_ratio = 0.0;
  for (const auto& row : rep.rows)
    rep.sup_ratio = std::max(rep.sup_ratio, row.ratio);
  return rep;
}

}  // namespace capdual::analysis
