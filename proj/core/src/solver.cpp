#include "capdual/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "capdual/common.hpp"

namespace capdual::solver {

using geometry::cross;
using geometry::dist;
using geometry::dot;
using geometry::orient;

namespace {

geometry::Point2 rot90(geometry::Point2 v) { return {-v.y, v.x}; }

struct FemCache {
  std::vector<double> area;
  std::vector<std::array<geometry::Point2, 3>> grad;  // shape gradients

  explicit FemCache(const TriMesh& m) {
    const std::size_t nt = m.triangles.size();
    area.resize(nt);
    grad.resize(nt);
    for (std::size_t t = 0; t < nt; ++t) {
      const auto& tr = m.triangles[t];
      const Point2 p0 = m.nodes[tr[0]], p1 = m.nodes[tr[1]],
                   p2 = m.nodes[tr[2]];
      const double a2 = orient(p0, p1, p2);
      if (!(a2 > 0.0)) throw SingularSystem("degenerate triangle in mesh");
      area[t] = 0.5 * a2;
      grad[t][0] = (1.0 / a2) * rot90(p2 - p1);
      grad[t][1] = (1.0 / a2) * rot90(p0 - p2);
      grad[t][2] = (1.0 / a2) * rot90(p1 - p0);
    }
  }

  geometry::Point2 gradient(const TriMesh& m, const std::vector<double>& u,
                            std::size_t t) const {
    const auto& tr = m.triangles[t];
    return u[tr[0]] * grad[t][0] + u[tr[1]] * grad[t][1] +
           u[tr[2]] * grad[t][2];
  }
};

double energy_of(const TriMesh& m, const FemCache& fem,
                 const std::vector<double>& u, double p, double eps) {
  const std::size_t nt = m.triangles.size();
  std::vector<double> terms(nt);
  util::parallel_ranges(nt, [&](std::size_t b, std::size_t e) {
    for (std::size_t t = b; t < e; ++t) {
      const auto g = fem.gradient(m, u, t);
      terms[t] = fem.area[t] * std::pow(eps * eps + dot(g, g), 0.5 * p);
    }
  });
  return util::pairwise_sum(terms);
}

double mesh_diam(const TriMesh& m) {
  if (m.domain != nullptr) return m.domain->diameter();
  Point2 lo{1e300, 1e300}, hi{-1e300, -1e300};
  for (const auto& n : m.nodes) {
    lo = {std::min(lo.x, n.x), std::min(lo.y, n.y)};
    hi = {std::max(hi.x, n.x), std::max(hi.y, n.y)};
  }
  return dist(lo, hi);
}

}  // namespace

void SolverConfig::validate() const {
  require(p > 1.0 && std::isfinite(p), "solver exponent must satisfy p > 1");
  require(tol_energy > 0.0 && tol_field > 0.0, "tolerances must be positive");
  require(max_iters >= 1, "max_iters must be at least 1");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    require(eps_schedule[i] > 0.0, "eps schedule must be positive");
    if (i > 0)
      require(eps_schedule[i] < eps_schedule[i - 1],
              "eps schedule must be decreasing");
  }
}

SolverConfig default_config(double p) {
  SolverConfig cfg;
  cfg.p = p;
  return cfg;
}

double conjugate_exponent(double p) {
  require(p > 1.0, "conjugate exponent needs p > 1");
  return p / (p - 1.0);
}

bool conjugate_pair_valid(double p, double q) {
  return std::abs(1.0 / p + 1.0 / q - 1.0) <= 1e-12;
}

double p_energy(const ScalarField& u, double p, double eps) {
  require(u.mesh != nullptr, "field without mesh");
  require(u.values.size() == u.mesh->nodes.size(),
          "field needs one value per node");
  require(p > 1.0 && eps >= 0.0, "p_energy needs p > 1 and eps >= 0");
  for (double v : u.values)
    require(std::isfinite(v), "field value not finite");
  const FemCache fem(*u.mesh);
  return energy_of(*u.mesh, fem, u.values, p, eps);
}

CapacityResult minimize_values(
    const TriMesh& mesh, const std::vector<std::pair<int, double>>& dirichlet,
    const SolverConfig& cfg_in) {
  SolverConfig cfg = cfg_in;
  cfg.validate();
  const int nn = static_cast<int>(mesh.nodes.size());
  require(!dirichlet.empty(), "minimize needs Dirichlet data");

  std::vector<double> fixed_value(nn,
                                  std::numeric_limits<double>::quiet_NaN());
  double dmin = 1e300, dmax = -1e300;
  for (const auto& [i, v] : dirichlet) {
    require(i >= 0 && i < nn, "Dirichlet node out of range");
    require(std::isfinite(v), "Dirichlet value not finite");
    if (!std::isnan(fixed_value[i]))
      throw PreconditionError("Dirichlet sets share a node");
    fixed_value[i] = v;
    dmin = std::min(dmin, v);
    dmax = std::max(dmax, v);
  }

  const FemCache fem(mesh);

  CapacityResult res;
  res.h = mesh.h;
  res.p = cfg.p;
  res.field.mesh = &mesh;
  res.field.values.assign(nn, 0.0);
  std::vector<double>& u = res.field.values;
  for (int i = 0; i < nn; ++i)
    if (!std::isnan(fixed_value[i])) u[i] = fixed_value[i];

  // All Dirichlet values equal: the constant field is the minimizer.
  if (dmax - dmin == 0.0) {
    std::fill(u.begin(), u.end(), dmax);
    res.value = 0.0;
    res.converged = true;
    return res;
  }

  // Free-node indexing.
  std::vector<int> free_idx(nn, -1);
  int nf = 0;
  for (int i = 0; i < nn; ++i)
    if (std::isnan(fixed_value[i])) free_idx[i] = nf++;

  if (cfg.eps_schedule.empty()) {
    const double scale = 1.0 / std::max(mesh_diam(mesh), 1e-12);
    for (int k = 1; k <= 6; ++k)
      cfg.eps_schedule.push_back(std::pow(10.0, -k) * scale);
  }
  if (cfg.p == 2.0) cfg.eps_schedule = {cfg.eps_schedule.back()};

  // Sparse pattern: assemble once, then refill values per iteration.
  using Sp = Eigen::SparseMatrix<double>;
  Sp K(nf, nf);
  {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.triangles.size() * 9);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      const auto& tr = mesh.triangles[t];
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const int ia = free_idx[tr[a]], ib = free_idx[tr[b]];
          if (ia >= 0 && ib >= 0) trip.emplace_back(ia, ib, 0.0);
        }
    }
    K.setFromTriplets(trip.begin(), trip.end());
    K.makeCompressed();
  }
  // Offsets into K.valuePtr() per triangle entry.
  struct Entry {
    int offset;
    int a, b;  // local vertex indices
  };
  struct FixedEntry {
    int row;   // free equation
    int a, b;  // local indices: a free, b fixed
  };
  std::vector<std::vector<Entry>> tri_entries(mesh.triangles.size());
  std::vector<std::vector<FixedEntry>> tri_fixed(mesh.triangles.size());
  const auto find_offset = [&](int row, int col) {
    const int start = K.outerIndexPtr()[col];
    const int end = K.outerIndexPtr()[col + 1];
    const auto* inner = K.innerIndexPtr();
    const auto* lo = std::lower_bound(inner + start, inner + end, row);
    return static_cast<int>(lo - inner);
  };
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    for (int a = 0; a < 3; ++a) {
      const int ia = free_idx[tr[a]];
      if (ia < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int ib = free_idx[tr[b]];
        if (ib >= 0)
          tri_entries[t].push_back({find_offset(ia, ib), a, b});
        else
          tri_fixed[t].push_back({ia, a, b});
      }
    }
  }

  Eigen::SimplicialLDLT<Sp> ldlt;
  bool analyzed = false;

  std::vector<double> weights(mesh.triangles.size(), 1.0);
  Eigen::VectorXd rhs(nf), x(nf);

  const double field_scale = dmax - dmin;
  int total_iters = 0;
  bool all_converged = true;
  double max_residual = 0.0;

  const auto solve_weighted = [&]() {
    double* kv = K.valuePtr();
    std::fill(kv, kv + K.nonZeros(), 0.0);
    rhs.setZero();
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      const double w = weights[t] * fem.area[t];
      const auto& g = fem.grad[t];
      for (const auto& e : tri_entries[t])
        kv[e.offset] += w * dot(g[e.a], g[e.b]);
      const auto& tr = mesh.triangles[t];
      for (const auto& e : tri_fixed[t])
        rhs[e.row] -= w * dot(g[e.a], g[e.b]) * fixed_value[tr[e.b]];
    }
    if (!analyzed) {
      ldlt.analyzePattern(K);
      analyzed = true;
    }
    ldlt.factorize(K);
    if (ldlt.info() != Eigen::Success)
      throw SingularSystem("weighted stiffness factorization failed");
    x = ldlt.solve(rhs);
    // Iterative refinement to push the relative residual below 1e-10.
    const double bn = rhs.norm();
    if (bn > 0.0) {
      for (int pass = 0; pass < 3; ++pass) {
        const Eigen::VectorXd r = rhs - K * x;
        if (r.norm() / bn <= 1e-12) break;
        x += ldlt.solve(r);
      }
      const Eigen::VectorXd r = rhs - K * x;
      max_residual = std::max(max_residual, r.norm() / bn);
    }
  };

  for (double eps : cfg.eps_schedule) {
    bool stage_done = false;
    int small_decrements = 0;
    while (!stage_done) {
      if (total_iters >= cfg.max_iters) {
        all_converged = false;
        break;
      }
      // Weights from the current iterate.
      util::parallel_ranges(
          mesh.triangles.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t t = b; t < e; ++t) {
              const auto g = fem.gradient(mesh, u, t);
              weights[t] =
                  std::pow(eps * eps + dot(g, g), 0.5 * (cfg.p - 2.0));
            }
          });
      solve_weighted();
      ++total_iters;

      std::vector<double> v = u;
      for (int i = 0; i < nn; ++i)
        if (free_idx[i] >= 0) v[i] = x[free_idx[i]];

      const double e_u = energy_of(mesh, fem, u, cfg.p, eps);
      double e_v = energy_of(mesh, fem, v, cfg.p, eps);
      double step = 1.0;
      while (e_v > e_u && step > 1e-10) {
        step *= 0.5;
        for (int i = 0; i < nn; ++i)
          if (free_idx[i] >= 0)
            v[i] = u[i] + step * (x[free_idx[i]] - u[i]);
        e_v = energy_of(mesh, fem, v, cfg.p, eps);
      }
      if (e_v > e_u) {
        stage_done = true;  // no descent left at this eps
        break;
      }
      double du = 0.0;
      for (int i = 0; i < nn; ++i) du = std::max(du, std::abs(v[i] - u[i]));
      u = std::move(v);
      res.energy_history.push_back(e_v);
      if (cfg.p == 2.0) {
        stage_done = true;  // linear problem, one solve suffices
        continue;
      }
      const double decrement =
          std::abs(e_u - e_v) / std::max(std::abs(e_v), 1e-300);
      small_decrements = decrement <= cfg.tol_energy ? small_decrements + 1 : 0;
      if (decrement <= cfg.tol_energy &&
          (du <= cfg.tol_field * field_scale || small_decrements >= 4))
        stage_done = true;
    }
    if (total_iters >= cfg.max_iters && !stage_done) break;
  }

  res.iterations = total_iters;
  res.converged = all_converged && total_iters <= cfg.max_iters;
  res.final_residual = max_residual;
  res.value = energy_of(mesh, fem, u, cfg.p, 0.0);
  return res;
}

CapacityResult minimize(
    const TriMesh& mesh,
    const std::vector<std::pair<NodeSet, double>>& dirichlet,
    const SolverConfig& cfg) {
  require(dirichlet.size() >= 2, "minimize needs at least two Dirichlet sets");
  std::vector<std::pair<int, double>> flat;
  for (const auto& [set, value] : dirichlet)
    for (int i : set.indices) flat.emplace_back(i, value);
  return minimize_values(mesh, flat, cfg);
}

namespace {

bool arcs_overlap(const BoundaryArc& a, const BoundaryArc& b) {
  return a.contains(b.s_start) || a.contains(b.s_end) ||
         b.contains(a.s_start) || b.contains(a.s_end);
}

std::vector<mesh::RefineRegion> endpoint_regions(
    const JordanPolygon& omega, std::initializer_list<double> params,
    double h) {
  std::vector<mesh::RefineRegion> regions;
  for (double s : params) {
    const Point2 c = omega.point_at(s);
    regions.push_back(
        {[c, h](Point2 p) { return dist(p, c) <= 3.0 * h; }, h / 4.0});
  }
  return regions;
}

}  // namespace

CapacityResult capacity(const JordanPolygon& omega, const BoundaryArc& E,
                        const BoundaryArc& F, const SolverConfig& cfg,
                        double h) {
  require(E.domain == &omega && F.domain == &omega,
          "arcs must belong to the domain");
  require(!arcs_overlap(E, F), "Dirichlet arcs overlap");
  const auto regions =
      endpoint_regions(omega, {E.s_start, E.s_end, F.s_start, F.s_end}, h);
  auto m = std::make_shared<TriMesh>(mesh::triangulate(omega, h, regions));
  const NodeSet tag_e = mesh::tag_arc(*m, E);
  const NodeSet tag_f = mesh::tag_arc(*m, F);
  CapacityResult res = minimize(*m, {{tag_e, 1.0}, {tag_f, 0.0}}, cfg);
  res.mesh_storage = m;
  return res;
}

CapacityResult curve_capacity(const JordanPolygon& omega,
                              const Polyline& gamma, const SolverConfig& cfg,
                              double h) {
  const auto& v = gamma.vertices();
  for (const auto& p : v)
    require(geometry::point_in_domain(p, omega) &&
                geometry::dist_to_boundary(p, omega) > 0.0,
            "curve must stay strictly inside the domain");
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    require(geometry::segment_in_domain(v[i], v[i + 1], omega),
            "curve must stay strictly inside the domain");

  std::vector<mesh::RefineRegion> regions;
  const Polyline* gp = &gamma;
  regions.push_back({[gp, h](Point2 p) {
                       const auto& w = gp->vertices();
                       for (std::size_t i = 0; i + 1 < w.size(); ++i)
                         if (geometry::segment_point_distance(w[i], w[i + 1],
                                                              p) <= 2.0 * h)
                           return true;
                       return false;
                     },
                     h / 3.0});
  auto m = std::make_shared<TriMesh>(mesh::triangulate(omega, h, regions));
  NodeSet plate = mesh::tag_near_curve(*m, gamma, h);
  plate.label = "curve";
  const NodeSet bnd = mesh::tag_boundary(*m);
  CapacityResult res = minimize(*m, {{plate, 1.0}, {bnd, 0.0}}, cfg);
  res.mesh_storage = m;
  return res;
}

double point_capacity(double q, double d, double eps, double box_size) {
  require(q > 2.0, "point capacity needs q > 2");
  require(eps > 0.0 && eps < d / 4.0, "need 0 < eps < d/4");
  require(box_size >= 8.0 * d, "box must be at least 8d");
  const double b = 0.5 * box_size;
  const JordanPolygon box({{-b, -b}, {b, -b}, {b, b}, {-b, b}});
  const Point2 c1{-0.5 * d, 0.0}, c2{0.5 * d, 0.0};
  const double h0 = box_size / 24.0;
  std::vector<mesh::RefineRegion> regions;
  for (const Point2 c : {c1, c2})
    regions.push_back(
        {[c, eps](Point2 p) { return dist(p, c) <= 4.0 * eps; }, eps / 3.0});
  const TriMesh m = mesh::triangulate(box, h0, regions);
  NodeSet e1 = mesh::tag_near_point(m, c1, eps, "plate1");
  NodeSet e2 = mesh::tag_near_point(m, c2, eps, "plate2");
  require(e1.indices.size() >= 3 && e2.indices.size() >= 3,
          "plates unresolved; refine");
  SolverConfig cfg = default_config(q);
  return minimize(m, {{e1, 1.0}, {e2, 0.0}}, cfg).value;
}

double richardson(double value_h, double value_h_half, double rate) {
  require(rate > 0.0, "richardson rate must be positive");
  return value_h_half + (value_h_half - value_h) / (std::pow(2.0, rate) - 1.0);
}

}  // namespace capdual::solver
