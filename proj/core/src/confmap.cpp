#include "capdual/confmap.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <numbers>
#include <unordered_map>
#include <unordered_set>

namespace capdual::confmap {

using geometry::cross;
using geometry::dist;
using geometry::dot;
using geometry::orient;
using std::numbers::pi;

namespace {

using Cx = std::complex<double>;

Cx to_cx(Point2 p) { return {p.x, p.y}; }
Point2 to_pt(Cx z) { return {z.real(), z.imag()}; }

Point2 rot90(Point2 v) { return {-v.y, v.x}; }

// Signed turn of z - z0 along the straight edge a -> b.
double arg_increment(Point2 z0, Point2 a, Point2 b) {
  const Point2 u = a - z0, v = b - z0;
  return std::atan2(cross(u, v), dot(u, v));
}

}  // namespace

// ---------------------------------------------------------------------------
// BoundaryTable

double BoundaryTable::theta_at(double s_query) const {
  require(!s.empty(), "empty boundary table");
  double q = std::fmod(s_query, perimeter);
  if (q < 0.0) q += perimeter;
  const auto it = std::lower_bound(s.begin(), s.end(), q);
  const std::size_t hi = static_cast<std::size_t>(it - s.begin());
  if (hi == 0) {
    // Between the last node (wrapped) and the first.
    const double s0 = s.back() - perimeter, t0 = theta.back() - 2.0 * pi;
    const double t = (q - s0) / (s.front() - s0);
    return t0 + t * (theta.front() - t0);
  }
  if (hi == s.size()) {
    const double s1 = s.front() + perimeter, t1 = theta.front() + 2.0 * pi;
    const double t = (q - s.back()) / (s1 - s.back());
    return theta.back() + t * (t1 - theta.back());
  }
  const double t = (q - s[hi - 1]) / (s[hi] - s[hi - 1]);
  return theta[hi - 1] + t * (theta[hi] - theta[hi - 1]);
}

bool BoundaryTable::monotone() const {
  for (std::size_t i = 1; i < theta.size(); ++i)
    if (theta[i] < theta[i - 1]) return false;
  return true;
}

double BoundaryTable::total_increase() const {
  if (theta.size() < 2) return 0.0;
  // Angle swept across the seam from the last node back to the first.
  double closing = std::fmod(theta.front() + 2.0 * pi - theta.back(), 2.0 * pi);
  if (closing < 0.0) closing += 2.0 * pi;
  return theta.back() - theta.front() + closing;
}

// ---------------------------------------------------------------------------
// PointLocator

PointLocator::PointLocator(std::vector<Point2> nodes,
                           std::vector<std::array<int, 3>> tris,
                           std::vector<char> usable)
    : nodes_(std::move(nodes)), tris_(std::move(tris)),
      usable_(std::move(usable)) {
  lo_ = {1e300, 1e300};
  hi_ = {-1e300, -1e300};
  for (const auto& p : nodes_) {
    lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y)};
    hi_ = {std::max(hi_.x, p.x), std::max(hi_.y, p.y)};
  }
  const double pad = 1e-9 * (dist(lo_, hi_) + 1.0);
  lo_ = {lo_.x - pad, lo_.y - pad};
  hi_ = {hi_.x + pad, hi_.y + pad};
  const int n = std::clamp(
      static_cast<int>(std::sqrt(static_cast<double>(tris_.size() / 2 + 1))),
      8, 512);
  nx_ = ny_ = n;
  cw_ = (hi_.x - lo_.x) / nx_;
  ch_ = (hi_.y - lo_.y) / ny_;
  cells_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (std::size_t t = 0; t < tris_.size(); ++t) {
    if (!usable_.empty() && !usable_[t]) continue;
    Point2 tlo{1e300, 1e300}, thi{-1e300, -1e300};
    for (int v : tris_[t]) {
      tlo = {std::min(tlo.x, nodes_[v].x), std::min(tlo.y, nodes_[v].y)};
      thi = {std::max(thi.x, nodes_[v].x), std::max(thi.y, nodes_[v].y)};
    }
    const int i0 = std::clamp(static_cast<int>((tlo.x - lo_.x) / cw_), 0,
                              nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((thi.x - lo_.x) / cw_), 0,
                              nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((tlo.y - lo_.y) / ch_), 0,
                              ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((thi.y - lo_.y) / ch_), 0,
                              ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        cells_[static_cast<std::size_t>(j) * nx_ + i].push_back(
            static_cast<int>(t));
  }
}

int PointLocator::locate(Point2 p, std::array<double, 3>* bary) const {
  if (p.x < lo_.x || p.y < lo_.y || p.x > hi_.x || p.y > hi_.y) return -1;
  const int ci = std::clamp(static_cast<int>((p.x - lo_.x) / cw_), 0, nx_ - 1);
  const int cj = std::clamp(static_cast<int>((p.y - lo_.y) / ch_), 0, ny_ - 1);
  const auto& cell = cells_[static_cast<std::size_t>(cj) * nx_ + ci];
  for (int t : cell) {
    const auto& tr = tris_[t];
    const Point2 a = nodes_[tr[0]], b = nodes_[tr[1]], c = nodes_[tr[2]];
    const double den = orient(a, b, c);
    if (den <= 0.0) continue;
    const double l0 = orient(p, b, c) / den;
    const double l1 = orient(a, p, c) / den;
    const double l2 = 1.0 - l0 - l1;
    const double slack = -1e-9;
    if (l0 >= slack && l1 >= slack && l2 >= slack) {
      if (bary != nullptr) *bary = {l0, l1, l2};
      return t;
    }
  }
  return -1;
}

// ---------------------------------------------------------------------------
// RiemannMap evaluation

Point2 RiemannMap::map_point(Point2 z) const {
  std::array<double, 3> bary;
  const int t = domain_locator->locate(z, &bary);
  if (t < 0) throw LookupFailure("point outside the meshed domain");
  const auto& tr = mesh->triangles[t];
  Point2 w{0.0, 0.0};
  for (int i = 0; i < 3; ++i) w = w + bary[i] * image_nodes[tr[i]];
  return w;
}

Point2 RiemannMap::inverse_point(Point2 w) const {
  std::array<double, 3> bary;
  const int t = image_locator->locate(w, &bary);
  if (t < 0)
    throw LookupFailure("image point outside the image triangulation");
  const auto& tr = mesh->triangles[t];
  Point2 z{0.0, 0.0};
  for (int i = 0; i < 3; ++i) z = z + bary[i] * mesh->nodes[tr[i]];
  return z;
}

// ---------------------------------------------------------------------------
// build_map

RiemannMap build_map(const JordanPolygon& omega, Point2 z0, double h,
                     const std::vector<mesh::RefineRegion>& regions) {
  require(h > 0.0, "mesh size must be positive");
  require(geometry::point_in_domain(z0, omega),
          "base point must be strictly interior");
  require(geometry::dist_to_boundary(z0, omega) >= 4.0 * h,
          "base point too close to the boundary: need dist >= 4h");

  RiemannMap map;
  map.domain = &omega;
  map.h = h;
  auto mesh_ptr =
      std::make_shared<TriMesh>(mesh::triangulate(omega, h, regions));
  const TriMesh& m = *mesh_ptr;
  map.mesh = mesh_ptr;
  const int nn = static_cast<int>(m.nodes.size());

  map.domain_locator = std::make_shared<PointLocator>(m.nodes, m.triangles,
                                                      std::vector<char>{});

  // Keep the pole strictly inside a triangle, away from nodes and edges; the
  // displacement stays far below discretization error.
  for (int attempt = 0; attempt < 16; ++attempt) {
    std::array<double, 3> bary;
    const int t0 = map.domain_locator->locate(z0, &bary);
    if (t0 < 0) throw LookupFailure("base point not found in the mesh");
    const auto& tr = m.triangles[t0];
    const Point2 a = m.nodes[tr[0]], b = m.nodes[tr[1]], c = m.nodes[tr[2]];
    double clearance = std::min({geometry::segment_point_distance(a, b, z0),
                                 geometry::segment_point_distance(b, c, z0),
                                 geometry::segment_point_distance(c, a, z0)});
    if (clearance > 1e-4 * h) break;
    Point2 dir = (1.0 / 3.0) * (a + b + c) - z0;
    const double dn = norm(dir);
    dir = dn > 0.0 ? (1.0 / dn) * dir : Point2{1.0, 0.0};
    z0 = z0 + (3e-4 * h) * dir;
  }
  map.base_point = z0;

  // Harmonic correction w with boundary data log|z - z0|.
  std::vector<std::pair<int, double>> bc;
  bc.reserve(m.boundary_params.size());
  {
    std::vector<int> bnodes;
    for (const auto& [i, s] : m.boundary_params) bnodes.push_back(i);
    std::sort(bnodes.begin(), bnodes.end());
    for (int i : bnodes) bc.emplace_back(i, std::log(dist(m.nodes[i], z0)));
  }
  solver::SolverConfig cfg = solver::default_config(2.0);
  const auto laplace = solver::minimize_values(m, bc, cfg);
  const std::vector<double>& w = laplace.field.values;

  // G = -log|z - z0| + w; zero on the boundary by construction.
  map.green.mesh = mesh_ptr.get();
  map.green.values.resize(nn);
  for (int i = 0; i < nn; ++i) {
    const double r = dist(m.nodes[i], z0);
    require(r > 0.0, "mesh node coincides with the base point");
    map.green.values[i] = w[i] - std::log(r);
  }
  {
    double gmin = 1e300;
    for (double g : map.green.values) gmin = std::min(gmin, g);
    if (gmin < -1e-6)
      throw BranchFailure("Green function negative beyond tolerance");
  }

  // Continuous branch of arg(z - z0) along a BFS tree of mesh edges from the
  // boundary node with the smallest parameter.
  int ref = -1;
  {
    double best = 1e300;
    for (const auto& [i, s] : m.boundary_params)
      if (s < best || (s == best && i < ref)) {
        best = s;
        ref = i;
      }
  }
  require(ref >= 0, "mesh has no boundary nodes");

  std::vector<std::vector<int>> adj(nn);
  for (const auto& e : m.edges()) {
    adj[e[0]].push_back(e[1]);
    adj[e[1]].push_back(e[0]);
  }
  const double z0_clearance = 1e-9 * omega.diameter();
  std::vector<double> theta(nn, std::numeric_limits<double>::quiet_NaN());
  {
    std::deque<int> fifo;
    theta[ref] = std::atan2(m.nodes[ref].y - z0.y, m.nodes[ref].x - z0.x);
    fifo.push_back(ref);
    while (!fifo.empty()) {
      const int u = fifo.front();
      fifo.pop_front();
      for (int v : adj[u]) {
        if (!std::isnan(theta[v])) continue;
        if (geometry::segment_point_distance(m.nodes[u], m.nodes[v], z0) <=
            z0_clearance)
          continue;  // edge passes through the pole; reach v another way
        theta[v] = theta[u] + arg_increment(z0, m.nodes[u], m.nodes[v]);
        fifo.push_back(v);
      }
    }
    for (int i = 0; i < nn; ++i)
      if (std::isnan(theta[i]))
        throw BranchFailure("angle branch could not reach every node");
  }

  // Cycle check: the turn of z - z0 around any triangle must vanish unless
  // the triangle contains the pole (then it is exactly 2 pi).
  {
    int pole_tris = 0;
    for (const auto& tr : m.triangles) {
      const double closure = arg_increment(z0, m.nodes[tr[0]], m.nodes[tr[1]]) +
                             arg_increment(z0, m.nodes[tr[1]], m.nodes[tr[2]]) +
                             arg_increment(z0, m.nodes[tr[2]], m.nodes[tr[0]]);
      if (std::abs(closure) <= 1e-4) continue;
      if (std::abs(closure - 2.0 * pi) <= 1e-4) {
        ++pole_tris;
        continue;
      }
      throw BranchFailure("mesh cycle not enclosing the pole deviates");
    }
    if (pole_tris != 1)
      throw BranchFailure("pole containment ambiguous in the triangulation");
  }

  // Single-valued conjugate of the correction: harmonic with Neumann data
  // dw~/dn = -d/ds log|boundary(s) - z0| (exact on each straight boundary
  // piece), anchored at the reference boundary node.
  std::vector<double> wt(nn, 0.0);
  {
    const std::size_t ntri = m.triangles.size();
    std::vector<double> area(ntri);
    std::vector<std::array<Point2, 3>> grad(ntri);
    std::vector<Point2> rotgrad_w(ntri);
    for (std::size_t t = 0; t < ntri; ++t) {
      const auto& tr = m.triangles[t];
      const Point2 a = m.nodes[tr[0]], b = m.nodes[tr[1]], c = m.nodes[tr[2]];
      const double a2 = orient(a, b, c);
      area[t] = 0.5 * a2;
      grad[t][0] = (1.0 / a2) * rot90(c - b);
      grad[t][1] = (1.0 / a2) * rot90(a - c);
      grad[t][2] = (1.0 / a2) * rot90(b - a);
      const Point2 gw = w[tr[0]] * grad[t][0] + w[tr[1]] * grad[t][1] +
                        w[tr[2]] * grad[t][2];
      rotgrad_w[t] = rot90(gw);
    }
    std::vector<int> idx(nn, -1);
    int nf = 0;
    for (int i = 0; i < nn; ++i)
      if (i != ref) idx[i] = nf++;
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
    for (std::size_t t = 0; t < ntri; ++t) {
      const auto& tr = m.triangles[t];
      for (int a = 0; a < 3; ++a) {
        if (idx[tr[a]] < 0) continue;
        for (int b = 0; b < 3; ++b)
          if (idx[tr[b]] >= 0)
            trip.emplace_back(idx[tr[a]], idx[tr[b]],
                              area[t] * dot(grad[t][a], grad[t][b]));
      }
    }
    // Boundary edges oriented counterclockwise (domain to the left): each
    // appears exactly once as a directed triangle edge.
    std::unordered_set<std::uint64_t> directed;
    const auto dkey = [](int u, int v) {
      return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u))
              << 32) |
             static_cast<std::uint32_t>(v);
    };
    for (const auto& tr : m.triangles)
      for (int e = 0; e < 3; ++e)
        directed.insert(dkey(tr[e], tr[(e + 1) % 3]));
    const std::array<double, 4> gauss_x{0.069431844202973712,
                                        0.33000947820757187,
                                        0.66999052179242813,
                                        0.93056815579702623};
    const std::array<double, 4> gauss_w{0.17392742256872692,
                                        0.32607257743127305,
                                        0.32607257743127305,
                                        0.17392742256872692};
    for (const auto& eb : m.domain_boundary_edges) {
      int u = eb[0], v = eb[1];
      if (!directed.count(dkey(u, v))) std::swap(u, v);
      const Point2 pu = m.nodes[u], pv = m.nodes[v];
      const double len = dist(pu, pv);
      const Point2 tau = (1.0 / len) * (pv - pu);
      for (int gq = 0; gq < 4; ++gq) {
        const double t = gauss_x[gq];
        const Point2 x = pu + t * (pv - pu);
        const Point2 rad = x - z0;
        const double gprime = dot(tau, rad) / dot(rad, rad);
        const double wgt = -gauss_w[gq] * len * gprime;
        if (idx[u] >= 0) rhs[idx[u]] += wgt * (1.0 - t);
        if (idx[v] >= 0) rhs[idx[v]] += wgt * t;
      }
    }
    Eigen::SparseMatrix<double> K(nf, nf);
    K.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
    if (ldlt.info() != Eigen::Success)
      throw SingularSystem("conjugate system factorization failed");
    const Eigen::VectorXd sol = ldlt.solve(rhs);
    for (int i = 0; i < nn; ++i)
      if (idx[i] >= 0) wt[i] = sol[idx[i]];

    // Edge-consistency diagnostic for the fitted conjugate.
    std::unordered_map<std::uint64_t, std::pair<double, int>> edge_est;
    const auto key = [](int a, int b) {
      if (a > b) std::swap(a, b);
      return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a))
              << 32) |
             static_cast<std::uint32_t>(b);
    };
    for (std::size_t t = 0; t < ntri; ++t) {
      const auto& tr = m.triangles[t];
      for (int e = 0; e < 3; ++e) {
        int a = tr[e], b = tr[(e + 1) % 3];
        if (a > b) std::swap(a, b);
        auto& slot = edge_est[key(a, b)];
        slot.first += dot(rotgrad_w[t], m.nodes[b] - m.nodes[a]);
        slot.second += 1;
      }
    }
    double worst = 0.0;
    for (const auto& [k2, slot] : edge_est) {
      const int a = static_cast<int>(k2 >> 32);
      const int b = static_cast<int>(k2 & 0xffffffffu);
      const double est = slot.first / slot.second;
      worst = std::max(worst, std::abs(wt[b] - wt[a] - est));
    }
    map.conjugate_closure_error = worst;
  }

  // G~ = -theta + w~, phi = exp(-G - i G~).
  map.conjugate.mesh = mesh_ptr.get();
  map.conjugate.values.resize(nn);
  map.image_nodes.resize(nn);
  for (int i = 0; i < nn; ++i) {
    map.conjugate.values[i] = -theta[i] + wt[i];
    const double mod = std::exp(-map.green.values[i]);
    const double ang = -map.conjugate.values[i];
    map.image_nodes[i] = {mod * std::cos(ang), mod * std::sin(ang)};
  }

  // Boundary correspondence, unwrapped to a single increasing branch.
  {
    std::vector<std::pair<double, int>> rows;
    for (const auto& [i, s] : m.boundary_params) rows.emplace_back(s, i);
    std::sort(rows.begin(), rows.end());
    map.boundary.perimeter = omega.perimeter();
    double shift = 0.0, prev = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto [s, i] = rows[r];
      double t = -map.conjugate.values[i] + shift;
      while (r > 0 && t < prev - pi) {
        shift += 2.0 * pi;
        t += 2.0 * pi;
      }
      while (r > 0 && t > prev + pi) {
        shift -= 2.0 * pi;
        t -= 2.0 * pi;
      }
      map.boundary.s.push_back(s);
      map.boundary.theta.push_back(t);
      map.boundary.node.push_back(i);
      prev = t;
    }
  }

  // Image triangulation: exclude folded triangles from inverse lookup.
  map.image_tri_valid.resize(m.triangles.size(), 1);
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tr = m.triangles[t];
    if (orient(map.image_nodes[tr[0]], map.image_nodes[tr[1]],
               map.image_nodes[tr[2]]) <= 0.0)
      map.image_tri_valid[t] = 0;
  }
  map.domain_locator =
      std::make_shared<PointLocator>(m.nodes, m.triangles, std::vector<char>{});
  map.image_locator = std::make_shared<PointLocator>(
      map.image_nodes, m.triangles, map.image_tri_valid);
  return map;
}

// ---------------------------------------------------------------------------
// Hyperbolic primitives

double hyperbolic_distance(const RiemannMap& map, Point2 z1, Point2 z2) {
  const Cx w1 = to_cx(map.map_point(z1));
  const Cx w2 = to_cx(map.map_point(z2));
  const double num = std::abs(w1 - w2);
  const double den = std::abs(1.0 - std::conj(w1) * w2);
  if (num == 0.0) return 0.0;
  double delta = num / den;
  delta = std::min(delta, 1.0 - 1e-15);
  return std::log((1.0 + delta) / (1.0 - delta));
}

Polyline hyperbolic_geodesic(const RiemannMap& map, Point2 z1, Point2 z2,
                             int n) {
  require(n >= 16, "need at least 16 samples");
  require(dist(z1, z2) > 0.0, "geodesic endpoints must differ");
  const Cx w1 = to_cx(map.map_point(z1));
  const Cx w2 = to_cx(map.map_point(z2));
  const Cx v2 = (w2 - w1) / (1.0 - std::conj(w1) * w2);
  const double rho2 = std::min(std::abs(v2), 1.0 - 1e-15);
  if (rho2 == 0.0) throw DegenerateGeodesic("mapped endpoints coincide");
  const Cx dir = v2 / std::abs(v2);
  const double d_total = std::log((1.0 + rho2) / (1.0 - rho2));

  std::vector<Point2> pts;
  pts.reserve(n);
  pts.push_back(z1);
  for (int k = 1; k + 1 < n; ++k) {
    const double dk = d_total * k / (n - 1);
    const double rho = std::tanh(0.5 * dk);
    const Cx v = rho * dir;
    const Cx wk = (v + w1) / (1.0 + std::conj(w1) * v);
    const Point2 zk = map.inverse_point(to_pt(wk));
    if (dist(zk, pts.back()) > 0.0) pts.push_back(zk);
  }
  if (dist(z2, pts.back()) > 0.0)
    pts.push_back(z2);
  else
    pts.back() = z2;
  if (pts.size() < 2) pts = {z1, z2};
  return Polyline(std::move(pts));
}

Polyline boundary_geodesic(const RiemannMap& map, double y1, double y2,
                           int n) {
  require(n >= 16, "need at least 16 samples");
  const double P = map.domain->perimeter();
  const double gap = std::abs(map.domain->wrap(y1) - map.domain->wrap(y2));
  require(std::min(gap, P - gap) > 0.0, "boundary parameters must differ");

  const double t1 = map.boundary.theta_at(y1);
  const double t2 = map.boundary.theta_at(y2);
  const Cx w1 = std::polar(1.0, t1);
  const Cx w2 = std::polar(1.0, t2);
  if (std::abs(w1 - w2) < 1e-12)
    throw DegenerateGeodesic(
        "prevertices numerically coincide (boundary crowding)");

  const Point2 p1 = map.domain->point_at(y1);
  const Point2 p2 = map.domain->point_at(y2);

  // Sample parameters in [0,1] clustered geometrically toward both ends,
  // down to scales the double-precision pullback still resolves.
  std::vector<double> ts;
  ts.push_back(0.0);
  const int m_side = std::max(4, n / 2 - 1);
  const double ratio = std::pow(2e-6, 1.0 / m_side);
  for (int j = m_side; j >= 1; --j)
    ts.push_back(0.5 * std::pow(ratio, j));
  for (int j = 1; j <= m_side; ++j)
    ts.push_back(1.0 - 0.5 * std::pow(ratio, j));
  ts.push_back(1.0);
  std::sort(ts.begin(), ts.end());

  const auto sample_image = [&](double t) -> Cx {
    const Point2 a = to_pt(w1), b = to_pt(w2);
    if (std::abs(cross(a, b)) < 1e-9 && dot(a, b) < 0.0)
      return to_cx(a + t * (b - a));  // near-antipodal: the diameter
    // Circle orthogonal to the unit circle through w1, w2: dot(c,wi) = 1.
    const double det = cross(a, b);
    const Point2 c{(b.y - a.y) / det * 1.0, (a.x - b.x) / det * 1.0};
    const double R = std::sqrt(std::max(dot(c, c) - 1.0, 1e-30));
    const double a1 = std::atan2(a.y - c.y, a.x - c.x);
    const double a2 = std::atan2(b.y - c.y, b.x - c.x);
    double da = std::remainder(a2 - a1, 2.0 * pi);
    const double ang = a1 + t * da;
    return to_cx(Point2{c.x + R * std::cos(ang), c.y + R * std::sin(ang)});
  };

  std::vector<Point2> pts;
  pts.push_back(p1);
  const double tol_on = 1e-12 * map.domain->diameter();
  for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
    Point2 zq;
    try {
      zq = map.inverse_point(to_pt(sample_image(ts[i])));
    } catch (const LookupFailure&) {
      continue;  // crowded near-boundary sample; endpoints are exact anyway
    }
    if (geometry::dist_to_boundary(zq, *map.domain) <= tol_on) continue;
    if (dist(zq, pts.back()) > 0.0) pts.push_back(zq);
  }
  if (dist(p2, pts.back()) > 0.0)
    pts.push_back(p2);
  else
    pts.back() = p2;
  if (pts.size() < 2) throw LookupFailure("boundary geodesic unresolved");
  return Polyline(std::move(pts));
}

// ---------------------------------------------------------------------------
// Conformal annuli

ConformalAnnulus conformal_annulus(const RiemannMap& map, double y, int k) {
  require(k >= 0, "annulus scale k must be nonnegative");
  ConformalAnnulus a;
  a.map = &map;
  a.k = k;
  a.r = std::ldexp(1.0, -k);
  a.center_param = map.domain->wrap(y);
  a.center_boundary_point = map.domain->point_at(y);
  a.image_center = to_pt(std::polar(1.0, map.boundary.theta_at(y)));

  const TriMesh& m = *map.mesh;
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const double rho = dist(map.image_nodes[i], a.image_center);
    if (rho > 0.5 * a.r && rho < a.r)
      a.node_ids.push_back(static_cast<int>(i));
  }
  if (a.node_ids.size() < 8)
    throw UnresolvedScale("fewer than 8 mesh nodes in the image annulus");
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tr = m.triangles[t];
    const Point2 c = (1.0 / 3.0) * (map.image_nodes[tr[0]] +
                                    map.image_nodes[tr[1]] +
                                    map.image_nodes[tr[2]]);
    const double rho = dist(c, a.image_center);
    if (rho > 0.5 * a.r && rho < a.r) a.tri_ids.push_back(static_cast<int>(t));
  }
  if (a.tri_ids.empty())
    throw UnresolvedScale("no triangle centroid in the image annulus");
  return a;
}

std::vector<Polyline> annulus_intersect(const RiemannMap& map,
                                        const ConformalAnnulus& annulus,
                                        const Polyline& curve) {
  const auto& v = curve.vertices();
  const double tol_on = 1e-12 * map.domain->diameter();
  std::vector<double> rho(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    try {
      rho[i] = dist(map.map_point(v[i]), annulus.image_center);
    } catch (const LookupFailure&) {
      // Vertex on (or numerically off) the boundary: use the boundary
      // correspondence instead of mesh interpolation.
      if (geometry::dist_to_boundary(v[i], *map.domain) <= 1e3 * tol_on) {
        const double s = map.domain->nearest_boundary_param(v[i]);
        const Point2 w = to_pt(std::polar(1.0, map.boundary.theta_at(s)));
        rho[i] = dist(w, annulus.image_center);
      } else {
        throw;
      }
    }
  }
  const double lo = 0.5 * annulus.r, hi = annulus.r;

  std::vector<Polyline> pieces;
  std::vector<Point2> cur;
  const auto flush = [&]() {
    if (cur.size() >= 2) pieces.emplace_back(cur);
    cur.clear();
  };
  const auto push = [&](Point2 p) {
    if (cur.empty() || dist(cur.back(), p) > 0.0) cur.push_back(p);
  };
  // Linear model of the image radius along each segment; pieces are the
  // parameter ranges where it lies inside (lo, hi).
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double r0 = rho[i], r1 = rho[i + 1];
    double t_in = 0.0, t_out = 1.0;
    if (r1 != r0) {
      const double t_lo = (lo - r0) / (r1 - r0);
      const double t_hi = (hi - r0) / (r1 - r0);
      t_in = std::max(0.0, std::min(t_lo, t_hi));
      t_out = std::min(1.0, std::max(t_lo, t_hi));
    } else if (!(r0 > lo && r0 < hi)) {
      flush();
      continue;
    }
    if (t_in >= t_out) {
      flush();
      continue;
    }
    const double rmid = r0 + 0.5 * (t_in + t_out) * (r1 - r0);
    if (!(rmid > lo && rmid < hi)) {
      flush();
      continue;
    }
    if (t_in > 0.0) flush();
    push(v[i] + t_in * (v[i + 1] - v[i]));
    push(v[i] + t_out * (v[i + 1] - v[i]));
    if (t_out < 1.0) flush();
  }
  flush();
  return pieces;
}

}  // namespace capdual::confmap
