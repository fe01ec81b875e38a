#include "capdual/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_set>

namespace capdual::metrics {

using geometry::dist;
using geometry::dist_to_boundary;
using geometry::point_in_domain;
using geometry::segment_in_domain;

namespace {

std::uint64_t pack(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

int PathGraph::snap(Point2 z, double* snap_dist) const {
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < nodes.size(); ++g) {
    const double d = dist(mesh->nodes[nodes[g]], z);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(g);
    }
  }
  if (snap_dist != nullptr) *snap_dist = bd;
  return best;
}

PathGraph build_graph(const JordanPolygon& omega, const TriMesh& mesh,
                      double exponent, bool shortcuts) {
  PathGraph g;
  g.mesh = &mesh;
  g.domain = &omega;
  g.exponent = exponent;
  g.exponent_warning = !(exponent > -1.0 && exponent <= 1.0);
  g.h = mesh.h;

  const int nn = static_cast<int>(mesh.nodes.size());
  g.graph_of_mesh.assign(nn, -1);
  for (int i = 0; i < nn; ++i) {
    if (mesh.is_boundary_node(i)) continue;
    g.graph_of_mesh[i] = static_cast<int>(g.nodes.size());
    g.nodes.push_back(i);
  }
  require(!g.nodes.empty(), "mesh has no interior nodes");

  g.node_weight.resize(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    g.node_weight[i] =
        std::pow(dist_to_boundary(mesh.nodes[g.nodes[i]], omega), exponent);

  // Interior mesh edges.
  std::vector<std::array<int, 2>> pairs;  // graph-index pairs
  std::vector<std::vector<int>> mesh_adj(nn);
  for (const auto& e : mesh.edges()) {
    mesh_adj[e[0]].push_back(e[1]);
    mesh_adj[e[1]].push_back(e[0]);
    const int a = g.graph_of_mesh[e[0]], b = g.graph_of_mesh[e[1]];
    if (a >= 0 && b >= 0) pairs.push_back({std::min(a, b), std::max(a, b)});
  }

  if (shortcuts) {
    std::unordered_set<std::uint64_t> have;
    have.reserve(pairs.size() * 2);
    for (const auto& p : pairs) have.insert(pack(p[0], p[1]));
    for (int ma = 0; ma < nn; ++ma) {
      const int a = g.graph_of_mesh[ma];
      if (a < 0) continue;
      for (int mb : mesh_adj[ma]) {
        if (g.graph_of_mesh[mb] < 0) continue;
        for (int mc : mesh_adj[mb]) {
          const int c = g.graph_of_mesh[mc];
          if (c < 0 || mc <= ma) continue;
          if (have.count(pack(a, c))) continue;
          // Interior test: accept immediately when no boundary edge is near.
          if (!geometry::segment_clear_of_boundary(mesh.nodes[ma],
                                                   mesh.nodes[mc], omega) &&
              !segment_in_domain(mesh.nodes[ma], mesh.nodes[mc], omega))
            continue;
          have.insert(pack(a, c));
          pairs.push_back({std::min(a, c), std::max(a, c)});
        }
      }
    }
  }

  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  // CSR with symmetric entries.
  const std::size_t ng = g.nodes.size();
  std::vector<int> degree(ng, 0);
  for (const auto& p : pairs) {
    ++degree[p[0]];
    ++degree[p[1]];
  }
  g.offsets.assign(ng + 1, 0);
  for (std::size_t i = 0; i < ng; ++i)
    g.offsets[i + 1] = g.offsets[i] + degree[i];
  g.neighbors.resize(g.offsets.back());
  g.weights.resize(g.offsets.back());
  std::vector<int> cursor(g.offsets.begin(), g.offsets.end() - 1);
  const auto add_dir = [&](int a, int b) {
    const double len =
        dist(mesh.nodes[g.nodes[a]], mesh.nodes[g.nodes[b]]);
    const double w = len * 0.5 * (g.node_weight[a] + g.node_weight[b]);
    g.neighbors[cursor[a]] = b;
    g.weights[cursor[a]] = w;
    ++cursor[a];
  };
  for (const auto& p : pairs) {
    add_dir(p[0], p[1]);
    add_dir(p[1], p[0]);
  }
  for (std::size_t i = 0; i < ng; ++i) {
    for (double w : std::vector<double>(g.weights.begin() + g.offsets[i],
                                        g.weights.begin() + g.offsets[i + 1]))
      if (!(w > 0.0) || !std::isfinite(w))
        throw Disconnected("nonpositive or infinite edge weight");
  }

  // Connectivity over the interior graph; single-node orphans are removed,
  // a second nontrivial component is an error.
  std::vector<char> seen(ng, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int k = g.offsets[u]; k < g.offsets[u + 1]; ++k)
      if (!seen[g.neighbors[k]]) {
        seen[g.neighbors[k]] = 1;
        ++reached;
        stack.push_back(g.neighbors[k]);
      }
  }
  if (reached != ng) {
    for (std::size_t i = 0; i < ng; ++i)
      if (!seen[i] && g.offsets[i + 1] > g.offsets[i])
        throw Disconnected("interior graph splits");
    // Only isolated orphans: rebuild without them.
    PathGraph h2;
    h2.mesh = g.mesh;
    h2.domain = g.domain;
    h2.exponent = g.exponent;
    h2.exponent_warning = g.exponent_warning;
    h2.h = g.h;
    h2.graph_of_mesh.assign(nn, -1);
    std::vector<int> remap(ng, -1);
    for (std::size_t i = 0; i < ng; ++i) {
      if (!seen[i]) continue;
      remap[i] = static_cast<int>(h2.nodes.size());
      h2.graph_of_mesh[g.nodes[i]] = remap[i];
      h2.nodes.push_back(g.nodes[i]);
      h2.node_weight.push_back(g.node_weight[i]);
    }
    h2.offsets.assign(h2.nodes.size() + 1, 0);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < ng; ++i) {
      if (!seen[i]) continue;
      for (int k = g.offsets[i]; k < g.offsets[i + 1]; ++k) {
        h2.neighbors.push_back(remap[g.neighbors[k]]);
        h2.weights.push_back(g.weights[k]);
      }
      h2.offsets[++pos] = static_cast<int>(h2.neighbors.size());
    }
    return h2;
  }
  return g;
}

namespace {

PathResult shortest_path(const PathGraph& g, Point2 z1, Point2 z2) {
  PathResult res;
  res.exponent = g.exponent;
  if (z1.x == z2.x && z1.y == z2.y) {
    res.path = {z1};
    return res;
  }
  const auto inside_or_on = [&](Point2 z) {
    return point_in_domain(z, *g.domain) ||
           dist_to_boundary(z, *g.domain) <= 1e-12 * g.domain->diameter();
  };
  require(inside_or_on(z1) && inside_or_on(z2),
          "query points must lie in the closed domain");

  const int s = g.snap(z1, &res.snap1);
  const int t = g.snap(z2, &res.snap2);
  require(res.snap1 <= 2.0 * g.h && res.snap2 <= 2.0 * g.h,
          "snap distance exceeds 2h; refine the mesh");

  const std::size_t ng = g.nodes.size();
  std::vector<double> dist_arr(ng, std::numeric_limits<double>::infinity());
  std::vector<int> parent(ng, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  dist_arr[s] = 0.0;
  pq.emplace(0.0, s);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist_arr[u]) continue;
    if (u == t) break;
    for (int k = g.offsets[u]; k < g.offsets[u + 1]; ++k) {
      const int v = g.neighbors[k];
      const double nd = d + g.weights[k];
      if (nd < dist_arr[v]) {
        dist_arr[v] = nd;
        parent[v] = u;
        pq.emplace(nd, v);
      }
    }
  }
  if (!std::isfinite(dist_arr[t]))
    throw Disconnected("no path between the snapped nodes");

  std::vector<int> chain;
  for (int u = t; u != -1; u = parent[u]) chain.push_back(u);
  std::reverse(chain.begin(), chain.end());

  res.path.push_back(z1);
  for (int u : chain) {
    const Point2 p = g.mesh->nodes[g.nodes[u]];
    if (dist(p, res.path.back()) > 0.0) res.path.push_back(p);
  }
  if (dist(z2, res.path.back()) > 0.0) res.path.push_back(z2);
  if (res.path.size() < 2) res.path.push_back(z2);

  // Discrete length: graph distance plus trapezoid connectors.
  res.graph_length = dist_arr[t];
  const auto connector = [&](Point2 z, int gnode) {
    const double len = dist(z, g.mesh->nodes[g.nodes[gnode]]);
    if (len == 0.0) return 0.0;
    const double wz = std::pow(dist_to_boundary(z, *g.domain), g.exponent);
    if (std::isfinite(wz))
      return len * 0.5 * (wz + g.node_weight[gnode]);
    const Point2 mid = 0.5 * (z + g.mesh->nodes[g.nodes[gnode]]);
    return len * std::pow(dist_to_boundary(mid, *g.domain), g.exponent);
  };
  res.graph_length += connector(z1, s) + connector(z2, t);

  if (res.path.size() >= 2) {
    const Polyline poly(res.path);
    res.euclid_length = poly.length();
    res.weighted_length = geometry::weighted_length(poly, *g.domain,
                                                    g.exponent);
  }
  return res;
}

}  // namespace

PathResult subhyperbolic_distance(const PathGraph& graph, Point2 z1,
                                  Point2 z2) {
  return shortest_path(graph, z1, z2);
}

PathResult quasihyperbolic_distance(const PathGraph& graph, Point2 z1,
                                    Point2 z2) {
  require(graph.exponent == -1.0,
          "quasihyperbolic distance needs an exponent -1 graph");
  return shortest_path(graph, z1, z2);
}

Point2 default_base_point(const JordanPolygon& omega, double clearance) {
  const Point2 c = omega.centroid();
  if (point_in_domain(c, omega) && dist_to_boundary(c, omega) >= clearance)
    return c;
  // Deep-interior fallback: best point of a coarse deterministic grid.
  Point2 best = c;
  double best_d = -1.0;
  const Point2 lo = omega.bbox_min(), hi = omega.bbox_max();
  const int N = 96;
  for (int j = 1; j < N; ++j)
    for (int i = 1; i < N; ++i) {
      const Point2 p{lo.x + (hi.x - lo.x) * i / N,
                     lo.y + (hi.y - lo.y) * j / N};
      if (!point_in_domain(p, omega)) continue;
      const double d = dist_to_boundary(p, omega);
      if (d > best_d) {
        best_d = d;
        best = p;
      }
    }
  require(best_d > 0.0, "no interior base point found");
  return best;
}

CapacityMetricResult capacity_metric(const JordanPolygon& omega, Point2 z1,
                                     Point2 z2,
                                     const solver::SolverConfig& cfg, double h,
                                     const CapacityMetricContext& ctx) {
  require(point_in_domain(z1, omega) && point_in_domain(z2, omega),
          "capacity metric needs interior points");
  CapacityMetricResult out;

  if (dist(z1, z2) == 0.0) {
    // Point condenser: a segment at the scale of the plate tag radius.
    const Polyline tiny =
        geometry::segment(z1, z1 + Point2{1e-3 * h, 0.0});
    const auto res = solver::curve_capacity(omega, tiny, cfg, h);
    out.value = res.value;
    out.curve = tiny.vertices();
    out.winner = "point";
    out.candidates.emplace_back("point", res.value);
    return out;
  }

  std::vector<std::pair<std::string, Polyline>> candidates;

  // Hyperbolic geodesic through the conformal map.
  try {
    const confmap::RiemannMap* map = ctx.map;
    confmap::RiemannMap local;
    if (map == nullptr) {
      local = confmap::build_map(omega, default_base_point(omega, 4.0 * h), h);
      map = &local;
    }
    candidates.emplace_back("hyperbolic_geodesic",
                            confmap::hyperbolic_geodesic(*map, z1, z2, 65));
  } catch (const Error&) {
    // Geodesic unavailable (lookup or branch trouble); other candidates run.
  }

  // Subhyperbolic graph geodesic with exponent 1-p.
  try {
    const PathGraph* graph = ctx.graph;
    PathGraph local;
    if (graph == nullptr) {
      const TriMesh* mptr = nullptr;
      TriMesh mlocal;
      if (ctx.map != nullptr && ctx.map->mesh != nullptr &&
          ctx.map->mesh->domain == &omega) {
        mptr = ctx.map->mesh.get();
      } else {
        mlocal = mesh::triangulate(omega, h);
        mptr = &mlocal;
      }
      local = build_graph(omega, *mptr, 1.0 - cfg.p);
      // The graph references the mesh only during the query below.
      const auto path = shortest_path(local, z1, z2);
      if (path.path.size() >= 2)
        candidates.emplace_back("subhyperbolic_path", Polyline(path.path));
    } else {
      const auto path = shortest_path(*graph, z1, z2);
      if (path.path.size() >= 2)
        candidates.emplace_back("subhyperbolic_path", Polyline(path.path));
    }
  } catch (const Error&) {
  }

  // Straight segment when it stays inside.
  if (segment_in_domain(z1, z2, omega))
    candidates.emplace_back("segment", geometry::segment(z1, z2));

  require(!candidates.empty(), "no admissible candidate curve");
  bool first = true;
  for (const auto& [name, curve] : candidates) {
    const auto res = solver::curve_capacity(omega, curve, cfg, h);
    out.candidates.emplace_back(name, res.value);
    if (first || res.value < out.value) {
      out.value = res.value;
      out.curve = curve.vertices();
      out.winner = name;
      first = false;
    }
  }
  return out;
}

}  // namespace capdual::metrics
