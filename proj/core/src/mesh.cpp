#include "capdual/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <unordered_set>

namespace capdual::mesh {

using geometry::cross;
using geometry::dist;
using geometry::dot;
using geometry::orient;

namespace {

constexpr double kNoParam = std::numeric_limits<double>::quiet_NaN();

std::uint64_t ekey(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

double tri_min_angle_deg(Point2 a, Point2 b, Point2 c) {
  const double la = dist(b, c), lb = dist(c, a), lc = dist(a, b);
  const auto angle = [](double opp, double s1, double s2) {
    const double v = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
    return std::acos(std::clamp(v, -1.0, 1.0));
  };
  const double m = std::min({angle(la, lb, lc), angle(lb, lc, la),
                             angle(lc, la, lb)});
  return m * 180.0 / std::numbers::pi;
}

// > 0 when d lies strictly inside the circumcircle of ccw triangle (a,b,c).
double incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double ax = a.x - d.x, ay = a.y - d.y;
  const double bx = b.x - d.x, by = b.y - d.y;
  const double cx = c.x - d.x, cy = c.y - d.y;
  const double a2 = ax * ax + ay * ay;
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) +
         a2 * (bx * cy - by * cx);
}

// ---------------------------------------------------------------------------
// Editable mesh kernel.

struct EdgeSlot {
  std::array<int, 2> t{-1, -1};
};

using EdgePredicate = std::function<bool(Point2 a, Point2 b, double len)>;

class Kernel {
 public:
  std::vector<Point2> nodes;
  std::vector<double> params;  // NaN when not on the domain boundary
  std::vector<std::array<int, 3>> tris;  // dead: {-1,-1,-1}
  std::unordered_map<std::uint64_t, EdgeSlot> edge_tris;
  std::unordered_set<std::uint64_t> domain_edges;
  const JordanPolygon* domain = nullptr;
  std::size_t max_nodes = 4'000'000;
  std::size_t live_count = 0;
  // Size budget: flips and smoothing must not (re)introduce edges violating
  // it once size refinement has finished.
  EdgePredicate too_long;

  bool alive(int t) const { return tris[t][0] >= 0; }

  void add_tri(int a, int b, int c) {
    const int t = static_cast<int>(tris.size());
    tris.push_back({a, b, c});
    ++live_count;
    attach(t, a, b);
    attach(t, b, c);
    attach(t, c, a);
  }

  void remove_tri(int t) {
    auto [a, b, c] = tris[t];
    detach(t, a, b);
    detach(t, b, c);
    detach(t, c, a);
    tris[t] = {-1, -1, -1};
    --live_count;
  }

  int other_tri(std::uint64_t key, int t) const {
    const auto it = edge_tris.find(key);
    if (it == edge_tris.end()) return -1;
    if (it->second.t[0] == t) return it->second.t[1];
    if (it->second.t[1] == t) return it->second.t[0];
    return -1;
  }

  // Longest edge of triangle t as local index (0: edge v0v1, 1: v1v2, 2: v2v0).
  int longest_edge(int t) const {
    const auto& tr = tris[t];
    double best = -1.0;
    int arg = 0;
    for (int e = 0; e < 3; ++e) {
      const double l = dist(nodes[tr[e]], nodes[tr[(e + 1) % 3]]);
      if (l > best) {
        best = l;
        arg = e;
      }
    }
    return arg;
  }

  double edge_len(int t, int e) const {
    return dist(nodes[tris[t][e]], nodes[tris[t][(e + 1) % 3]]);
  }

  // Splits the undirected edge (a,b) at its midpoint; splits both adjacent
  // triangles. Returns the new node index.
  int split_edge(int a, int b, std::deque<std::uint64_t>* flip_queue) {
    if (nodes.size() >= max_nodes)
      throw MeshFailure("mesh refinement budget exceeded");
    const std::uint64_t key = ekey(a, b);
    const auto it = edge_tris.find(key);
    require(it != edge_tris.end(), "split of unknown edge");
    const std::array<int, 2> adj = it->second.t;

    const Point2 mid = 0.5 * (nodes[a] + nodes[b]);
    if (mid.x == nodes[a].x && mid.y == nodes[a].y)
      throw MeshFailure("refinement reached floating-point resolution");
    const int m = static_cast<int>(nodes.size());
    nodes.push_back(mid);

    const bool on_domain = domain_edges.count(key) > 0;
    if (on_domain && domain != nullptr) {
      const double p = domain->perimeter();
      const double sa = params[a], sb = params[b];
      double fwd = std::fmod(sb - sa, p);
      if (fwd < 0.0) fwd += p;
      double sm;
      if (fwd <= p - fwd)
        sm = domain->wrap(sa + 0.5 * fwd);
      else
        sm = domain->wrap(sb + 0.5 * (p - fwd));
      params.push_back(sm);
    } else {
      params.push_back(kNoParam);
    }
    if (on_domain) {
      domain_edges.erase(key);
      domain_edges.insert(ekey(a, m));
      domain_edges.insert(ekey(m, b));
    }

    for (int t : adj) {
      if (t < 0) continue;
      const auto tr = tris[t];
      int ia = -1;
      for (int e = 0; e < 3; ++e)
        if (tr[e] == a || tr[e] == b) {
          if (tr[(e + 1) % 3] == a || tr[(e + 1) % 3] == b) ia = e;
        }
      require(ia >= 0, "edge not found in adjacent triangle");
      const int u = tr[ia], v = tr[(ia + 1) % 3], c = tr[(ia + 2) % 3];
      remove_tri(t);
      add_tri(u, m, c);
      add_tri(m, v, c);
      if (flip_queue != nullptr) {
        flip_queue->push_back(ekey(u, c));
        flip_queue->push_back(ekey(v, c));
        flip_queue->push_back(ekey(m, c));
      }
    }
    return m;
  }

  bool constrained(std::uint64_t key) const {
    const auto it = edge_tris.find(key);
    if (it == edge_tris.end()) return true;
    return it->second.t[0] < 0 || it->second.t[1] < 0 ||
           domain_edges.count(key) > 0;
  }

  // Lawson flip when the Delaunay criterion is strictly violated.
  bool try_flip(std::uint64_t key, std::deque<std::uint64_t>* queue) {
    if (constrained(key)) return false;
    const auto it = edge_tris.find(key);
    const int t0 = it->second.t[0], t1 = it->second.t[1];
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    // Orient: t_ab has directed edge a->b, t_ba has b->a.
    int tab = -1, tba = -1;
    for (int t : {t0, t1}) {
      const auto& tr = tris[t];
      for (int e = 0; e < 3; ++e) {
        if (tr[e] == a && tr[(e + 1) % 3] == b) tab = t;
        if (tr[e] == b && tr[(e + 1) % 3] == a) tba = t;
      }
    }
    if (tab < 0 || tba < 0) return false;
    const int c = opposite(tab, a, b);
    const int d = opposite(tba, a, b);
    if (c < 0 || d < 0 || c == d) return false;

    const Point2 pa = nodes[a], pb = nodes[b], pc = nodes[c], pd = nodes[d];
    const double scale =
        std::max({dist(pa, pb), dist(pa, pc), dist(pb, pd), dist(pc, pd)});
    const double tol = 1e-10 * scale * scale * scale * scale;
    if (incircle(pa, pb, pc, pd) <= tol) return false;
    const double area_tol = 1e-16 * scale * scale;
    if (orient(pa, pd, pc) <= area_tol || orient(pd, pb, pc) <= area_tol)
      return false;
    if (too_long && too_long(pc, pd, dist(pc, pd)) &&
        !too_long(pa, pb, dist(pa, pb)))
      return false;

    remove_tri(tab);
    remove_tri(tba);
    add_tri(a, d, c);
    add_tri(d, b, c);
    if (queue != nullptr) {
      queue->push_back(ekey(a, d));
      queue->push_back(ekey(d, b));
      queue->push_back(ekey(b, c));
      queue->push_back(ekey(c, a));
    }
    return true;
  }

  void drain_flips(std::deque<std::uint64_t>& queue) {
    std::size_t budget = 64 * (tris.size() + 16);
    while (!queue.empty() && budget-- > 0) {
      const std::uint64_t key = queue.front();
      queue.pop_front();
      try_flip(key, &queue);
    }
    queue.clear();
  }

  void lawson_pass() {
    std::deque<std::uint64_t> queue;
    std::vector<std::uint64_t> keys;
    keys.reserve(edge_tris.size());
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!alive(static_cast<int>(t))) continue;
      for (int e = 0; e < 3; ++e)
        keys.push_back(ekey(tris[t][e], tris[t][(e + 1) % 3]));
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (auto k : keys) queue.push_back(k);
    drain_flips(queue);
  }

  // Longest-edge propagation-path bisection (Rivara).
  void lepp_bisect(int t, std::deque<std::uint64_t>* flip_queue) {
    int cur = t;
    for (int guard = 0; guard < 256; ++guard) {
      const int e = longest_edge(cur);
      const int a = tris[cur][e], b = tris[cur][(e + 1) % 3];
      const std::uint64_t key = ekey(a, b);
      const int nb = other_tri(key, cur);
      if (nb < 0) {
        split_edge(a, b, flip_queue);
        return;
      }
      const int enb = longest_edge(nb);
      const std::uint64_t nbkey =
          ekey(tris[nb][enb], tris[nb][(enb + 1) % 3]);
      if (nbkey == key) {
        split_edge(a, b, flip_queue);
        return;
      }
      cur = nb;
    }
    // Pathological propagation: split the current longest edge anyway.
    const int e = longest_edge(cur);
    split_edge(tris[cur][e], tris[cur][(e + 1) % 3], flip_queue);
  }

  int opposite(int t, int a, int b) const {
    for (int v : tris[t])
      if (v != a && v != b) return v;
    return -1;
  }

  // One smoothing sweep: move interior nodes toward the average of their
  // neighbors when that strictly improves the local minimum angle.
  bool smooth_pass() {
    std::vector<std::vector<int>> star(nodes.size());
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!alive(static_cast<int>(t))) continue;
      for (int v : tris[t]) star[v].push_back(static_cast<int>(t));
    }
    bool moved = false;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!std::isnan(params[i])) continue;  // keep boundary nodes fixed
      if (star[i].empty()) continue;
      Point2 avg{0.0, 0.0};
      int cnt = 0;
      std::unordered_set<int> seen;
      for (int t : star[i])
        for (int v : tris[t])
          if (v != static_cast<int>(i) && seen.insert(v).second) {
            avg = avg + nodes[v];
            ++cnt;
          }
      if (cnt < 3) continue;
      const Point2 cand = (1.0 / cnt) * avg;
      const Point2 old = nodes[i];
      double before = 360.0, after = 360.0;
      for (int t : star[i]) {
        const auto& tr = tris[t];
        before = std::min(before, tri_min_angle_deg(nodes[tr[0]],
                                                    nodes[tr[1]],
                                                    nodes[tr[2]]));
      }
      nodes[i] = cand;
      bool valid = true;
      for (int t : star[i]) {
        const auto& tr = tris[t];
        if (orient(nodes[tr[0]], nodes[tr[1]], nodes[tr[2]]) <= 0.0) {
          valid = false;
          break;
        }
        after = std::min(after, tri_min_angle_deg(nodes[tr[0]], nodes[tr[1]],
                                                  nodes[tr[2]]));
        if (too_long)
          for (int e = 0; e < 3; ++e) {
            const Point2 qa = nodes[tr[e]], qb = nodes[tr[(e + 1) % 3]];
            if (too_long(qa, qb, dist(qa, qb))) valid = false;
          }
      }
      if (!valid || after <= before) {
        nodes[i] = old;
      } else {
        moved = true;
      }
    }
    return moved;
  }

 private:
  void attach(int t, int a, int b) {
    auto& slot = edge_tris[ekey(a, b)].t;
    if (slot[0] == t || slot[1] == t) return;
    if (slot[0] < 0)
      slot[0] = t;
    else if (slot[1] < 0)
      slot[1] = t;
    else
      throw MeshFailure("non-manifold edge");
  }

  void detach(int t, int a, int b) {
    const auto key = ekey(a, b);
    auto it = edge_tris.find(key);
    if (it == edge_tris.end()) return;
    if (it->second.t[0] == t) it->second.t[0] = -1;
    if (it->second.t[1] == t) it->second.t[1] = -1;
    if (it->second.t[0] < 0 && it->second.t[1] < 0) edge_tris.erase(it);
  }
};

// ---------------------------------------------------------------------------
// Ear clipping over merged polygon vertices.

struct MergedVertex {
  Point2 p;
  double param;
};

std::vector<MergedVertex> merge_vertices(const JordanPolygon& omega) {
  const double tol = 1e-12 * omega.diameter();
  const auto& v = omega.vertices();
  const std::size_t n = v.size();
  std::vector<MergedVertex> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.empty() && dist(out.back().p, v[i]) <= tol) continue;
    out.push_back({v[i], omega.vertex_param(i)});
  }
  while (out.size() >= 2 && dist(out.front().p, out.back().p) <= tol)
    out.pop_back();
  // Drop collinear middles (distance of the vertex to the chord <= tol).
  bool changed = true;
  while (changed && out.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const std::size_t ip = (i + out.size() - 1) % out.size();
      const std::size_t in = (i + 1) % out.size();
      if (geometry::segment_point_distance(out[ip].p, out[in].p, out[i].p) <=
          tol) {
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  if (out.size() < 3) throw MeshFailure("polygon degenerates after merging");
  return out;
}

std::vector<std::array<int, 3>> ear_clip(const std::vector<Point2>& pts) {
  const int n = static_cast<int>(pts.size());
  double diam = 0.0;
  for (int i = 0; i < n; ++i) diam = std::max(diam, dist(pts[0], pts[i]));
  const double eps_area = 1e-14 * diam * diam;

  std::vector<int> next(n), prev(n);
  for (int i = 0; i < n; ++i) {
    next[i] = (i + 1) % n;
    prev[i] = (i + n - 1) % n;
  }
  const auto convex = [&](int i) {
    return orient(pts[prev[i]], pts[i], pts[next[i]]) > eps_area;
  };
  const auto inside_tri = [&](Point2 a, Point2 b, Point2 c, Point2 p) {
    return orient(a, b, p) >= -eps_area && orient(b, c, p) >= -eps_area &&
           orient(c, a, p) >= -eps_area;
  };
  const auto is_ear = [&](int i) {
    if (!convex(i)) return false;
    const Point2 a = pts[prev[i]], b = pts[i], c = pts[next[i]];
    for (int j = next[next[i]]; j != prev[i]; j = next[j]) {
      if (!convex(j) && inside_tri(a, b, c, pts[j])) return false;
    }
    return true;
  };

  std::vector<std::array<int, 3>> tris;
  tris.reserve(n - 2);
  int remaining = n;
  int cur = 0;
  int misses = 0;
  while (remaining > 3) {
    if (is_ear(cur)) {
      tris.push_back({prev[cur], cur, next[cur]});
      const int p = prev[cur], q = next[cur];
      next[p] = q;
      prev[q] = p;
      cur = q;
      --remaining;
      misses = 0;
    } else {
      cur = next[cur];
      if (++misses > remaining + 2)
        throw MeshFailure("ear clipping failed (degenerate polygon)");
    }
  }
  tris.push_back({prev[cur], cur, next[cur]});
  return tris;
}

// ---------------------------------------------------------------------------
// Refinement drivers.

void refine_while(Kernel& k, const EdgePredicate& too_long) {
  std::deque<std::uint64_t> queue;
  const auto needs = [&](int t) {
    for (int e = 0; e < 3; ++e) {
      const Point2 a = k.nodes[k.tris[t][e]];
      const Point2 b = k.nodes[k.tris[t][(e + 1) % 3]];
      if (too_long(a, b, dist(a, b))) return true;
    }
    return false;
  };
  // New triangles are appended, so one growing pass visits everything; the
  // outer loop is a cheap verification sweep.
  for (int pass = 0; pass < 4; ++pass) {
    bool changed = false;
    for (std::size_t t = 0; t < k.tris.size(); ++t) {
      const int ti = static_cast<int>(t);
      int guard = 0;
      while (k.alive(ti) && needs(ti)) {
        if (++guard > 100000)
          throw MeshFailure("size refinement stalled");
        k.lepp_bisect(ti, &queue);
        k.drain_flips(queue);
        changed = true;
      }
    }
    if (!changed) return;
  }
  throw MeshFailure("size refinement did not settle");
}

void quality_loop(Kernel& k, const MeshOptions& opts) {
  std::deque<std::uint64_t> queue;
  double worst = 0.0;
  for (int round = 0; round < opts.quality_rounds; ++round) {
    k.lawson_pass();
    if (round > 0) k.smooth_pass();
    worst = 360.0;
    std::vector<int> bad;
    for (std::size_t t = 0; t < k.tris.size(); ++t) {
      if (!k.alive(static_cast<int>(t))) continue;
      const auto& tr = k.tris[t];
      const double a =
          tri_min_angle_deg(k.nodes[tr[0]], k.nodes[tr[1]], k.nodes[tr[2]]);
      worst = std::min(worst, a);
      if (a < opts.min_angle_deg) bad.push_back(static_cast<int>(t));
    }
    if (bad.empty()) return;
    for (int t : bad) {
      if (!k.alive(t)) continue;
      k.lepp_bisect(t, &queue);
      k.drain_flips(queue);
    }
  }
  // Final verdict after the last round's cleanup.
  k.lawson_pass();
  k.smooth_pass();
  worst = 360.0;
  for (std::size_t t = 0; t < k.tris.size(); ++t) {
    if (!k.alive(static_cast<int>(t))) continue;
    const auto& tr = k.tris[t];
    worst = std::min(worst, tri_min_angle_deg(k.nodes[tr[0]], k.nodes[tr[1]],
                                              k.nodes[tr[2]]));
  }
  if (worst < opts.min_angle_deg) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "angle bound %.3g deg unreachable, worst angle %.6g deg",
                  opts.min_angle_deg, worst);
    throw MeshFailure(buf);
  }
}

TriMesh export_mesh(Kernel& k) {
  TriMesh m;
  m.domain = k.domain;
  // Compact node indices over live triangles.
  std::vector<int> remap(k.nodes.size(), -1);
  int nn = 0;
  for (std::size_t t = 0; t < k.tris.size(); ++t) {
    if (!k.alive(static_cast<int>(t))) continue;
    for (int v : k.tris[t])
      if (remap[v] < 0) remap[v] = nn++;
  }
  m.nodes.resize(nn);
  for (std::size_t i = 0; i < k.nodes.size(); ++i) {
    if (remap[i] < 0) continue;
    m.nodes[remap[i]] = k.nodes[i];
    if (!std::isnan(k.params[i])) m.boundary_params[remap[i]] = k.params[i];
  }
  for (std::size_t t = 0; t < k.tris.size(); ++t) {
    if (!k.alive(static_cast<int>(t))) continue;
    const auto& tr = k.tris[t];
    m.triangles.push_back({remap[tr[0]], remap[tr[1]], remap[tr[2]]});
  }
  std::vector<std::array<int, 2>> dbe;
  dbe.reserve(k.domain_edges.size());
  for (auto key : k.domain_edges) {
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    if (remap[a] >= 0 && remap[b] >= 0) {
      int ra = remap[a], rb = remap[b];
      if (ra > rb) std::swap(ra, rb);
      dbe.push_back({ra, rb});
    }
  }
  std::sort(dbe.begin(), dbe.end());
  m.domain_boundary_edges = std::move(dbe);
  m.h = m.max_edge_length();
  return m;
}

Kernel kernel_from(const TriMesh& mesh) {
  Kernel k;
  k.domain = mesh.domain;
  k.nodes = mesh.nodes;
  k.params.assign(mesh.nodes.size(), kNoParam);
  for (const auto& [i, s] : mesh.boundary_params) k.params[i] = s;
  for (const auto& tr : mesh.triangles) k.add_tri(tr[0], tr[1], tr[2]);
  for (const auto& e : mesh.domain_boundary_edges)
    k.domain_edges.insert(ekey(e[0], e[1]));
  return k;
}

}  // namespace

// ---------------------------------------------------------------------------
// TriMesh members.

double TriMesh::triangle_area(int t) const {
  const auto& tr = triangles[t];
  return 0.5 * orient(nodes[tr[0]], nodes[tr[1]], nodes[tr[2]]);
}

double TriMesh::total_area() const {
  double s = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t)
    s += triangle_area(static_cast<int>(t));
  return s;
}

double TriMesh::max_edge_length() const {
  double h = 0.0;
  for (const auto& tr : triangles)
    for (int e = 0; e < 3; ++e)
      h = std::max(h, dist(nodes[tr[e]], nodes[tr[(e + 1) % 3]]));
  return h;
}

double TriMesh::min_angle_deg() const {
  double m = 360.0;
  for (const auto& tr : triangles)
    m = std::min(m, tri_min_angle_deg(nodes[tr[0]], nodes[tr[1]],
                                      nodes[tr[2]]));
  return m;
}

std::vector<std::array<int, 2>> TriMesh::edges() const {
  std::vector<std::array<int, 2>> out;
  out.reserve(triangles.size() * 3 / 2);
  for (const auto& tr : triangles)
    for (int e = 0; e < 3; ++e) {
      int a = tr[e], b = tr[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      out.push_back({a, b});
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::array<int, 3>> TriMesh::triangle_neighbors() const {
  std::unordered_map<std::uint64_t, std::array<int, 2>> map;
  map.reserve(triangles.size() * 2);
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tr = triangles[t];
    for (int e = 0; e < 3; ++e) {
      auto& slot = map[ekey(tr[e], tr[(e + 1) % 3])];
      if (slot[0] == 0 && slot[1] == 0) slot = {-1, -1};
      if (slot[0] < 0)
        slot[0] = static_cast<int>(t);
      else
        slot[1] = static_cast<int>(t);
    }
  }
  std::vector<std::array<int, 3>> nb(triangles.size(), {-1, -1, -1});
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tr = triangles[t];
    for (int e = 0; e < 3; ++e) {
      const auto& slot = map[ekey(tr[e], tr[(e + 1) % 3])];
      nb[t][e] = (slot[0] == static_cast<int>(t)) ? slot[1] : slot[0];
    }
  }
  return nb;
}

// ---------------------------------------------------------------------------
// Public operations.

TriMesh triangulate(const JordanPolygon& omega, double h,
                    const std::vector<RefineRegion>& regions,
                    const MeshOptions& opts) {
  require(h > 0.0, "mesh size must be positive");
  const auto merged = merge_vertices(omega);
  std::vector<Point2> pts(merged.size());
  for (std::size_t i = 0; i < merged.size(); ++i) pts[i] = merged[i].p;
  const auto tris = ear_clip(pts);

  Kernel k;
  k.domain = &omega;
  k.max_nodes = opts.max_nodes;
  k.nodes = pts;
  k.params.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) k.params[i] = merged[i].param;
  for (const auto& tr : tris) k.add_tri(tr[0], tr[1], tr[2]);
  const int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i) k.domain_edges.insert(ekey(i, (i + 1) % n));

  k.lawson_pass();
  k.too_long = [&omega, h, regions](Point2 a, Point2 b, double len) {
    if (len > h) return true;
    for (const auto& r : regions) {
      if (len <= r.local_h) continue;
      const Point2 mid = 0.5 * (a + b);
      if (r.region(a) || r.region(b) || r.region(mid)) return true;
    }
    return false;
  };
  refine_while(k, k.too_long);
  quality_loop(k, opts);
  return export_mesh(k);
}

TriMesh triangulate(const JordanPolygon& omega, double h,
                    const MeshOptions& opts) {
  return triangulate(omega, h, {}, opts);
}

TriMesh refine_near(const TriMesh& mesh,
                    const std::function<bool(Point2)>& region, double factor,
                    const MeshOptions& opts) {
  require(factor > 1.0, "refinement factor must exceed 1");
  const double target = mesh.h / factor;
  const double cap = mesh.h;
  Kernel k = kernel_from(mesh);
  k.max_nodes = opts.max_nodes;
  k.too_long = [&region, target, cap](Point2 a, Point2 b, double len) {
    if (len > cap) return true;
    if (len <= target) return false;
    const Point2 mid = 0.5 * (a + b);
    return region(a) || region(b) || region(mid);
  };
  refine_while(k, k.too_long);
  quality_loop(k, opts);
  TriMesh out = export_mesh(k);
  out.h = mesh.h;  // nominal size is unchanged; only the region got finer
  return out;
}

TriMesh refine_all(const TriMesh& mesh, double h, const MeshOptions& opts) {
  require(h > 0.0, "mesh size must be positive");
  Kernel k = kernel_from(mesh);
  k.max_nodes = opts.max_nodes;
  k.too_long = [h](Point2, Point2, double len) { return len > h; };
  refine_while(k, k.too_long);
  quality_loop(k, opts);
  return export_mesh(k);
}

NodeSet tag_arc(const TriMesh& mesh, const geometry::BoundaryArc& arc) {
  require(arc.domain == mesh.domain && mesh.domain != nullptr,
          "arc does not belong to the meshed domain");
  NodeSet set;
  set.label = "arc";
  for (const auto& [i, s] : mesh.boundary_params)
    if (arc.contains(s)) set.indices.push_back(i);
  std::sort(set.indices.begin(), set.indices.end());
  if (set.indices.empty())
    throw EmptyTag("no boundary node falls inside the arc; refine the mesh");
  return set;
}

NodeSet tag_boundary(const TriMesh& mesh) {
  NodeSet set;
  set.label = "boundary";
  for (const auto& [i, s] : mesh.boundary_params) set.indices.push_back(i);
  std::sort(set.indices.begin(), set.indices.end());
  if (set.indices.empty()) throw EmptyTag("mesh has no boundary nodes");
  return set;
}

namespace {

double dist_to_polyline(Point2 p, const Polyline& curve) {
  const auto& v = curve.vertices();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    best = std::min(best, geometry::segment_point_distance(v[i], v[i + 1], p));
  return best;
}

void check_connected(const TriMesh& mesh, NodeSet& set, const char* what) {
  if (set.indices.empty())
    throw DisconnectedTag(std::string(what) + ": empty tag");
  std::unordered_map<int, int> pos;
  for (std::size_t i = 0; i < set.indices.size(); ++i)
    pos[set.indices[i]] = static_cast<int>(i);
  std::vector<std::vector<int>> adj(set.indices.size());
  for (const auto& tr : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      const auto a = pos.find(tr[e]);
      const auto b = pos.find(tr[(e + 1) % 3]);
      if (a != pos.end() && b != pos.end()) {
        adj[a->second].push_back(b->second);
        adj[b->second].push_back(a->second);
      }
    }
  std::vector<char> seen(set.indices.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
  }
  if (count != set.indices.size())
    throw DisconnectedTag(std::string(what) + ": tagged set is disconnected");
}

}  // namespace

NodeSet tag_near_curve(const TriMesh& mesh, const Polyline& curve,
                       double radius) {
  NodeSet set;
  set.label = "curve";
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    if (mesh.is_boundary_node(static_cast<int>(i))) continue;
    if (dist_to_polyline(mesh.nodes[i], curve) <= radius)
      set.indices.push_back(static_cast<int>(i));
  }
  std::sort(set.indices.begin(), set.indices.end());
  check_connected(mesh, set, "tag_near_curve");
  return set;
}

NodeSet tag_near_point(const TriMesh& mesh, Point2 center, double radius,
                       const std::string& label) {
  NodeSet set;
  set.label = label;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    if (mesh.is_boundary_node(static_cast<int>(i))) continue;
    if (dist(mesh.nodes[i], center) <= radius)
      set.indices.push_back(static_cast<int>(i));
  }
  std::sort(set.indices.begin(), set.indices.end());
  return set;
}

Submesh extract_submesh(const TriMesh& mesh, const std::vector<int>& tris) {
  require(!tris.empty(), "submesh needs at least one triangle");
  Submesh out;
  out.mesh.domain = mesh.domain;
  std::vector<int> remap(mesh.nodes.size(), -1);
  for (int t : tris) {
    for (int v : mesh.triangles[t])
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(out.node_map.size());
        out.node_map.push_back(v);
      }
  }
  out.mesh.nodes.resize(out.node_map.size());
  for (std::size_t i = 0; i < out.node_map.size(); ++i) {
    out.mesh.nodes[i] = mesh.nodes[out.node_map[i]];
    const auto it = mesh.boundary_params.find(out.node_map[i]);
    if (it != mesh.boundary_params.end())
      out.mesh.boundary_params[static_cast<int>(i)] = it->second;
  }
  for (int t : tris) {
    const auto& tr = mesh.triangles[t];
    out.mesh.triangles.push_back({remap[tr[0]], remap[tr[1]], remap[tr[2]]});
    out.parent_tri.push_back(t);
  }
  for (const auto& e : mesh.domain_boundary_edges) {
    if (remap[e[0]] >= 0 && remap[e[1]] >= 0) {
      int a = remap[e[0]], b = remap[e[1]];
      if (a > b) std::swap(a, b);
      out.mesh.domain_boundary_edges.push_back({a, b});
    }
  }
  std::sort(out.mesh.domain_boundary_edges.begin(),
            out.mesh.domain_boundary_edges.end());
  out.mesh.h = out.mesh.max_edge_length();
  return out;
}

}  // namespace capdual::mesh
