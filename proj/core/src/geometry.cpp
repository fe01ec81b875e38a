#include "capdual/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace capdual::geometry {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double segment_point_distance(Point2 a, Point2 b, Point2 p) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return dist(a, p);
  double t = dot(p - a, ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return dist(a + t * ab, p);
}

namespace {

// Closest point parameter t in [0,1] of p on segment (a,b).
double segment_project(Point2 a, Point2 b, Point2 p) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return 0.0;
  return std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
}

bool on_segment_collinear(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  const int d1 = sgn(orient(c, d, a));
  const int d2 = sgn(orient(c, d, b));
  const int d3 = sgn(orient(a, b, c));
  const int d4 = sgn(orient(a, b, d));
  if (d1 != d2 && d3 != d4 && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0)
    return true;
  if (d1 == 0 && on_segment_collinear(c, d, a)) return true;
  if (d2 == 0 && on_segment_collinear(c, d, b)) return true;
  if (d3 == 0 && on_segment_collinear(a, b, c)) return true;
  if (d4 == 0 && on_segment_collinear(a, b, d)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Polyline

Polyline::Polyline(std::vector<Point2> vertices)
    : vertices_(std::move(vertices)) {
  require(vertices_.size() >= 2, "polyline needs at least two vertices");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    require(finite(vertices_[i]), "polyline vertex not finite");
    if (i > 0)
      require(!(vertices_[i].x == vertices_[i - 1].x &&
                vertices_[i].y == vertices_[i - 1].y),
              "consecutive polyline vertices must be distinct");
  }
}

double Polyline::length() const {
  double s = 0.0;
  for (std::size_t i = 1; i < vertices_.size(); ++i)
    s += dist(vertices_[i - 1], vertices_[i]);
  return s;
}

Polyline Polyline::concat(const Polyline& tail) const {
  const double scale = std::max(1.0, length() + tail.length());
  require(dist(back(), tail.front()) <= 1e-12 * scale,
          "polyline concat endpoints do not match");
  std::vector<Point2> v = vertices_;
  v.insert(v.end(), tail.vertices().begin() + 1, tail.vertices().end());
  return Polyline(std::move(v));
}

Polyline segment(Point2 a, Point2 b) {
  return Polyline(std::vector<Point2>{a, b});
}

// ---------------------------------------------------------------------------
// Uniform grid over the boundary edges: exact distance queries and candidate
// collection for segment tests.

namespace detail {

class EdgeGrid {
 public:
  EdgeGrid(std::vector<Point2> verts, Point2 lo, Point2 hi)
      : verts_(std::move(verts)), n_(verts_.size()) {
    const double pad = 1e-9 * (dist(lo, hi) + 1.0);
    lo_ = {lo.x - pad, lo.y - pad};
    hi_ = {hi.x + pad, hi.y + pad};
    const int target = std::clamp(
        static_cast<int>(std::sqrt(static_cast<double>(n_)) * 2.0), 8, 128);
    nx_ = ny_ = target;
    cw_ = (hi_.x - lo_.x) / nx_;
    ch_ = (hi_.y - lo_.y) / ny_;
    cells_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (std::size_t e = 0; e < n_; ++e) {
      const Point2 a = verts_[e];
      const Point2 b = verts_[(e + 1) % n_];
      int i0, j0, i1, j1;
      cell_of(Point2{std::min(a.x, b.x), std::min(a.y, b.y)}, i0, j0);
      cell_of(Point2{std::max(a.x, b.x), std::max(a.y, b.y)}, i1, j1);
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
          cells_[idx(i, j)].push_back(static_cast<int>(e));
    }
    stamp_.assign(n_, 0);
  }

  struct Nearest {
    double distance = kInf;
    int edge = -1;
    double t = 0.0;
  };

  Nearest nearest(Point2 p) const {
    Nearest best;
    int ci, cj;
    const double outside = clamp_offset(p, ci, cj);
    const int max_ring = std::max(nx_, ny_);
    ++stamp_gen_;
    for (int r = 0; r <= max_ring; ++r) {
      if (r > 0) {
        const double lb = outside + (r - 1) * std::min(cw_, ch_);
        if (lb > best.distance) break;
      }
      visit_ring(ci, cj, r, [&](const std::vector<int>& cell) {
        for (int e : cell) {
          if (stamp_[e] == stamp_gen_) continue;
          stamp_[e] = stamp_gen_;
          const Point2 a = verts_[e];
          const Point2 b = verts_[(e + 1) % n_];
          const double t = segment_project(a, b, p);
          const double d = dist(a + t * (b - a), p);
          if (d < best.distance ||
              (d == best.distance && e < best.edge)) {
            best = {d, e, t};
          }
        }
      });
    }
    return best;
  }

  // Edge indices in cells traversed by segment (a,b); conservative superset
  // of boundary edges the segment can touch.
  void segment_candidates(Point2 a, Point2 b, std::vector<int>& out) const {
    out.clear();
    int i0, j0, i1, j1;
    cell_of(a, i0, j0);
    cell_of(b, i1, j1);
    ++stamp_gen_;
    // Supercover walk padded by one cell ring for robustness.
    const int steps =
        2 * std::max(std::abs(i1 - i0), std::abs(j1 - j0)) + 1;
    for (int s = 0; s <= steps; ++s) {
      const double t = static_cast<double>(s) / steps;
      const Point2 q = a + t * (b - a);
      int ci, cj;
      cell_of(q, ci, cj);
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int ii = ci + di, jj = cj + dj;
          if (ii < 0 || jj < 0 || ii >= nx_ || jj >= ny_) continue;
          for (int e : cells_[idx(ii, jj)]) {
            if (stamp_[e] == stamp_gen_) continue;
            stamp_[e] = stamp_gen_;
            out.push_back(e);
          }
        }
    }
    std::sort(out.begin(), out.end());
  }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(j) * nx_ + i;
  }

  void cell_of(Point2 p, int& i, int& j) const {
    i = std::clamp(static_cast<int>((p.x - lo_.x) / cw_), 0, nx_ - 1);
    j = std::clamp(static_cast<int>((p.y - lo_.y) / ch_), 0, ny_ - 1);
  }

  // Distance from p to the grid box (0 when inside); also outputs its cell.
  double clamp_offset(Point2 p, int& i, int& j) const {
    cell_of(p, i, j);
    const double dx = std::max({lo_.x - p.x, 0.0, p.x - hi_.x});
    const double dy = std::max({lo_.y - p.y, 0.0, p.y - hi_.y});
    return std::sqrt(dx * dx + dy * dy);
  }

  template <class F>
  void visit_ring(int ci, int cj, int r, F&& f) const {
    if (r == 0) {
      if (ci >= 0 && cj >= 0 && ci < nx_ && cj < ny_) f(cells_[idx(ci, cj)]);
      return;
    }
    for (int i = ci - r; i <= ci + r; ++i) {
      for (int j : {cj - r, cj + r}) {
        if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
        f(cells_[idx(i, j)]);
      }
    }
    for (int j = cj - r + 1; j <= cj + r - 1; ++j) {
      for (int i : {ci - r, ci + r}) {
        if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
        f(cells_[idx(i, j)]);
      }
    }
  }

  std::vector<Point2> verts_;
  std::size_t n_;
  Point2 lo_, hi_;
  int nx_ = 1, ny_ = 1;
  double cw_ = 1.0, ch_ = 1.0;
  std::vector<std::vector<int>> cells_;
  mutable std::vector<std::uint32_t> stamp_;
  mutable std::uint32_t stamp_gen_ = 0;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// JordanPolygon

JordanPolygon::JordanPolygon(std::vector<Point2> vertices)
    : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  require(n >= 3, "polygon needs at least three vertices");
  double area2 = 0.0;
  bbox_min_ = {kInf, kInf};
  bbox_max_ = {-kInf, -kInf};
  for (std::size_t i = 0; i < n; ++i) {
    require(finite(vertices_[i]), "polygon vertex not finite");
    const Point2 a = vertices_[i];
    const Point2 b = vertices_[(i + 1) % n];
    require(!(a.x == b.x && a.y == b.y), "duplicate consecutive vertex");
    area2 += cross(a, b);
    bbox_min_ = {std::min(bbox_min_.x, a.x), std::min(bbox_min_.y, a.y)};
    bbox_max_ = {std::max(bbox_max_.x, a.x), std::max(bbox_max_.y, a.y)};
  }
  area_ = 0.5 * area2;
  require(area_ > 0.0, "polygon must be counterclockwise with positive area");
  diameter_ = dist(bbox_min_, bbox_max_);

  cum_length_.resize(n + 1);
  cum_length_[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    cum_length_[i + 1] =
        cum_length_[i] + dist(vertices_[i], vertices_[(i + 1) % n]);

  // Simplicity: no two non-adjacent edges may touch.
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = vertices_[i];
    const Point2 b = vertices_[(i + 1) % n];
    const double lox = std::min(a.x, b.x), hix = std::max(a.x, b.x);
    const double loy = std::min(a.y, b.y), hiy = std::max(a.y, b.y);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;  // adjacent
      const Point2 c = vertices_[j];
      const Point2 d = vertices_[(j + 1) % n];
      if (std::max(c.x, d.x) < lox || std::min(c.x, d.x) > hix ||
          std::max(c.y, d.y) < loy || std::min(c.y, d.y) > hiy)
        continue;
      require(!segments_intersect(a, b, c, d), "polygon edges cross");
    }
  }

  grid_ = std::make_shared<detail::EdgeGrid>(vertices_, bbox_min_, bbox_max_);
}

Point2 JordanPolygon::centroid() const {
  double cx = 0.0, cy = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = vertices_[i];
    const Point2 b = vertices_[(i + 1) % n];
    const double w = cross(a, b);
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  return {cx / (6.0 * area_), cy / (6.0 * area_)};
}

double JordanPolygon::wrap(double s) const {
  const double p = perimeter();
  double r = std::fmod(s, p);
  if (r < 0.0) r += p;
  return r;
}

Point2 JordanPolygon::point_at(double s) const {
  const double t = wrap(s);
  // cum_length_ is sorted; find edge containing t.
  const auto it = std::upper_bound(cum_length_.begin(), cum_length_.end(), t);
  std::size_t e = static_cast<std::size_t>(
      std::max<std::ptrdiff_t>(0, it - cum_length_.begin() - 1));
  if (e >= vertices_.size()) e = vertices_.size() - 1;
  const double s0 = cum_length_[e];
  const double len = cum_length_[e + 1] - s0;
  const Point2 a = vertices_[e];
  const Point2 b = vertices_[(e + 1) % vertices_.size()];
  if (len == 0.0) return a;
  return a + ((t - s0) / len) * (b - a);
}

double JordanPolygon::nearest_boundary_param(Point2 z) const {
  const auto near = grid_->nearest(z);
  const std::size_t e = static_cast<std::size_t>(near.edge);
  return wrap(cum_length_[e] + near.t * (cum_length_[e + 1] - cum_length_[e]));
}

// ---------------------------------------------------------------------------
// BoundaryArc / Quadrilateral

double BoundaryArc::length() const {
  require(domain != nullptr, "arc without domain");
  const double p = domain->perimeter();
  double d = std::fmod(s_end - s_start, p);
  if (d < 0.0) d += p;
  return d == 0.0 ? p : d;
}

bool BoundaryArc::contains(double s) const {
  const double p = domain->perimeter();
  const double eps = 1e-9 * p;
  double off = std::fmod(s - s_start, p);
  if (off < 0.0) off += p;
  if (off > p - eps) off -= p;  // wrap points just before s_start
  return off <= length() + eps;
}

// ---------------------------------------------------------------------------
// Predicates

double dist_to_boundary(Point2 z, const JordanPolygon& omega) {
  return omega.grid().nearest(z).distance;
}

bool point_in_domain(Point2 z, const JordanPolygon& omega) {
  const auto& v = omega.vertices();
  const std::size_t n = v.size();
  // Exact boundary points are outside by convention.
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = v[i], b = v[(i + 1) % n];
    if (orient(a, b, z) == 0.0 && on_segment_collinear(a, b, z)) return false;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((v[i].y > z.y) != (v[j].y > z.y)) {
      const double xint =
          (v[j].x - v[i].x) * (z.y - v[i].y) / (v[j].y - v[i].y) + v[i].x;
      if (z.x < xint) inside = !inside;
    }
  }
  return inside;
}

bool segment_clear_of_boundary(Point2 a, Point2 b,
                               const JordanPolygon& omega) {
  static thread_local std::vector<int> cand;
  omega.grid().segment_candidates(a, b, cand);
  return cand.empty();
}

bool segment_in_domain(Point2 a, Point2 b, const JordanPolygon& omega) {
  const double tol = 1e-12 * omega.diameter();
  const bool a_on = dist_to_boundary(a, omega) <= tol;
  const bool b_on = dist_to_boundary(b, omega) <= tol;
  if (!a_on && !point_in_domain(a, omega)) return false;
  if (!b_on && !point_in_domain(b, omega)) return false;
  if (a.x == b.x && a.y == b.y) return true;

  static thread_local std::vector<int> cand;
  omega.grid().segment_candidates(a, b, cand);
  const auto& v = omega.vertices();
  const std::size_t n = v.size();
  const auto is_endpoint = [&](Point2 p) {
    return (p.x == a.x && p.y == a.y) || (p.x == b.x && p.y == b.y);
  };
  for (int e : cand) {
    const Point2 c = v[e], d = v[(e + 1) % n];
    const int d1 = sgn(orient(c, d, a));
    const int d2 = sgn(orient(c, d, b));
    const int d3 = sgn(orient(a, b, c));
    const int d4 = sgn(orient(a, b, d));
    if (d1 != d2 && d3 != d4 && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0)
      return false;  // proper crossing
    if (d1 == 0 && d2 == 0) {
      // Collinear with the edge: forbid overlap of positive length.
      const bool c_in = on_segment_collinear(a, b, c) && !is_endpoint(c);
      const bool d_in = on_segment_collinear(a, b, d) && !is_endpoint(d);
      const bool a_in = on_segment_collinear(c, d, a);
      const bool b_in = on_segment_collinear(c, d, b);
      if (c_in || d_in || (a_in && b_in)) return false;
      continue;
    }
    // Boundary vertex in the open interior of (a,b): tangency or crossing.
    if (d3 == 0 && on_segment_collinear(a, b, c) && !is_endpoint(c))
      return false;
    if (d4 == 0 && on_segment_collinear(a, b, d) && !is_endpoint(d))
      return false;
  }
  // No crossings; decide by an interior sample.
  const Point2 mid = 0.5 * (a + b);
  if (point_in_domain(mid, omega)) return true;
  // Midpoint can sit exactly on the boundary; fall back to quarter points.
  const Point2 q1 = a + 0.25 * (b - a);
  const Point2 q3 = a + 0.75 * (b - a);
  return point_in_domain(q1, omega) && point_in_domain(q3, omega);
}

// ---------------------------------------------------------------------------
// Weighted length

namespace {

struct SegmentIntegrand {
  Point2 a, dir;  // point(t) = a + t*dir, t in [0,L] arc length, |dir|=1
  const JordanPolygon* omega;
  double exponent;
  long evals = 0;

  double operator()(double t) {
    ++evals;
    const double d = dist_to_boundary(a + t * dir, *omega);
    return std::pow(d, exponent);
  }
};

double adaptive_simpson_rec(SegmentIntegrand& f, double a, double b,
                            double fa, double fm, double fb, double whole,
                            double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                              depth - 1);
}

double adaptive_simpson(SegmentIntegrand& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // Depth 14 caps the subdivision at 2^14 intervals per cell.
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole,
                              std::max(tol, 1e-300), 14);
}

double integrate_segment(Point2 pa, Point2 pb, const JordanPolygon& omega,
                         double exponent) {
  const double L = dist(pa, pb);
  if (L == 0.0) return 0.0;
  SegmentIntegrand f{pa, (1.0 / L) * (pb - pa), &omega, exponent};

  const double tol_on = 1e-12 * omega.diameter();
  const double da = dist_to_boundary(pa, omega);
  const double db = dist_to_boundary(pb, omega);
  const bool sing_a = da <= tol_on;
  const bool sing_b = db <= tol_on;
  if (exponent <= -1.0 && (sing_a || sing_b))
    throw DivergentIntegral(
        "weighted_length: exponent <= -1 with an endpoint on the boundary");

  const double rel = 1e-7;
  if (exponent >= 0.0 || (da > L && db > L)) {
    // Smooth regime; single adaptive pass with a crude scale estimate.
    const double scale =
        L * std::pow(std::max({da, db, tol_on, 1e-30}), exponent);
    return adaptive_simpson(f, 0.0, L, rel * std::max(scale, 1e-30));
  }

  // Negative exponent with a near-boundary endpoint: geometric subdivision
  // clustering toward each endpoint; the boundary-touching tail uses the
  // linear growth of the distance off a polygonal boundary.
  const auto levels = [&](double d_end, bool singular) {
    if (singular) return 48;
    const double ratio = L / std::max(d_end, 1e-300);
    return std::clamp(static_cast<int>(std::ceil(std::log2(ratio))) + 2, 1,
                      48);
  };
  const int jl = levels(da, sing_a);
  const int jr = levels(db, sing_b);
  std::vector<double> knots;
  knots.push_back(0.0);
  for (int j = jl; j >= 1; --j) knots.push_back(L * std::ldexp(1.0, -j));
  for (int j = 1; j <= jr; ++j) knots.push_back(L - L * std::ldexp(1.0, -j));
  knots.push_back(L);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  double total = 0.0;
  std::size_t lo_idx = 0;
  std::size_t hi_idx = knots.size() - 1;
  const auto analytic_tail = [&](double t_ref, double d_ref) {
    // Tail of length t_ref with d(t) ~ (d_ref/t_ref) t.
    const double slope = d_ref / t_ref;
    return std::pow(slope, exponent) * std::pow(t_ref, exponent + 1.0) /
           (exponent + 1.0);
  };
  if (sing_a) {
    // Merge cells whose reference distance vanishes in floating point.
    std::size_t k = 1;
    double d_ref = 0.0;
    for (; k < hi_idx; ++k) {
      d_ref = dist_to_boundary(f.a + knots[k] * f.dir, omega);
      if (d_ref > 0.0) break;
    }
    if (!(d_ref > 0.0))
      throw PreconditionError(
          "weighted_length: curve runs along the boundary");
    total += analytic_tail(knots[k], d_ref);
    lo_idx = k;
  }
  if (sing_b) {
    std::size_t k = hi_idx - 1;
    double d_ref = 0.0;
    for (; k > lo_idx; --k) {
      d_ref = dist_to_boundary(f.a + knots[k] * f.dir, omega);
      if (d_ref > 0.0) break;
    }
    if (!(d_ref > 0.0))
      throw PreconditionError(
          "weighted_length: curve runs along the boundary");
    total += analytic_tail(L - knots[k], d_ref);
    hi_idx = k;
  }

  // First pass: composite estimate per remaining cell to set tolerances.
  double estimate = std::abs(total);
  std::vector<double> cell_est(knots.size() - 1, 0.0);
  for (std::size_t i = lo_idx; i < hi_idx; ++i) {
    const double fm = f(0.5 * (knots[i] + knots[i + 1]));
    cell_est[i] = (knots[i + 1] - knots[i]) * fm;
    estimate += cell_est[i];
  }
  estimate = std::max(estimate, 1e-30);

  for (std::size_t i = lo_idx; i < hi_idx; ++i) {
    const double tol =
        std::max(rel * estimate * 0.02, rel * std::abs(cell_est[i]));
    total += adaptive_simpson(f, knots[i], knots[i + 1], tol);
  }
  return total;
}

}  // namespace

double weighted_length(const Polyline& curve, const JordanPolygon& omega,
                       double exponent) {
  const auto& v = curve.vertices();
  const double tol_on = 1e-12 * omega.diameter();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = dist_to_boundary(v[i], omega);
    if (d > tol_on)
      require(point_in_domain(v[i], omega),
              "weighted_length: curve leaves the domain");
    // Vertices on the boundary are allowed; each incident segment treats
    // them as a (one-sided) singular endpoint of its own integral.
  }
  if (exponent == 0.0) return curve.length();

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    total += integrate_segment(v[i], v[i + 1], omega, exponent);
  return total;
}

Quadrilateral split_boundary(const JordanPolygon& omega,
                             const std::array<double, 4>& cuts) {
  const double p = omega.perimeter();
  std::array<double, 4> c;
  for (int i = 0; i < 4; ++i) {
    if (!std::isfinite(cuts[i])) throw InvalidCuts("cut parameter not finite");
    c[i] = omega.wrap(cuts[i]);
  }
  double gap_sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    double g = std::fmod(c[(i + 1) % 4] - c[i], p);
    if (g < 0.0) g += p;
    if (g == 0.0)
      throw InvalidCuts("duplicate cut parameters");
    gap_sum += g;
  }
  if (std::abs(gap_sum - p) > 1e-9 * p)
    throw InvalidCuts("cuts are not strictly increasing modulo the perimeter");
  Quadrilateral q;
  for (int i = 0; i < 4; ++i)
    q.arcs[i] = BoundaryArc{&omega, c[i], c[(i + 1) % 4]};
  return q;
}

}  // namespace capdual::geometry
