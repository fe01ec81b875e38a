#pragma once

// Test-only oracles: independent brute-force routes used to freeze expected
// values. Nothing here may call into the implementation paths under test.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracles {

// Composite midpoint rule with n subdivisions.
inline double midpoint_rule(const std::function<double(double)>& f, double a,
                            double b, int n) {
  double s = 0.0;
  const double h = (b - a) / n;
  for (int i = 0; i < n; ++i) s += f(a + (i + 0.5) * h);
  return s * h;
}

// Composite Simpson with n (even) subdivisions.
inline double simpson_rule(const std::function<double(double)>& f, double a,
                           double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Ring condenser capacity Cap_p(B(0,r), S(0,R); B(0,R)) by 1D quadrature of
// the constant-flux radial profile: u'(rho) = -K rho^{-1/(p-1)} with K fixed
// by u(r)-u(R)=1; the energy reduces to 2 pi K^{p-1}.
inline double ring_capacity_quadrature(double r, double R, double p,
                                       int n = 200001) {
  const double e = -1.0 / (p - 1.0);
  const double I =
      midpoint_rule([&](double rho) { return std::pow(rho, e); }, r, R, n);
  return 2.0 * std::numbers::pi * std::pow(I, 1.0 - p);
}

// Same quantity by direct convex minimization over piecewise-linear radial
// profiles: coordinate descent with ternary search per node, cascaded from a
// coarse grid so the sweeps converge.
inline double ring_capacity_minimization(double r, double R, double p,
                                         int levels = 4, int sweeps = 2500) {
  std::vector<double> u{1.0, 0.5, 0.0};  // coarsest profile
  double energy = 0.0;
  for (int lvl = 0; lvl < levels; ++lvl) {
    const int nodes = static_cast<int>(u.size());
    std::vector<double> rho(nodes), w(nodes - 1), dr(nodes - 1);
    for (int i = 0; i < nodes; ++i)
      rho[i] = r + (R - r) * i / (nodes - 1);
    for (int i = 0; i + 1 < nodes; ++i) {
      dr[i] = rho[i + 1] - rho[i];
      w[i] = 0.5 * (rho[i + 1] * rho[i + 1] - rho[i] * rho[i]);
    }
    const auto cell = [&](int i) {
      const double g = (u[i + 1] - u[i]) / dr[i];
      return w[i] * std::pow(std::abs(g), p);
    };
    for (int s = 0; s < sweeps; ++s) {
      for (int i = 1; i + 1 < nodes; ++i) {
        double lo = std::min(u[i - 1], u[i + 1]);
        double hi = std::max(u[i - 1], u[i + 1]);
        for (int it = 0; it < 60; ++it) {
          const double m1 = lo + (hi - lo) / 3.0;
          const double m2 = hi - (hi - lo) / 3.0;
          const double save = u[i];
          u[i] = m1;
          const double f1 = cell(i - 1) + cell(i);
          u[i] = m2;
          const double f2 = cell(i - 1) + cell(i);
          u[i] = save;
          if (f1 < f2)
            hi = m2;
          else
            lo = m1;
        }
        u[i] = 0.5 * (lo + hi);
      }
    }
    energy = 0.0;
    for (int i = 0; i + 1 < nodes; ++i) energy += cell(i);
    if (lvl + 1 < levels) {
      // Midpoint interpolation to the next dyadic grid.
      std::vector<double> fine(2 * nodes - 1);
      for (int i = 0; i < nodes; ++i) fine[2 * i] = u[i];
      for (int i = 0; i + 1 < nodes; ++i)
        fine[2 * i + 1] = 0.5 * (u[i] + u[i + 1]);
      u = std::move(fine);
    }
  }
  return 2.0 * std::numbers::pi * energy;
}

// Exact radial weighted length in the unit disk:
// integral_0^t (1-s)^e ds for e != -1.
inline double radial_weight_integral(double t, double e) {
  return (1.0 - std::pow(1.0 - t, e + 1.0)) / (e + 1.0);
}

}  // namespace oracles
