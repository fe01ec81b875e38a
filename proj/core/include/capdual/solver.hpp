#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "capdual/geometry.hpp"
#include "capdual/mesh.hpp"

namespace capdual::solver {

using geometry::BoundaryArc;
using geometry::JordanPolygon;
using geometry::Point2;
using geometry::Polyline;
using mesh::NodeSet;
using mesh::TriMesh;

// Piecewise-linear nodal field on a triangulation.
struct ScalarField {
  const TriMesh* mesh = nullptr;
  std::vector<double> values;
};

struct SolverConfig {
  double p = 2.0;                    // energy exponent, 1 < p < inf
  std::vector<double> eps_schedule;  // decreasing regularization; empty:
                                     // {1e-1..1e-6}/diam chosen at solve time
  double tol_energy = 1e-10;
  double tol_field = 1e-6;
  int max_iters = 300;

  void validate() const;
};

SolverConfig default_config(double p);

double conjugate_exponent(double p);
// 1/p + 1/q = 1 within 1e-12.
bool conjugate_pair_valid(double p, double q);

struct CapacityResult {
  double value = 0.0;   // unregularized p-energy of the final field
  ScalarField field;
  int iterations = 0;
  bool converged = false;
  double h = 0.0;
  double p = 2.0;
  std::vector<double> energy_history;  // regularized energy per accepted step
  double final_residual = 0.0;         // relative linear-solve residual
  // Keeps field.mesh alive when the solve built its own mesh.
  std::shared_ptr<const TriMesh> mesh_storage;
};

// Sum over triangles of area * (eps^2 + |grad u|^2)^(p/2); the exact
// p-Dirichlet energy when eps = 0.
double p_energy(const ScalarField& u, double p, double eps);

// Minimizes the regularized p-energy over nodal fields with the given
// Dirichlet node sets by iteratively reweighted linear solves with
// continuation in eps and energy damping.
CapacityResult minimize(const TriMesh& mesh,
                        const std::vector<std::pair<NodeSet, double>>& dirichlet,
                        const SolverConfig& cfg);

// Same solver with per-node Dirichlet data (used by the conformal map).
CapacityResult minimize_values(
    const TriMesh& mesh, const std::vector<std::pair<int, double>>& dirichlet,
    const SolverConfig& cfg);

// Cap_p(E, F; Omega): meshes the domain at size h with refinement near the
// arc endpoints, imposes u=1 on E and u=0 on F, natural elsewhere.
CapacityResult capacity(const JordanPolygon& omega, const BoundaryArc& E,
                        const BoundaryArc& F, const SolverConfig& cfg,
                        double h);

// Cap_p(gamma, dOmega; Omega): u=1 on interior nodes within h of the curve,
// u=0 on all boundary nodes; mesh refined near the curve.
CapacityResult curve_capacity(const JordanPolygon& omega, const Polyline& gamma,
                              const SolverConfig& cfg, double h);

// Capacity between two eps-disks at distance d inside a box_size square for
// exponent q > 2; scaling checks only.
double point_capacity(double q, double d, double eps, double box_size);

// Richardson extrapolation from values at mesh sizes h and h/2 assuming
// error ~ h^rate.
double richardson(double value_h, double value_h_half, double rate = 1.0);

}  // namespace capdual::solver
