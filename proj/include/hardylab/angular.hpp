#pragma once

#include <string>
#include <vector>

#include "hardylab/errors.hpp"

namespace hardylab {

/// Graded mesh on [0, pi/2] clustered toward pi/2, where the solutions of
/// interest behave like cos(phi)^alpha.
///
/// Nodes come from the smooth map phi(xi) = (pi/2) sin(pi xi / 2) of a
/// uniform reference grid xi_i = i/(M-1); spacing decreases monotonically
/// toward pi/2 and the last cell has width ~ (pi/2 - phi).
struct AngularMesh {
  std::vector<double> phi;  // strictly increasing, phi[0] = 0, phi[M-1] = pi/2
  std::vector<double> xi;   // uniform reference coordinate
  double dxi = 0;
  std::string grading = "cosine";

  static AngularMesh cosine(int m);

  int size() const { return static_cast<int>(phi.size()); }
  /// Map derivative d phi / d xi.
  static double map_deriv(double xi_v);
  static double map_phi(double xi_v);
};

/// Precomputed tables for the weighted angular operator
///   D v = (sin^(N-2) cos^(2 alpha))^{-1} d/dphi [ sin^(N-2) cos^(2 alpha) dv/dphi ]
/// discretized in finite-volume form on the reference grid, with a
/// regularity (ghost) closure at the pole and a zero-flux half cell at pi/2.
struct AngularTables {
  int m = 0;
  int n = 3;
  double alpha = 0.5;
  double dxi = 0;
  std::vector<double> c, s;    // cos/sin at nodes; c[m-1] = 0 exactly
  std::vector<double> p_half;  // W/g' at reference midpoints, size m-1
  std::vector<double> theta;   // W*g' at nodes
  double pole_coeff = 0;       // 2 (N-1) / phi_1^2
  // boundary half cell at pi/2
  double t_half = 0;   // pi/2 - phi(edge)
  double t_mid = 0;    // interior quadrature point (in distance to pi/2)
  double p_edge = 0;   // flux coefficient W/g' at the half-cell edge
  double scale_b = 0;  // t_half^(2 alpha + 1)/(2 alpha + 1), the cell measure scale
  double phi_cell = 0; // phi[m-1] - phi[m-2]
  double w_mid = 0;    // weight W at the quadrature point
  double th_interp = 0;  // interpolation weight of the last node at t_mid

  AngularTables() = default;
  AngularTables(const AngularMesh& mesh, int n_dim, double alpha_exp);

  double weight(double phi) const;
};

}  // namespace hardylab
