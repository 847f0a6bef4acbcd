#include "hardylab/angular.hpp"

#include <cmath>
#include <numbers>

namespace hardylab {

double AngularMesh::map_phi(double xi_v) {
  return 0.5 * std::numbers::pi * std::sin(0.5 * std::numbers::pi * xi_v);
}

double AngularMesh::map_deriv(double xi_v) {
  const double p = std::numbers::pi;
  return 0.25 * p * p * std::cos(0.5 * p * xi_v);
}

AngularMesh AngularMesh::cosine(int m) {
  if (m < 8) throw domain_error("AngularMesh: need at least 8 nodes");
  AngularMesh mesh;
  mesh.dxi = 1.0 / static_cast<double>(m - 1);
  mesh.phi.resize(m);
  mesh.xi.resize(m);
  for (int i = 0; i < m; ++i) {
    mesh.xi[i] = static_cast<double>(i) * mesh.dxi;
    mesh.phi[i] = map_phi(mesh.xi[i]);
  }
  mesh.phi.front() = 0.0;
  mesh.phi.back() = 0.5 * std::numbers::pi;
  return mesh;
}

double AngularTables::weight(double phi) const {
  return std::pow(std::sin(phi), n - 2) * std::pow(std::cos(phi), 2.0 * alpha);
}

AngularTables::AngularTables(const AngularMesh& mesh, int n_dim, double alpha_exp) {
  m = mesh.size();
  n = n_dim;
  alpha = alpha_exp;
  dxi = mesh.dxi;
  c.resize(m);
  s.resize(m);
  for (int i = 0; i < m; ++i) {
    c[i] = std::cos(mesh.phi[i]);
    s[i] = std::sin(mesh.phi[i]);
  }
  c[m - 1] = 0.0;
  s[m - 1] = 1.0;
  p_half.resize(m - 1);
  for (int i = 0; i + 1 < m; ++i) {
    const double xi_h = 0.5 * (mesh.xi[i] + mesh.xi[i + 1]);
    p_half[i] = weight(AngularMesh::map_phi(xi_h)) / AngularMesh::map_deriv(xi_h);
  }
  theta.resize(m);
  for (int i = 0; i < m; ++i) {
    theta[i] = weight(mesh.phi[i]) * AngularMesh::map_deriv(mesh.xi[i]);
  }
  pole_coeff = 2.0 * (n - 1) / (mesh.phi[1] * mesh.phi[1]);
  const double xi_edge = 1.0 - 0.5 * dxi;
  t_half = 0.5 * std::numbers::pi - AngularMesh::map_phi(xi_edge);
  t_mid = 0.5 * t_half;
  p_edge = p_half[m - 2];
  scale_b = std::pow(t_half, 2.0 * alpha + 1.0) / (2.0 * alpha + 1.0);
  phi_cell = mesh.phi[m - 1] - mesh.phi[m - 2];
  const double phi_m = 0.5 * std::numbers::pi - t_mid;
  th_interp = (phi_m - mesh.phi[m - 2]) / phi_cell;
  w_mid = weight(phi_m);
}

}  // namespace hardylab
