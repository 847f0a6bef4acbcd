#pragma once

#include <cmath>
#include <vector>

#include "hardylab/angular.hpp"
#include "hardylab/errors.hpp"

namespace hardylab {

/// Axisymmetric tensor grid on the model half ball: radial nodes log-uniform
/// on [r_min, 1], angular nodes from the graded AngularMesh.  delta(r, phi)
/// = r cos(phi) is the distance to the flat boundary plane.
struct AxiGrid {
  std::vector<double> r;    // size jr, r.front() = r_min, r.back() = 1
  AngularMesh angular;      // size m
  double h_log = 0;         // uniform spacing in ln r
  int n = 3;                // ambient dimension (sets the volume measure)

  static AxiGrid make(double r_min, int jr, int m_angular, int n_dim = 3);

  int jr() const { return static_cast<int>(r.size()); }
  int m() const { return angular.size(); }
  int index(int j, int i) const { return j * m() + i; }
  double delta(int j, int i) const { return r[j] * std::cos(angular.phi[i]); }
  double r_min() const { return r.front(); }
};

/// Scalar field on an AxiGrid with optional centered-difference gradient
/// components (one-sided second order at edges).
struct SolutionField {
  AxiGrid grid;
  std::vector<double> values;           // size jr * m
  std::vector<double> grad_r;           // d u / d r (empty until computed)
  std::vector<double> grad_phi_over_r;  // (1/r) d u / d phi

  explicit SolutionField(const AxiGrid& g) : grid(g), values(g.jr() * g.m(), 0.0) {}

  double& at(int j, int i) { return values[grid.index(j, i)]; }
  double at(int j, int i) const { return values[grid.index(j, i)]; }
  bool has_gradient() const { return !grad_r.empty(); }

  void compute_gradient();
  /// |grad u| at a node; requires compute_gradient() first.
  double gradient_magnitude(int j, int i) const;
};

}  // namespace hardylab
