#include "hardylab/grid.hpp"

#include <cmath>

namespace hardylab {

AxiGrid AxiGrid::make(double r_min, int jr, int m_angular, int n_dim) {
  if (!(r_min > 0.0) || !(r_min < 1.0)) {
    throw domain_error("AxiGrid: r_min must lie in (0, 1)");
  }
  if (jr < 8) throw domain_error("AxiGrid: need at least 8 radial nodes");
  if (n_dim < 3) throw domain_error("AxiGrid: dimension must be >= 3");
  AxiGrid g;
  g.n = n_dim;
  g.h_log = -std::log(r_min) / static_cast<double>(jr - 1);
  g.r.resize(jr);
  for (int j = 0; j < jr; ++j) {
    g.r[j] = r_min * std::exp(g.h_log * static_cast<double>(j));
  }
  g.r.back() = 1.0;
  g.angular = AngularMesh::cosine(m_angular);
  return g;
}

void SolutionField::compute_gradient() {
  const int jr = grid.jr();
  const int m = grid.m();
  grad_r.assign(jr * m, 0.0);
  grad_phi_over_r.assign(jr * m, 0.0);
  const auto& phi = grid.angular.phi;

  auto d_phi = [&](int j, int i) {
    if (i == 0) {
      const double h1 = phi[1] - phi[0], h2 = phi[2] - phi[0];
      return (-(h1 + h2) / (h1 * h2) * at(j, 0) + h2 / (h1 * (h2 - h1)) * at(j, 1) -
              h1 / (h2 * (h2 - h1)) * at(j, 2));
    }
    if (i == m - 1) {
      const double h1 = phi[m - 1] - phi[m - 2], h2 = phi[m - 1] - phi[m - 3];
      return ((h1 + h2) / (h1 * h2) * at(j, m - 1) - h2 / (h1 * (h2 - h1)) * at(j, m - 2) +
              h1 / (h2 * (h2 - h1)) * at(j, m - 3));
    }
    return (at(j, i + 1) - at(j, i - 1)) / (phi[i + 1] - phi[i - 1]);
  };
  auto d_log_r = [&](int j, int i) {
    if (j == 0) return (-1.5 * at(0, i) + 2.0 * at(1, i) - 0.5 * at(2, i)) / grid.h_log;
    if (j == jr - 1) {
      return (1.5 * at(jr - 1, i) - 2.0 * at(jr - 2, i) + 0.5 * at(jr - 3, i)) / grid.h_log;
    }
    return (at(j + 1, i) - at(j - 1, i)) / (2.0 * grid.h_log);
  };

  for (int j = 0; j < jr; ++j) {
    for (int i = 0; i < m; ++i) {
      const int k = grid.index(j, i);
      grad_r[k] = d_log_r(j, i) / grid.r[j];
      grad_phi_over_r[k] = d_phi(j, i) / grid.r[j];
    }
  }
}

double SolutionField::gradient_magnitude(int j, int i) const {
  const int k = grid.index(j, i);
  return std::hypot(grad_r[k], grad_phi_over_r[k]);
}

}  // namespace hardylab
