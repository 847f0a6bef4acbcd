#pragma once

#include <functional>
#include <vector>

#include "hardylab/grid.hpp"
#include "hardylab/params.hpp"

namespace hardylab {

/// Exact boundary kernel of the half-space operator with distance x_N:
/// cos^alpha(phi) r^(2 - N - alpha), normalized to 1 at (r=1, phi=0).
double martin_halfspace(double r, double phi, const HardyParams& hp);

/// Field of kernel values on the grid.
SolutionField martin_field(const AxiGrid& grid, const HardyParams& hp);

/// Discrete -L_mu u = -(Laplacian + mu/delta^2) u at interior nodes
/// (second-order differences in ln r and in the graded angle); boundary
/// nodes carry zero.
SolutionField lmu_apply(const SolutionField& field, const HardyParams& hp);

/// Fixed observation window for residual/profile measurements, away from all
/// artificial boundaries.
struct Window {
  double r_lo = 0.0, r_hi = 1.0;
  double cos_lo = 0.0;
  bool contains(const AxiGrid& g, int j, int i) const {
    return g.r[j] >= r_lo && g.r[j] <= r_hi && std::cos(g.angular.phi[i]) >= cos_lo;
  }
};

/// Sup over the window of |residual| / (|u| (r^-2 + delta^-2)), the natural
/// relative size of second-order terms.
double relative_residual_sup(const SolutionField& residual, const SolutionField& u,
                             const Window& w);

/// Solves -L_mu u = source with u = 0 on phi = pi/2, axis symmetry, Dirichlet
/// u-values `outer_data` (per angular node) at r = 1, and the zero-log-curvature
/// closure of u/K at r_min.  Internally solves for u / cos^alpha on a monotone
/// finite-volume stencil; direct sparse factorization.
SolutionField solve_linear_lmu(const AxiGrid& grid, const HardyParams& hp,
                               const SolutionField* source,
                               const std::vector<double>& outer_data);

/// Minimum over a family of bump x cos^a trial profiles of the discrete
/// Rayleigh quotient (integral |grad u|^2 - mu (u/delta)^2) / (integral u^2);
/// an upper estimate of the principal eigenvalue.
double rayleigh_lambda(const AxiGrid& grid, const HardyParams& hp, int trial_count);

/// Marcinkiewicz tail fit of a nonnegative field: weighted distribution
/// m(lambda) = sum_(u > lambda) delta^gamma cellvolume over 60 log-spaced
/// levels, tail exponent from the middle two decades.
struct WeakNormReport {
  double gamma = 0;
  double p_hat = 0;
  double lambda_lo = 0, lambda_hi = 0;  // fit window
  double norm_estimate = 0;             // sup lambda m(lambda)^(1/p_hat) on the window
};

WeakNormReport weak_tail(const SolutionField& field, double gamma);

}  // namespace hardylab
