#pragma once

#include <vector>

#include "hardylab/angular.hpp"
#include "hardylab/params.hpp"

namespace hardylab {

/// Discrete positive profile omega(phi) on the hemisphere, solving
///   omega'' + (N-2) cot(phi) omega' + mu omega / cos^2(phi) + ell omega
///     = (sing^2 omega^2 + omega'^2)^(q/2)
/// with symmetry at the pole and omega(pi/2) = 0.
struct HemisphereSolution {
  AngularMesh mesh;
  HardyParams hp;
  ExponentPack exponents;
  std::vector<double> omega;  // node values, omega.back() == 0
  std::vector<double> v;      // regularized omega / cos^alpha, incl. boundary limit
  double residual_sup = 0;    // scaled residual of the converged discrete system
  int newton_iterations = 0;
  int fallback_sweeps = 0;
};

struct HemisphereSolveOptions {
  enum class Start { Supersolution, Subsolution };
  Start start = Start::Supersolution;
  int max_newton = 40;
  int max_halvings = 8;
  int max_sweeps = 200;       // monotone-iteration fallback budget
  double tol_target = 1e-10;  // iterate until here if possible
  double tol_declare = 1e-8;  // accept convergence at this level
};

/// Solves the profile problem by damped Newton iteration on v = omega/cos^alpha,
/// clamped to the bracket [gamma2 cos^(alpha0-alpha), gamma1].  The fallback is
/// a monotone shifted sweep.  Throws supercritical_error for q >= q_crit and
/// convergence_error if neither path reaches tol_declare.
HemisphereSolution solve_omega(const HardyParams& hp, double q, const AngularMesh& mesh,
                               const HemisphereSolveOptions& opts = {});

/// Finite-difference residual of the profile equation at interior nodes
/// (index 1 .. M-2), directly in the omega variable.
std::vector<double> ode_residual(const HemisphereSolution& sol);

/// Least-squares slope of log(omega) against log(cos phi) near pi/2; for a
/// converged profile this approximates alpha.  The window starts at the last
/// interior node and covers one decade of cos(phi), widened to at least
/// eight nodes.
double boundary_exponent_fit(const HemisphereSolution& sol);

/// Sup-norm gap between solves started from the supersolution and from the
/// subsolution.
double uniqueness_probe(const HardyParams& hp, double q, const AngularMesh& mesh);

/// Value of the separable field r^(-sing_exp) omega at (r, node i), i.e. the
/// action of the scaling group on the reconstructed solution is the identity.
double separable_field(const HemisphereSolution& sol, double r, int node);

}  // namespace hardylab
