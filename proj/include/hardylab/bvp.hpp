#pragma once

#include <optional>
#include <vector>

#include "hardylab/fieldops.hpp"
#include "hardylab/grid.hpp"
#include "hardylab/params.hpp"

namespace hardylab {

/// One converged solve of -L_mu u + |grad u|^q = 0 with boundary mass k at
/// the origin, realized through Dirichlet data k*K on the outer circle.
struct WeakSingularityRun {
  double k = 0;
  HardyParams hp;
  ExponentPack exponents;
  SolutionField field;
  double residual_sup = 0;
  int newton_iterations = 0;
  int picard_steps = 0;

  WeakSingularityRun(const AxiGrid& g) : field(g) {}
};

struct BvpSolveOptions {
  int max_newton = 60;
  int max_halvings = 8;
  int max_picard = 60;
  double tol_target = 1e-10;
  double tol_declare = 1e-8;
  double grad_smoothing = 1e-12;  // epsilon in (|grad u|^2 + eps^2)^(q/2)
  const SolutionField* initial = nullptr;  // warm start (values in u form)
  double initial_mass = 0;  // mass of the warm-start run; the guess is scaled
                            // by k/initial_mass so iteration starts from above
};

/// Newton solve with initial guess k*K, iterates clamped to [0, k*K];
/// Picard steps (linear solve against the frozen absorption) as fallback.
WeakSingularityRun solve_weak(double k, const HardyParams& hp, double q, const AxiGrid& grid,
                              const BvpSolveOptions& opts = {});

/// General absorption solve -L_mu u + |grad u|^q = 0 with arbitrary
/// nonnegative Dirichlet u-values on the outer circle (per angular node);
/// the kernel-multiple problem above is the special case u_outer = k K.
SolutionField solve_absorption(const AxiGrid& grid, const HardyParams& hp, double q,
                               const std::vector<double>& outer_u,
                               const BvpSolveOptions& opts = {});

/// u / (k K) along the axis phi = 0 at every radial node, plus the
/// extrapolated r -> 0 limit (least-squares in r^e with the known deficit
/// exponent e = N + alpha - (N + alpha - 1) q).
struct RatioTrace {
  std::vector<double> r;
  std::vector<double> ratio;
  double extrapolated = 0;
};

RatioTrace ratio_trace(const WeakSingularityRun& run);

/// Normalized sups behind the pointwise bounds
///   u <= C delta^alpha r^(-sing-alpha),  |grad u| <= C delta^(alpha-1) r^(-sing-alpha).
struct AprioriReport {
  double sup_u = 0;        // over all interior nodes
  double sup_grad = 0;
  double sup_u_core = 0;   // over the self-similar window r in [4 r_min, 1/4]
  double sup_grad_core = 0;
  double inf_u_core = 0;
  double two_sided_c = 0;  // max(sup_u_core, 1/inf_u_core)
};

AprioriReport apriori_check(const SolutionField& field, const ExponentPack& pk);

/// true iff run1.field <= run2.field + 1e-10 nodewise (grids must match).
bool comparison_check(const WeakSingularityRun& run1, const WeakSingularityRun& run2);

/// Solves an increasing mass ladder (warm-started), rescales the top run at
/// radii near r_min and compares against the hemisphere profile.
struct StrongLimitReport {
  std::vector<double> ladder;
  std::vector<double> ell_used;             // rescaling radii
  std::vector<std::vector<double>> profiles;  // ell^sing u(ell, phi) per radius
  std::vector<double> omega;                // hemisphere profile on the same angles
  double max_rel_error_interior = 0;        // over cos(phi) >= 0.2
  AprioriReport apriori;
};

StrongLimitReport strong_limit(const HardyParams& hp, double q, const AxiGrid& grid,
                               const std::vector<double>& k_ladder,
                               const BvpSolveOptions& opts = {});

/// Supersolution barrier on a half ball at the flat boundary:
///   mu < 1/4:  c (R^2 - |x-z|^2)^(-b) delta^gamma,  gamma in (1-alpha, alpha)
///   mu = 1/4:  c (R^2 - |x-z|^2)^(-b) delta^(1/2) (ln(diam/delta))^(1/2)
struct BarrierSpec {
  double z_offset = 0;  // center distance from the origin along the boundary plane
  double radius = 1.0 / 16.0;
  double gamma = 0;   // ignored in the mu = 1/4 case (log weight, exponent 1/2)
  double b = 0;
  double amplitude = 1.0;
  bool log_case = false;  // mu == 1/4 weight
};

/// Validates the spec against the constraints (gamma window, b lower bound,
/// radius cap R <= 1/16) and throws naming the violated constraint.
void validate_barrier(const BarrierSpec& spec, const HardyParams& hp, double q);

struct BarrierCertificate {
  double amplitude = 0;      // smallest certifying power of two
  double min_residual = 0;   // min over samples of -L_mu w + |grad w|^q
  double min_scaled = 0;     // same, relative to the local term size
  int grid_side = 0;
};

/// Evaluates -L_mu w + |grad w|^q by centered differences on a side x side
/// sample rectangle inside the barrier ball (three cells of margin against
/// the degenerate edges) and doubles the amplitude until the sign
/// certificate min >= -1e-9 (local scale) holds.
BarrierCertificate barrier_certificate(BarrierSpec spec, const HardyParams& hp, double q,
                                       int grid_side = 200);

/// Residual field of one amplitude (no search): minimum of the scaled
/// residual over the sample rectangle.
double barrier_residual(const BarrierSpec& spec, const HardyParams& hp, double q,
                        int grid_side = 200);

}  // namespace hardylab
