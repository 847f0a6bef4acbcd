#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hardylab/params.hpp"

namespace hardylab {

enum class Regime {
  Subcritical,               // q < q_crit: every boundary mass is admissible
  SupercriticalGeneric,      // q >= q_crit, q != alpha + 1
  SupercriticalEpsilonCase,  // q == alpha + 1: one-parameter capacity family
};

std::string to_string(Regime r);

/// Capacity query against the (s, p) Bessel scale on R^d, d = N - 1.
struct CapacityQuery {
  double s = 0;
  double p = 0;
  int d = 2;
};

struct RemovabilityVerdict {
  Regime regime = Regime::Subcritical;
  double s = 0;  // capacity smoothness order actually used (0 when subcritical)
  double p = 0;  // capacity integrability exponent (0 when subcritical)
  bool point_removable = false;
  // For the epsilon case: the admissible window and the sub-window whose
  // members certify removability (empty optional = no certifying epsilon).
  std::optional<double> eps_lo, eps_hi;
  std::optional<double> eps_cert_lo, eps_cert_hi;
  bool conclusive = true;
};

/// A single point has zero C_{s,p} capacity in R^d exactly when s*p <= d.
bool point_capacity_zero(double s, double p, int d);

/// Classifies boundary point-singularity solvability/removability at q.
RemovabilityVerdict classify_removability(const HardyParams& hp, double q);

/// |s(q_crit)*p(q_crit) - (N-1)|; the point-capacity threshold coincides
/// with the critical exponent, so this is zero up to rounding.
double threshold_consistency(const HardyParams& hp);

/// Log-log slope of the comparable ball capacity r^(d - s*p) over the given
/// radii; requires s*p < d and radii spanning at least two decades.
double ball_capacity_scaling(double s, double p, int d, const std::vector<double>& radii);

}  // namespace hardylab
