#include "hardylab/capacity.hpp"

#include <algorithm>
#include <cmath>

#include "hardylab/numerics.hpp"

namespace hardylab {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "Subcritical";
    case Regime::SupercriticalGeneric: return "SupercriticalGeneric";
    case Regime::SupercriticalEpsilonCase: return "SupercriticalEpsilonCase";
  }
  return "?";
}

bool point_capacity_zero(double s, double p, int d) {
  if (!(s > 0.0) || !(p > 1.0) || d < 2) {
    throw domain_error("point_capacity_zero: need s > 0, p > 1, d >= 2");
  }
  return s * p <= static_cast<double>(d);
}

RemovabilityVerdict classify_removability(const HardyParams& hp, double q) {
  if (!(q > 1.0) || !(q < 2.0)) {
    throw domain_error("classify_removability: q must lie in (1, 2)");
  }
  const double a = hp.alpha;
  const double qc = q_crit(hp.n, a);
  const int d = hp.n - 1;

  RemovabilityVerdict v;
  if (q < qc) {
    v.regime = Regime::Subcritical;
    v.point_removable = false;  // a point mass always produces a solution here
    return v;
  }

  if (q != a + 1.0) {
    v.regime = Regime::SupercriticalGeneric;
    v.s = (a + 1.0) / q - a;
    v.p = q / (q - 1.0);
    v.point_removable = point_capacity_zero(v.s, v.p, d);
    return v;
  }

  // q == alpha + 1: capacities C_{eps+1-alpha, (alpha+1)/alpha} for eps in
  // the open window below; removable if some eps in the window certifies.
  v.regime = Regime::SupercriticalEpsilonCase;
  v.p = (a + 1.0) / a;
  const double hi = std::min(a + 1.0, (d * a) / (a + 1.0) - (1.0 - a));
  v.eps_lo = 0.0;
  v.eps_hi = hi;
  if (!(hi > 0.0)) {
    v.conclusive = false;  // empty window: the criterion does not decide
    v.point_removable = false;
    return v;
  }
  // (eps + 1 - alpha) * p <= d  <=>  eps <= d*alpha/(alpha+1) - (1-alpha)
  const double eps_cap = (d * a) / (a + 1.0) - (1.0 - a);
  const double cert_hi = std::min(hi, eps_cap);
  if (cert_hi > 0.0) {
    v.eps_cert_lo = 0.0;
    v.eps_cert_hi = cert_hi;
    v.point_removable = true;
    v.s = (0.5 * cert_hi) + 1.0 - a;  // a representative certifying order
  } else {
    v.point_removable = false;
  }
  return v;
}

double threshold_consistency(const HardyParams& hp) {
  const double a = hp.alpha;
  const double qc = q_crit(hp.n, a);
  const double s = (a + 1.0) / qc - a;
  const double p = qc / (qc - 1.0);
  return std::fabs(s * p - static_cast<double>(hp.n - 1));
}

double ball_capacity_scaling(double s, double p, int d, const std::vector<double>& radii) {
  if (s * p >= static_cast<double>(d)) {
    throw domain_error("ball_capacity_scaling: degenerate scaling, s*p must be < d");
  }
  if (radii.size() < 2) throw domain_error("ball_capacity_scaling: need at least two radii");
  const auto [lo, hi] = std::minmax_element(radii.begin(), radii.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0) {
    throw domain_error("ball_capacity_scaling: radii must span at least two decades");
  }
  const double expo = static_cast<double>(d) - s * p;
  std::vector<double> lx, ly;
  for (double r : radii) {
    lx.push_back(std::log(r));
    ly.push_back(expo * std::log(r));  // closed-form comparable capacity r^(d-sp)
  }
  return linear_fit(lx, ly).slope;
}

}  // namespace hardylab
