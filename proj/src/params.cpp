#include "hardylab/params.hpp"

#include <cmath>
#include <string>

namespace hardylab {

double alpha_of_mu(double mu) {
  if (!(mu > 0.0) || !(mu <= 0.25)) {
    throw domain_error("alpha_of_mu: mu must lie in (0, 1/4], got " + std::to_string(mu));
  }
  return 0.5 + std::sqrt(0.25 - mu);
}

HardyParams HardyParams::make(int n, double mu) {
  if (n < 3) {
    throw domain_error("HardyParams: dimension must satisfy N >= 3, got " + std::to_string(n));
  }
  HardyParams hp;
  hp.n = n;
  hp.mu = mu;
  hp.alpha = alpha_of_mu(mu);
  return hp;
}

double q_crit(int n, double alpha) {
  if (n < 3) throw domain_error("q_crit: N >= 3 required");
  if (!(alpha >= 0.5) || !(alpha < 1.0)) {
    throw domain_error("q_crit: alpha must lie in [1/2, 1), got " + std::to_string(alpha));
  }
  const double na = static_cast<double>(n) + alpha;
  return na / (na - 1.0);
}

ExponentPack exponent_pack(const HardyParams& hp, double q) {
  if (!(q > 1.0) || !(q < 2.0)) {
    throw domain_error("exponent_pack: q must lie in (1, 2), got " + std::to_string(q));
  }
  ExponentPack pk;
  pk.q = q;
  pk.q_crit = q_crit(hp.n, hp.alpha);
  pk.sing_exp = (2.0 - q) / (q - 1.0);
  pk.ell = pk.sing_exp * (q / (q - 1.0) - hp.n);
  pk.kappa = hp.alpha * (hp.n + hp.alpha - 2.0);

  if (q >= pk.q_crit) return pk;  // the amplitudes below exist only subcritically

  pk.gamma1 = std::pow((pk.ell - pk.kappa) / std::pow(hp.alpha, q), 1.0 / (q - 1.0));

  // alpha0: midpoint of {a in (alpha, 1) : q < (N+a)/(N+a-1)}; the upper end
  // is a < q/(q-1) - N, capped at 1.
  const double a_hi = std::min(1.0, q / (q - 1.0) - hp.n);
  const double a0 = 0.5 * (hp.alpha + a_hi);
  pk.alpha0 = a0;
  pk.mu0 = 0.25 - (a0 - 0.5) * (a0 - 0.5);

  // Largest amplitude keeping both bracketed terms of the comparison profile
  // nonpositive:
  //   gamma2*(mu0 - mu) + gamma2^q * alpha0^q            <= 0
  //   gamma2*(kappa0 - ell) + gamma2^q * X0^(q/2)        <= 0,  X0 = sing^2 - alpha0^2
  const double kappa0 = a0 * (hp.n + a0 - 2.0);
  const double root1 = std::pow((hp.mu - *pk.mu0) / std::pow(a0, q), 1.0 / (q - 1.0));
  const double x0 = pk.sing_exp * pk.sing_exp - a0 * a0;
  double g2 = root1;
  if (x0 > 0.0) {
    const double root2 = std::pow((pk.ell - kappa0) / std::pow(x0, 0.5 * q), 1.0 / (q - 1.0));
    g2 = std::min(g2, root2);
  }
  g2 = std::min(g2, *pk.gamma1);
  // cannot happen analytically; guard the strict ordering anyway
  while (g2 >= *pk.gamma1) g2 *= 0.5;
  pk.gamma2 = g2;
  return pk;
}

void require_subcritical(const ExponentPack& pack, const char* where) {
  if (!pack.subcritical()) {
    throw supercritical_error(std::string(where) + ": q = " + std::to_string(pack.q) +
                              " is at or above q_crit = " + std::to_string(pack.q_crit) +
                              "; no nontrivial profile exists there");
  }
}

double phi_mu(double phi_angle, double alpha) {
  return std::pow(std::cos(phi_angle), alpha);
}

double grad_identity_gap(double phi_angle) {
  const double c = std::cos(phi_angle);
  const double s = std::sin(phi_angle);
  return s * s + c * c - 1.0;
}

double weight_W(double delta, const HardyParams& hp, double diam) {
  if (!(delta > 0.0)) {
    throw domain_error("weight_W: delta must be positive");
  }
  if (!(delta < diam)) {
    throw domain_error("weight_W: delta must be smaller than the domain diameter");
  }
  if (hp.mu < 0.25) return std::pow(delta, 1.0 - hp.alpha);
  return std::sqrt(delta) * std::fabs(std::log(delta));
}

}  // namespace hardylab
