#pragma once

#include <optional>

#include "hardylab/errors.hpp"

namespace hardylab {

/// Dimension N >= 3 and Hardy coefficient mu in (0, 1/4], with the derived
/// boundary exponent alpha = 1/2 + sqrt(1/4 - mu).  alpha*(1-alpha) == mu.
struct HardyParams {
  int n = 3;
  double mu = 0.25;
  double alpha = 0.5;

  static HardyParams make(int n, double mu);
};

/// All closed-form constants attached to one (N, mu, q) triple.
///
/// gamma1 (supersolution amplitude), gamma2 (subsolution amplitude), alpha0
/// and mu0 (the auxiliary exponent pair behind gamma2) exist only in the
/// subcritical regime q < q_crit and are absent otherwise.
struct ExponentPack {
  double q = 0;
  double q_crit = 0;
  double ell = 0;       // ell_{N,q} = ((2-q)/(q-1)) * (q/(q-1) - N)
  double kappa = 0;     // first eigenvalue alpha*(N+alpha-2) of the hemisphere operator
  double sing_exp = 0;  // (2-q)/(q-1), the radial blow-up rate
  std::optional<double> gamma1;
  std::optional<double> alpha0;
  std::optional<double> mu0;
  std::optional<double> gamma2;

  bool subcritical() const { return q < q_crit; }
};

/// alpha = 1/2 + sqrt(1/4 - mu) for mu in (0, 1/4].
double alpha_of_mu(double mu);

/// Critical absorption exponent (N + alpha) / (N + alpha - 1).
double q_crit(int n, double alpha);

/// Fills every constant for the given q in (1, 2).  Subcritical-only fields
/// stay empty at and above q_crit.
ExponentPack exponent_pack(const HardyParams& hp, double q);

/// Throws supercritical_error unless pack.q < pack.q_crit.
void require_subcritical(const ExponentPack& pack, const char* where);

/// First hemisphere eigenfunction profile cos(phi)^alpha, phi measured from
/// the pole.
double phi_mu(double phi_angle, double alpha);

/// |grad' phi_0|^2 + phi_0^2 - 1 with phi_0 = cos; identically zero.
double grad_identity_gap(double phi_angle);

/// Boundary weight delta^(1-alpha), or delta^(1/2) |ln delta| at mu = 1/4.
double weight_W(double delta, const HardyParams& hp, double diam);

}  // namespace hardylab
