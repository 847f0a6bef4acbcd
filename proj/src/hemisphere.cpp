#include "hardylab/hemisphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hardylab/numerics.hpp"

namespace hardylab {
namespace {

// Discretization of the regularized equation for v = omega / cos^alpha:
//   D v + (ell - kappa) v - cos^(-alpha) J(omega, omega') = 0,
// with D the weighted divergence-form operator from AngularTables.  The pole
// row uses the regularity limit (N-1) v''(0); the pi/2 row is a zero-flux
// half cell whose reaction integrals get their leading cos-power integrated
// exactly (the absorption density behaves like t^(alpha + q(alpha-1)) there).
struct Discretization {
  AngularMesh mesh;
  HardyParams hp;
  ExponentPack pk;
  AngularTables tb;

  int m;
  double dxi;
  double sing;    // (2-q)/(q-1)
  double e_int;   // q(alpha-1) - alpha: exponent of the scaled absorption
  double p_sing;  // alpha + q(alpha-1): boundary exponent of the reaction density

  Discretization(const AngularMesh& msh, const HardyParams& hparams, const ExponentPack& pack)
      : mesh(msh), hp(hparams), pk(pack), tb(msh, hparams.n, hparams.alpha) {
    m = tb.m;
    dxi = tb.dxi;
    sing = pk.sing_exp;
    const double a = hp.alpha;
    e_int = pk.q * (a - 1.0) - a;
    p_sing = a + pk.q * (a - 1.0);
  }

  // Scaled absorption cos^(-alpha) J at a node given v and dv = dv/dphi,
  // factored as c^e_int (sing^2 c^2 v^2 + (c dv - alpha s v)^2)^(q/2).
  double absorption(double cc, double ss, double vv, double dv) const {
    const double h = cc * dv - hp.alpha * ss * vv;
    const double g = sing * sing * cc * cc * vv * vv + h * h;
    return std::pow(cc, e_int) * std::pow(g, 0.5 * pk.q);
  }

  void absorption_grad(double cc, double ss, double vv, double dv, double& d_v,
                       double& d_dv) const {
    const double h = cc * dv - hp.alpha * ss * vv;
    const double g = sing * sing * cc * cc * vv * vv + h * h;
    if (g <= 0.0) {
      d_v = d_dv = 0.0;
      return;
    }
    const double pref = std::pow(cc, e_int) * 0.5 * pk.q * std::pow(g, 0.5 * pk.q - 1.0);
    d_v = pref * (2.0 * sing * sing * cc * cc * vv - 2.0 * hp.alpha * ss * h);
    d_dv = pref * 2.0 * cc * h;
  }

  // Residual and (optionally) tridiagonal Jacobian of the discrete system.
  void assemble(const std::vector<double>& v, std::vector<double>& res,
                std::vector<double>* lo, std::vector<double>* di, std::vector<double>* up,
                std::vector<double>* scale) const {
    const double shift = pk.ell - pk.kappa;
    const double q = pk.q;
    const double a = hp.alpha;
    res.assign(m, 0.0);
    if (lo) {
      lo->assign(m, 0.0);
      di->assign(m, 0.0);
      up->assign(m, 0.0);
    }
    if (scale) scale->assign(m, 1.0);

    // pole row
    {
      const double cp = tb.pole_coeff;
      const double nl = std::pow(sing, q) * std::pow(std::max(v[0], 0.0), q);
      res[0] = cp * (v[1] - v[0]) + shift * v[0] - nl;
      if (lo) {
        (*di)[0] = -cp + shift - q * std::pow(sing, q) * std::pow(std::max(v[0], 1e-300), q - 1.0);
        (*up)[0] = cp;
      }
      if (scale) (*scale)[0] = 1.0 + std::fabs(shift * v[0]) + nl;
    }

    for (int i = 1; i + 1 < m; ++i) {
      const double inv = 1.0 / (dxi * dxi * tb.theta[i]);
      const double ap = tb.p_half[i] * inv;
      const double am = tb.p_half[i - 1] * inv;
      const double dphi2 = mesh.phi[i + 1] - mesh.phi[i - 1];
      const double dv = (v[i + 1] - v[i - 1]) / dphi2;
      const double nl = absorption(tb.c[i], tb.s[i], v[i], dv);
      res[i] = ap * (v[i + 1] - v[i]) - am * (v[i] - v[i - 1]) + shift * v[i] - nl;
      if (lo) {
        double dnl_v, dnl_dv;
        absorption_grad(tb.c[i], tb.s[i], v[i], dv, dnl_v, dnl_dv);
        (*lo)[i] = am + dnl_dv / dphi2;
        (*di)[i] = -(ap + am) + shift - dnl_v;
        (*up)[i] = ap - dnl_dv / dphi2;
      }
      if (scale) (*scale)[i] = 1.0 + std::fabs(shift * v[i]) + nl;
    }

    // boundary half cell at pi/2: zero flux on the right
    {
      const int b = m - 1;
      const double vb = v[b], vn = v[b - 1];
      const double flux = -tb.p_edge * (vb - vn) / dxi;
      const double cm = std::sin(tb.t_mid), sm = std::cos(tb.t_mid);
      const double th = tb.th_interp;
      const double vm = (1.0 - th) * vn + th * vb;
      const double wm = tb.w_mid;
      // linear reaction: exact t^(2 alpha) part plus midpoint remainder
      const double tm2a = std::pow(tb.t_mid, 2.0 * a);
      const double lin = shift * (vb * tb.scale_b + (wm * vm - tm2a * vb) * tb.t_half);
      // absorption: exact integral of the leading power plus midpoint remainder
      const double vb_pos = std::max(vb, 0.0);
      const double amp = std::pow(a, q) * std::pow(vb_pos, q);
      const double exact = amp * std::pow(tb.t_half, p_sing + 1.0) / (p_sing + 1.0);
      const double dv = (vb - vn) / tb.phi_cell;
      const double hmid = cm * dv - a * sm * vm;
      const double gmid = sing * sing * cm * cm * vm * vm + hmid * hmid;
      const double f_m =
          std::pow(sm, hp.n - 2) * std::pow(cm, p_sing) * std::pow(gmid, 0.5 * q);
      const double f_sing_m = amp * std::pow(tb.t_mid, p_sing);
      const double absb = exact + (f_m - f_sing_m) * tb.t_half;
      res[b] = (flux + lin - absb) / tb.scale_b;
      if (lo) {
        double d_fm_v, d_fm_dv;
        {
          const double pref = std::pow(sm, hp.n - 2) * std::pow(cm, p_sing) * 0.5 * q *
                              std::pow(std::max(gmid, 1e-300), 0.5 * q - 1.0);
          d_fm_v = pref * (2.0 * sing * sing * cm * cm * vm - 2.0 * a * sm * hmid);
          d_fm_dv = pref * 2.0 * cm * hmid;
        }
        const double damp = q * std::pow(a, q) * std::pow(std::max(vb_pos, 1e-300), q - 1.0);
        const double dexact_vb = damp * std::pow(tb.t_half, p_sing + 1.0) / (p_sing + 1.0);
        const double dfsing_vb = damp * std::pow(tb.t_mid, p_sing);
        const double dabs_vb =
            dexact_vb + (d_fm_v * th + d_fm_dv / tb.phi_cell - dfsing_vb) * tb.t_half;
        const double dabs_vn = (d_fm_v * (1.0 - th) - d_fm_dv / tb.phi_cell) * tb.t_half;
        const double dlin_vb = shift * (tb.scale_b + (wm * th - tm2a) * tb.t_half);
        const double dlin_vn = shift * wm * (1.0 - th) * tb.t_half;
        (*lo)[b] = (tb.p_edge / dxi + dlin_vn - dabs_vn) / tb.scale_b;
        (*di)[b] = (-tb.p_edge / dxi + dlin_vb - dabs_vb) / tb.scale_b;
      }
      if (scale) {
        (*scale)[b] =
            1.0 + (std::fabs(flux) + std::fabs(lin) + std::fabs(absb)) / tb.scale_b;
      }
    }
  }

  double scaled_norm(const std::vector<double>& res, const std::vector<double>& scale) const {
    double r = 0.0;
    for (int i = 0; i < m; ++i) r = std::max(r, std::fabs(res[i]) / scale[i]);
    return r;
  }
};

}  // namespace

HemisphereSolution solve_omega(const HardyParams& hp, double q, const AngularMesh& mesh,
                               const HemisphereSolveOptions& opts) {
  const ExponentPack pk = exponent_pack(hp, q);
  require_subcritical(pk, "solve_omega");
  const Discretization dz(mesh, hp, pk);
  const int m = dz.m;
  const double g1 = *pk.gamma1;
  const double g2 = *pk.gamma2;
  const double da = *pk.alpha0 - hp.alpha;

  std::vector<double> lower(m), upper_b(m);
  for (int i = 0; i < m; ++i) {
    lower[i] = g2 * std::pow(dz.tb.c[i], da);
    upper_b[i] = g1;
  }
  lower[m - 1] = 0.0;

  std::vector<double> v(m);
  if (opts.start == HemisphereSolveOptions::Start::Supersolution) {
    v = upper_b;
  } else {
    v = lower;
    v[m - 1] = lower[m - 2];  // strictly positive boundary limit to seed the iteration
  }
  auto clamp_bracket = [&](std::vector<double>& w) {
    for (int i = 0; i < m; ++i) w[i] = std::min(upper_b[i], std::max(w[i], lower[i]));
  };

  std::vector<double> res, lo, di, up, scale;
  dz.assemble(v, res, &lo, &di, &up, &scale);
  double rnorm = dz.scaled_norm(res, scale);
  std::vector<double> best_v = v;
  double best_rnorm = rnorm;

  int newton_count = 0, sweeps_used = 0;
  const int max_rounds = 6;  // alternating Newton / monotone-sweep rounds
  // from the subsolution the residual must first rise, which Newton's
  // monotone line search cannot do; climb with sweeps first
  const bool sweep_first = opts.start == HemisphereSolveOptions::Start::Subsolution;
  for (int round = 0; round < max_rounds && rnorm > opts.tol_target; ++round) {
    // Newton with step halving
    for (int it = (sweep_first && round == 0) ? opts.max_newton : 0;
         it < opts.max_newton && rnorm > opts.tol_target; ++it) {
      std::vector<double> l = lo, d = di, u = up, rhs = res;
      for (auto& x : rhs) x = -x;
      solve_tridiagonal(l, d, u, rhs);
      double lam = 1.0;
      bool accepted = false;
      for (int h = 0; h <= opts.max_halvings; ++h, lam *= 0.5) {
        std::vector<double> vt(m);
        for (int i = 0; i < m; ++i) vt[i] = v[i] + lam * rhs[i];
        clamp_bracket(vt);
        std::vector<double> rt, st;
        dz.assemble(vt, rt, nullptr, nullptr, nullptr, &st);
        const double rn = dz.scaled_norm(rt, st);
        if (rn < rnorm) {
          v = std::move(vt);
          rnorm = rn;
          accepted = true;
          break;
        }
      }
      ++newton_count;
      if (!accepted) break;  // stagnated; hand over to the monotone fallback
      dz.assemble(v, res, &lo, &di, &up, &scale);
      rnorm = dz.scaled_norm(res, scale);
      if (rnorm < best_rnorm) {
        best_rnorm = rnorm;
        best_v = v;
      }
    }
    if (rnorm <= opts.tol_target || sweeps_used >= opts.max_sweeps) break;

    // Monotone fallback: shifted sweep (Lin - Lambda) v_new = NL(v) - Lambda v.
    // The per-node shift uses the absorption Lipschitz bound over the bracket
    // [lower, 2 max(v)] tracking the current iterate (the full bracket top
    // gamma1 is far too lossy to make progress); a residual safeguard doubles
    // the shift when a sweep misbehaves.
    const int batch = std::min(50, opts.max_sweeps - sweeps_used);
    double lam_boost = 1.0;
    std::vector<double> shift_diag(m);
    auto refresh_shift = [&]() {
      double vtop = 0.0;
      for (double x : v) vtop = std::max(vtop, x);
      const double vbar = std::min(2.0 * std::max(vtop, 1e-30), g1);
      for (int i = 0; i < m; ++i) {
        const double cc = dz.tb.c[i], ss = dz.tb.s[i];
        const double mag = std::sqrt(dz.sing * dz.sing * cc * cc + hp.alpha * hp.alpha * ss * ss);
        const double lip =
            (i + 1 == m)
                ? q * std::pow(hp.alpha, q) * std::pow(vbar, q - 1.0)
                : q * std::pow(cc, dz.e_int) * std::pow(mag, q) * std::pow(vbar, q - 1.0);
        shift_diag[i] = lam_boost * (pk.ell + q * lip);
      }
    };
    for (int sw = 0; sw < batch; ++sw) {
      refresh_shift();
      std::vector<double> r0;
      dz.assemble(v, r0, nullptr, nullptr, nullptr, nullptr);
      std::vector<double> L(m), D(m), U(m), rhs(m);
      const double sh = pk.ell - pk.kappa;
      {
        const double cp = dz.tb.pole_coeff;
        L[0] = 0;
        D[0] = -cp + sh - shift_diag[0];
        U[0] = cp;
        const double nl = std::pow(dz.sing, q) * std::pow(std::max(v[0], 0.0), q);
        rhs[0] = nl - shift_diag[0] * v[0];
      }
      for (int i = 1; i + 1 < m; ++i) {
        const double inv = 1.0 / (dz.dxi * dz.dxi * dz.tb.theta[i]);
        const double ap = dz.tb.p_half[i] * inv, am = dz.tb.p_half[i - 1] * inv;
        L[i] = am;
        D[i] = -(ap + am) + sh - shift_diag[i];
        U[i] = ap;
        const double dv = (v[i + 1] - v[i - 1]) / (dz.mesh.phi[i + 1] - dz.mesh.phi[i - 1]);
        rhs[i] = dz.absorption(dz.tb.c[i], dz.tb.s[i], v[i], dv) - shift_diag[i] * v[i];
      }
      {
        const int b = m - 1;
        const double flux_vb = -dz.tb.p_edge / dz.dxi / dz.tb.scale_b;
        const double flux_vn = dz.tb.p_edge / dz.dxi / dz.tb.scale_b;
        const double th = dz.tb.th_interp;
        const double wm = dz.tb.w_mid;
        const double tm2a = std::pow(dz.tb.t_mid, 2.0 * hp.alpha);
        const double lin_vb = sh * (dz.tb.scale_b + (wm * th - tm2a) * dz.tb.t_half) / dz.tb.scale_b;
        const double lin_vn = sh * wm * (1.0 - th) * dz.tb.t_half / dz.tb.scale_b;
        L[b] = flux_vn + lin_vn;
        D[b] = flux_vb + lin_vb - shift_diag[b];
        U[b] = 0;
        // absorption part of row b  =  linear action - full residual
        const double lin_part = (flux_vb + lin_vb) * v[b] + (flux_vn + lin_vn) * v[b - 1];
        const double absb = lin_part - r0[b];
        rhs[b] = absb - shift_diag[b] * v[b];
      }
      solve_tridiagonal(L, D, U, rhs);
      clamp_bracket(rhs);
      std::vector<double> rt, st;
      dz.assemble(rhs, rt, nullptr, nullptr, nullptr, &st);
      const double rn = dz.scaled_norm(rt, st);
      // the residual legitimately rises while climbing out of the subsolution,
      // but an explosion means the shift was too aggressive
      if (rn > 100.0 * (rnorm + 1.0) && lam_boost < 1e6) {
        lam_boost *= 4.0;
        continue;
      }
      v = std::move(rhs);
      rnorm = rn;
      ++sweeps_used;
    }
    dz.assemble(v, res, &lo, &di, &up, &scale);
    rnorm = dz.scaled_norm(res, scale);
    if (rnorm < best_rnorm) {
      best_rnorm = rnorm;
      best_v = v;
    }
  }
  v = best_v;
  rnorm = best_rnorm;

  if (rnorm > opts.tol_declare) {
    throw convergence_error("solve_omega: iteration did not reach tolerance", rnorm);
  }

  HemisphereSolution sol;
  sol.mesh = mesh;
  sol.hp = hp;
  sol.exponents = pk;
  sol.v = v;
  sol.omega.resize(m);
  for (int i = 0; i < m; ++i) sol.omega[i] = std::pow(dz.tb.c[i], hp.alpha) * v[i];
  sol.omega[m - 1] = 0.0;
  sol.residual_sup = rnorm;
  sol.newton_iterations = newton_count;
  sol.fallback_sweeps = sweeps_used;
  return sol;
}

std::vector<double> ode_residual(const HemisphereSolution& sol) {
  require_subcritical(sol.exponents, "ode_residual");
  const int m = sol.mesh.size();
  const auto& phi = sol.mesh.phi;
  const auto& w = sol.omega;
  const double mu = sol.hp.mu;
  const double ell = sol.exponents.ell;
  const double sing = sol.exponents.sing_exp;
  const double q = sol.exponents.q;
  std::vector<double> res(m - 2);
  for (int i = 1; i + 1 < m; ++i) {
    const double hm = phi[i] - phi[i - 1];
    const double hp_ = phi[i + 1] - phi[i];
    const double denom = hm * hp_ * (hm + hp_);
    const double d2 = 2.0 * (hm * w[i + 1] - (hm + hp_) * w[i] + hp_ * w[i - 1]) / denom;
    const double d1 =
        (hm * hm * w[i + 1] + (hp_ * hp_ - hm * hm) * w[i] - hp_ * hp_ * w[i - 1]) / denom;
    const double c = std::cos(phi[i]);
    const double cot = c / std::sin(phi[i]);
    res[i - 1] = d2 + (sol.hp.n - 2) * cot * d1 + mu * w[i] / (c * c) + ell * w[i] -
                 std::pow(sing * sing * w[i] * w[i] + d1 * d1, 0.5 * q);
  }
  return res;
}

double boundary_exponent_fit(const HemisphereSolution& sol) {
  const int m = sol.mesh.size();
  std::vector<double> lx, ly;
  const double c1 = std::cos(sol.mesh.phi[m - 2]);  // last interior node
  double c_hi = 10.0 * c1;
  // widen past one decade until at least eight usable nodes, staying near pi/2
  for (;;) {
    lx.clear();
    ly.clear();
    for (int i = m - 2; i >= 1; --i) {
      const double c = std::cos(sol.mesh.phi[i]);
      if (c > c_hi) break;
      if (sol.omega[i] > 0.0) {
        lx.push_back(std::log(c));
        ly.push_back(std::log(sol.omega[i]));
      }
    }
    if (lx.size() >= 8 || c_hi > 0.5) break;
    c_hi *= 1.5;
  }
  if (lx.size() < 5) {
    throw fit_error("boundary_exponent_fit: too few nodes in the fit window");
  }
  return linear_fit(lx, ly).slope;
}

double uniqueness_probe(const HardyParams& hp, double q, const AngularMesh& mesh) {
  HemisphereSolveOptions a;
  a.start = HemisphereSolveOptions::Start::Supersolution;
  HemisphereSolveOptions b;
  b.start = HemisphereSolveOptions::Start::Subsolution;
  const auto s1 = solve_omega(hp, q, mesh, a);
  const auto s2 = solve_omega(hp, q, mesh, b);
  double gap = 0.0;
  for (int i = 0; i < mesh.size(); ++i) gap = std::max(gap, std::fabs(s1.omega[i] - s2.omega[i]));
  return gap;
}

double separable_field(const HemisphereSolution& sol, double r, int node) {
  return std::pow(r, -sol.exponents.sing_exp) * sol.omega[node];
}

}  // namespace hardylab
