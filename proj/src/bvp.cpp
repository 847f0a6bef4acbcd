#include "hardylab/bvp.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "axi_system.hpp"
#include "hardylab/hemisphere.hpp"
#include "hardylab/numerics.hpp"

namespace hardylab {
namespace {

// Absorption rows r^(2-lam) cos^{-alpha} (|grad u|^2 + eps^2)^(q/2) in the
// kernel-scaled unknown v = u/K.  With u = cos^alpha r^lam v,
//   |grad u|^2 = r^(2 lam - 2) c^(2 alpha - 2) G2,
//   G2 = (c (lam v + v_s))^2 + (c v_phi - alpha s v)^2 + scaled smoothing,
// so the row density is r^e0 c^e_int G2^(q/2) with the deficit exponent
// e0 = N + alpha - q (N + alpha - 1).  Boundary rows integrate the
// t^(alpha + q(alpha-1)) density exactly and the remainder by midpoint.
struct Absorption {
  const AxiSystem& sys;
  double q, eps;
  double e_int;   // q(alpha-1) - alpha
  double p_sing;  // alpha + q(alpha-1)
  double e0;      // 2 - lam + q(lam - 1)

  Absorption(const AxiSystem& s, double q_exp, double smoothing)
      : sys(s), q(q_exp), eps(smoothing) {
    const double a = s.hp.alpha;
    e_int = q * (a - 1.0) - a;
    p_sing = a + q * (a - 1.0);
    e0 = 2.0 - s.lam + q * (s.lam - 1.0);
  }

  struct Local {
    double value = 0;
    double d_v = 0, d_vs = 0, d_vf = 0;
  };

  // pow_pref carries the angular power prefactor (c^e_int at interior nodes,
  // the half-cell version at the boundary); rpow = r^e0.
  Local density(double r, double cc, double ss, double v, double vs, double vf,
                double rpow, double pow_pref) const {
    const double a = sys.hp.alpha;
    const double hr = cc * (sys.lam * v + vs);
    const double hf = cc * vf - a * ss * v;
    const double eps_s = eps * std::pow(r, 1.0 - sys.lam) *
                         std::pow(std::max(cc, 1e-300), 1.0 - a);
    const double g2 = hr * hr + hf * hf + eps_s * eps_s;
    Local loc;
    loc.value = rpow * pow_pref * std::pow(g2, 0.5 * q);
    const double pref = rpow * pow_pref * 0.5 * q * std::pow(std::max(g2, 1e-300), 0.5 * q - 1.0);
    loc.d_v = pref * (2.0 * hr * cc * sys.lam - 2.0 * a * ss * hf);
    loc.d_vs = pref * 2.0 * hr * cc;
    loc.d_vf = pref * 2.0 * hf * cc;
    return loc;
  }

  // Evaluates rows into `nl` and appends Jacobian triplets when requested.
  void assemble(const std::vector<double>& v, Eigen::VectorXd& nl,
                std::vector<Eigen::Triplet<double>>* jac,
                const AxiSystem::ClosureWeights* cw_tan = nullptr) const {
    const AxiGrid& g = sys.grid;
    const AngularTables& tb = sys.tb;
    const int jr = sys.jr, m = sys.m;
    const double a = sys.hp.alpha;
    const double h = sys.h;
    nl.setZero(sys.nunk);
    const double cm = std::sin(tb.t_mid), sm = std::cos(tb.t_mid);
    const double th = tb.th_interp;
    for (int j = 1; j + 1 < jr; ++j) {
      const double r = g.r[j];
      const double rpow = std::pow(r, e0);
      for (int i = 0; i + 1 < m; ++i) {
        const int row = sys.uidx(j, i);
        const double vs = (v[g.index(j + 1, i)] - v[g.index(j - 1, i)]) / (2.0 * h);
        double vf = 0.0, dphi2 = 1.0;
        if (i > 0) {
          dphi2 = g.angular.phi[i + 1] - g.angular.phi[i - 1];
          vf = (v[g.index(j, i + 1)] - v[g.index(j, i - 1)]) / dphi2;
        }
        const double pow_pref = std::pow(tb.c[i], e_int);
        const Local loc =
            density(r, tb.c[i], tb.s[i], v[g.index(j, i)], vs, vf, rpow, pow_pref);
        nl[row] = loc.value;
        if (jac) {
          sys.add_coeff(*jac, row, j, i, loc.d_v, cw_tan);
          sys.add_coeff(*jac, row, j + 1, i, loc.d_vs / (2.0 * h), cw_tan);
          sys.add_coeff(*jac, row, j - 1, i, -loc.d_vs / (2.0 * h), cw_tan);
          if (i > 0) {
            sys.add_coeff(*jac, row, j, i + 1, loc.d_vf / dphi2, cw_tan);
            sys.add_coeff(*jac, row, j, i - 1, -loc.d_vf / dphi2, cw_tan);
          }
        }
      }
      // pi/2 half cell
      {
        const int b = m - 1;
        const int row = sys.uidx(j, b);
        const double vb = v[g.index(j, b)], vn = v[g.index(j, b - 1)];
        const double vsb = (v[g.index(j + 1, b)] - v[g.index(j - 1, b)]) / (2.0 * h);
        const double vsn = (v[g.index(j + 1, b - 1)] - v[g.index(j - 1, b - 1)]) / (2.0 * h);
        const double vm = (1.0 - th) * vn + th * vb;
        const double vsm = (1.0 - th) * vsn + th * vsb;
        const double vf = (vb - vn) / tb.phi_cell;
        const double vb_pos = std::max(vb, 0.0);
        const double amp = std::pow(a, q) * std::pow(vb_pos, q) * rpow;
        const double exact = amp * std::pow(tb.t_half, p_sing + 1.0) / (p_sing + 1.0);
        const double f_sing_m = amp * std::pow(tb.t_mid, p_sing);
        const double pow_pref = std::pow(sm, sys.hp.n - 2) * std::pow(cm, p_sing);
        const Local loc = density(r, cm, sm, vm, vsm, vf, rpow, pow_pref);
        nl[row] = (exact + (loc.value - f_sing_m) * tb.t_half) / tb.scale_b;
        if (jac) {
          const double damp =
              q * std::pow(a, q) * std::pow(std::max(vb_pos, 1e-300), q - 1.0) * rpow;
          const double d_exact = damp * std::pow(tb.t_half, p_sing + 1.0) / (p_sing + 1.0);
          const double d_fsing = damp * std::pow(tb.t_mid, p_sing);
          const double s_inv = tb.t_half / tb.scale_b;
          sys.add_coeff(*jac, row, j, b,
                        (d_exact - d_fsing * tb.t_half) / tb.scale_b +
                            (loc.d_v * th + loc.d_vf / tb.phi_cell) * s_inv, cw_tan);
          sys.add_coeff(*jac, row, j, b - 1,
                        (loc.d_v * (1.0 - th) - loc.d_vf / tb.phi_cell) * s_inv, cw_tan);
          sys.add_coeff(*jac, row, j + 1, b, loc.d_vs * th / (2.0 * h) * s_inv, cw_tan);
          sys.add_coeff(*jac, row, j - 1, b, -loc.d_vs * th / (2.0 * h) * s_inv, cw_tan);
          sys.add_coeff(*jac, row, j + 1, b - 1, loc.d_vs * (1.0 - th) / (2.0 * h) * s_inv, cw_tan);
          sys.add_coeff(*jac, row, j - 1, b - 1, -loc.d_vs * (1.0 - th) / (2.0 * h) * s_inv, cw_tan);
        }
      }
    }
  }
};

void residual_scale(const AxiSystem& sys, const std::vector<double>& vfull,
                    const Eigen::VectorXd& nl, Eigen::VectorXd& scale) {
  const double h2 = sys.h * sys.h;
  scale.resize(sys.nunk);
  for (int j = 1; j + 1 < sys.jr; ++j) {
    for (int i = 0; i < sys.m; ++i) {
      const int row = sys.uidx(j, i);
      const double vc = std::fabs(vfull[sys.grid.index(j, i)]);
      const double ve = std::fabs(vfull[sys.grid.index(j + 1, i)]);
      const double vw = std::fabs(vfull[sys.grid.index(j - 1, i)]);
      scale[row] = 1.0 + nl[row] + (ve + 2.0 * vc + vw) / h2;
    }
  }
}

double scaled_norm(const Eigen::VectorXd& gres, const Eigen::VectorXd& nl,
                   const Eigen::VectorXd& scale) {
  double worst = 0.0;
  for (int row = 0; row < gres.size(); ++row) {
    const double r = std::fabs(gres[row] + nl[row]) / scale[row];
    if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, r);
  }
  return worst;
}

struct CoreResult {
  std::vector<double> vfull;
  double rnorm = 0;
  int newton = 0, picard = 0;
};

// Damped Newton iteration with a Picard fallback on the kernel-scaled system
//   G(v) + NL(v) = 0,  v = u/K,  Dirichlet row vout, iterates capped at `cap`.
CoreResult solve_core(const AxiSystem& sys, const Absorption& ab,
                      const std::vector<double>& vout, double cap,
                      const Eigen::VectorXd* init, const BvpSolveOptions& opts) {
  const int m = sys.m;
  const double k = cap;
  Eigen::VectorXd vu(sys.nunk);
  if (init) {
    vu = *init;
  } else {
    vu.setConstant(cap);
  }
  // The solution lives in [0, cap] when the cap is finite (kernel-multiple
  // data).  Iterates keep the upper cap (the convex absorption is benign from
  // above) but may dip below zero transiently: hard-flooring at zero deforms
  // the Newton direction into a non-descent step and stalls the
  // boundary-layer sweep at large data.
  auto clamp = [&](Eigen::VectorXd& x) {
    if (!std::isfinite(k)) return;
    for (int idx = 0; idx < sys.nunk; ++idx) x[idx] = std::min(k, x[idx]);
  };
  clamp(vu);

  Eigen::VectorXd cur_scale;
  auto eval = [&](const Eigen::VectorXd& x, std::vector<double>& vfull, Eigen::VectorXd& gres,
                  Eigen::VectorXd& nl) {
    vfull = sys.full_array(x, vout);
    sys.apply_linear(vfull, gres);
    ab.assemble(vfull, nl, nullptr);
    residual_scale(sys, vfull, nl, cur_scale);
    return scaled_norm(gres, nl, cur_scale);
  };

  std::vector<double> vfull;
  Eigen::VectorXd gres, nl;
  double rnorm = eval(vu, vfull, gres, nl);
  Eigen::VectorXd best = vu;
  double best_rnorm = rnorm;

  int newton_count = 0, picard_count = 0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  for (int round = 0; round < 6 && rnorm > opts.tol_target; ++round) {
    for (int it = 0; it < opts.max_newton && rnorm > opts.tol_target; ++it) {
      const AxiSystem::ClosureWeights cw_tan = sys.closure_weights(vfull);
      std::vector<Eigen::Triplet<double>> ts;
      sys.linear_triplets(ts, &cw_tan);
      Eigen::VectorXd nl_jac;
      ab.assemble(vfull, nl_jac, &ts, &cw_tan);
      Eigen::SparseMatrix<double> J(sys.nunk, sys.nunk);
      J.setFromTriplets(ts.begin(), ts.end());
      lu.compute(J);
      if (lu.info() != Eigen::Success) break;
      Eigen::VectorXd fres = gres + nl;
      Eigen::VectorXd dv = lu.solve(-fres);
      // line search against the scale frozen at the current iterate; the
      // initial step is capped so one move never dwarfs the iterate itself
      // (the absorption is superlinear and punishes overshoots severely)
      const Eigen::VectorXd frozen = cur_scale;
      const double ref = scaled_norm(gres, nl, frozen);
      const double vmag = vu.lpNorm<Eigen::Infinity>() + (std::isfinite(k) ? k : 0.0);
      const double dmag = dv.lpNorm<Eigen::Infinity>();
      double lam_step = std::min(1.0, 4.0 * vmag / std::max(dmag, 1e-300));
      bool accepted = false;
      for (int hlv = 0; hlv <= opts.max_halvings; ++hlv, lam_step *= 0.5) {
        Eigen::VectorXd xt = vu + lam_step * dv;
        clamp(xt);
        std::vector<double> vt;
        Eigen::VectorXd gt, nt;
        const double rn = eval(xt, vt, gt, nt);
        if (scaled_norm(gt, nt, frozen) < ref) {
          vu = std::move(xt);
          vfull = std::move(vt);
          gres = std::move(gt);
          nl = std::move(nt);
          rnorm = rn;
          accepted = true;
          break;
        }
      }
      ++newton_count;
      if (!accepted) break;
      if (rnorm < best_rnorm) {
        best_rnorm = rnorm;
        best = vu;
      }
    }
    if (rnorm <= opts.tol_target || picard_count >= opts.max_picard) break;

    // Picard fallback: linear solve against the frozen absorption, with the
    // closure tangent frozen at the current iterate
    const AxiSystem::ClosureWeights cw_pic = sys.closure_weights(vfull);
    std::vector<Eigen::Triplet<double>> lin_ts;
    sys.linear_triplets(lin_ts, &cw_pic);
    Eigen::SparseMatrix<double> A(sys.nunk, sys.nunk);
    A.setFromTriplets(lin_ts.begin(), lin_ts.end());
    lu.compute(A);
    if (lu.info() != Eigen::Success) break;
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(sys.nunk);
    std::vector<double> vdata = sys.full_array(zero, vout);
    for (int i = 0; i < m; ++i) vdata[sys.grid.index(0, i)] = 0.0;
    Eigen::VectorXd gdata;
    sys.apply_linear(vdata, gdata);
    for (int p = 0; p < 10 && picard_count < opts.max_picard; ++p) {
      // G is affine: G(v) = A v_unknowns + gdata, so the frozen-absorption
      // step solves A x = -nl(v_old) - gdata.  Steps are floored at zero and
      // only kept while they improve the residual.
      Eigen::VectorXd rhs = -nl - gdata;
      Eigen::VectorXd xt = lu.solve(rhs);
      for (int idx = 0; idx < sys.nunk; ++idx) {
        xt[idx] = std::max(0.0, xt[idx]);
        if (std::isfinite(k)) xt[idx] = std::min(k, xt[idx]);
      }
      std::vector<double> vt;
      Eigen::VectorXd gt, nt;
      Eigen::VectorXd save_scale = cur_scale;
      const double rn = eval(xt, vt, gt, nt);
      ++picard_count;
      if (!(rn < rnorm)) {
        cur_scale = std::move(save_scale);
        break;  // not helping; go back to Newton from the current iterate
      }
      vu = std::move(xt);
      vfull = std::move(vt);
      gres = std::move(gt);
      nl = std::move(nt);
      rnorm = rn;
      if (rnorm < best_rnorm) {
        best_rnorm = rnorm;
        best = vu;
      }
      if (rnorm <= opts.tol_target) break;
    }
  }
  vu = best;
  rnorm = eval(vu, vfull, gres, nl);

  if (rnorm > opts.tol_declare) {
    throw convergence_error("absorption solve: iteration did not reach tolerance", rnorm);
  }
  CoreResult out;
  out.vfull = std::move(vfull);
  out.rnorm = rnorm;
  out.newton = newton_count;
  out.picard = picard_count;
  return out;
}

}  // namespace

WeakSingularityRun solve_weak(double k, const HardyParams& hp, double q, const AxiGrid& grid,
                              const BvpSolveOptions& opts) {
  if (!(k > 0.0)) throw domain_error("solve_weak: boundary mass k must be positive");
  if (grid.n != hp.n) throw domain_error("solve_weak: grid dimension does not match parameters");
  const ExponentPack pk = exponent_pack(hp, q);
  require_subcritical(pk, "solve_weak");

  AxiSystem sys(grid, hp);
  Absorption ab(sys, q, opts.grad_smoothing);
  const int jr = sys.jr, m = sys.m;

  // Dirichlet data u = k K at r = 1 is v = k (also the supersolution start)
  const std::vector<double> vout(m, k);
  Eigen::VectorXd init(sys.nunk);
  if (opts.initial) {
    // scale the previous run up by the mass ratio: the boundary layer at r = 1
    // scales with k while the saturated interior is then approached from
    // above, where the damped Newton iteration on the convex absorption is
    // reliable
    const double boost = opts.initial_mass > 0.0 ? k / opts.initial_mass : 1.0;
    const SolutionField& f0 = *opts.initial;
    std::vector<double> vrow(m);
    for (int j = 1; j + 1 < jr; ++j) {
      for (int i = 0; i + 1 < m; ++i) vrow[i] = f0.at(j, i) / sys.kernel_at(j, i);
      sys.extrapolate_corner(vrow);
      for (int i = 0; i < m; ++i) init[sys.uidx(j, i)] = std::min(vrow[i] * boost, k);
    }
  } else {
    init.setConstant(k);
  }
  CoreResult core = solve_core(sys, ab, vout, k, &init, opts);

  WeakSingularityRun run(grid);
  run.k = k;
  run.hp = hp;
  run.exponents = pk;
  run.field = sys.u_field_from_full(core.vfull);
  run.residual_sup = core.rnorm;
  run.newton_iterations = core.newton;
  run.picard_steps = core.picard;
  return run;
}

SolutionField solve_absorption(const AxiGrid& grid, const HardyParams& hp, double q,
                               const std::vector<double>& outer_u,
                               const BvpSolveOptions& opts) {
  if (static_cast<int>(outer_u.size()) != grid.m()) {
    throw domain_error("solve_absorption: outer data size must match the angular mesh");
  }
  const ExponentPack pk = exponent_pack(hp, q);
  require_subcritical(pk, "solve_absorption");
  AxiSystem sys(grid, hp);
  sys.power_closure = true;  // general data may continue inward on any mode
  Absorption ab(sys, q, opts.grad_smoothing);
  const std::vector<double> vout = sys.outer_v_from_udata(outer_u);
  double top = 0.0;
  for (double vv : vout) {
    if (vv < 0.0) throw domain_error("solve_absorption: outer data must be nonnegative");
    top = std::max(top, vv);
  }
  if (!(top > 0.0)) {
    SolutionField zero(grid);
    return zero;
  }
  // no a priori cap here: general data admits profiles growing inward
  Eigen::VectorXd init(sys.nunk);
  if (opts.initial) {
    const SolutionField& f0 = *opts.initial;
    std::vector<double> vrow(sys.m);
    for (int j = 1; j + 1 < sys.jr; ++j) {
      for (int i = 0; i + 1 < sys.m; ++i) vrow[i] = f0.at(j, i) / sys.kernel_at(j, i);
      sys.extrapolate_corner(vrow);
      for (int i = 0; i < sys.m; ++i) init[sys.uidx(j, i)] = vrow[i];
    }
  } else {
    init.setConstant(top);
  }
  CoreResult core =
      solve_core(sys, ab, vout, std::numeric_limits<double>::infinity(), &init, opts);
  return sys.u_field_from_full(core.vfull);
}

RatioTrace ratio_trace(const WeakSingularityRun& run) {
  const AxiGrid& g = run.field.grid;
  RatioTrace tr;
  tr.r = g.r;
  tr.ratio.resize(g.jr());
  const double a = run.hp.alpha;
  for (int j = 0; j < g.jr(); ++j) {
    tr.ratio[j] = run.field.at(j, 0) / (run.k * std::pow(g.r[j], 2.0 - run.hp.n - a));
  }
  // deficit vanishes like r^e0 with e0 = N + alpha - (N + alpha - 1) q
  const double e0 = run.hp.n + a - (run.hp.n + a - 1.0) * run.exponents.q;
  const int lo = 1, hi = std::min(12, g.jr() / 4);
  std::vector<double> x, y;
  for (int j = lo; j <= hi; ++j) {
    x.push_back(std::pow(g.r[j], e0));
    y.push_back(tr.ratio[j]);
  }
  tr.extrapolated = linear_fit(x, y).intercept;
  return tr;
}

AprioriReport apriori_check(const SolutionField& field, const ExponentPack& pk) {
  AxiGrid const& g = field.grid;
  const int n = g.n;
  // recover alpha from kappa = alpha (N + alpha - 2)
  const double alpha =
      0.5 * (-(n - 2) + std::sqrt(static_cast<double>(n - 2) * (n - 2) + 4.0 * pk.kappa));
  SolutionField work = field;
  if (!work.has_gradient()) work.compute_gradient();
  AprioriReport rep;
  rep.inf_u_core = std::numeric_limits<double>::infinity();
  const double r_lo = 4.0 * g.r_min(), r_hi = 0.25;
  for (int j = 1; j + 1 < g.jr(); ++j) {
    const double rpow = std::pow(g.r[j], -pk.sing_exp - alpha);
    for (int i = 0; i + 1 < g.m(); ++i) {
      const double d = g.delta(j, i);
      const double un = field.at(j, i) / (std::pow(d, alpha) * rpow);
      const double gn = work.gradient_magnitude(j, i) / (std::pow(d, alpha - 1.0) * rpow);
      rep.sup_u = std::max(rep.sup_u, un);
      rep.sup_grad = std::max(rep.sup_grad, gn);
      if (g.r[j] >= r_lo && g.r[j] <= r_hi) {
        rep.sup_u_core = std::max(rep.sup_u_core, un);
        rep.sup_grad_core = std::max(rep.sup_grad_core, gn);
        rep.inf_u_core = std::min(rep.inf_u_core, un);
      }
    }
  }
  rep.two_sided_c = std::max(rep.sup_u_core, 1.0 / std::max(rep.inf_u_core, 1e-300));
  return rep;
}

bool comparison_check(const WeakSingularityRun& run1, const WeakSingularityRun& run2) {
  const AxiGrid& g1 = run1.field.grid;
  const AxiGrid& g2 = run2.field.grid;
  if (g1.jr() != g2.jr() || g1.m() != g2.m() || g1.r_min() != g2.r_min()) {
    throw domain_error("comparison_check: runs must share a grid");
  }
  for (std::size_t idx = 0; idx < run1.field.values.size(); ++idx) {
    if (run1.field.values[idx] > run2.field.values[idx] + 1e-10) return false;
  }
  return true;
}

StrongLimitReport strong_limit(const HardyParams& hp, double q, const AxiGrid& grid,
                               const std::vector<double>& k_ladder,
                               const BvpSolveOptions& opts) {
  if (k_ladder.size() < 4) throw domain_error("strong_limit: ladder needs at least 4 rungs");
  for (std::size_t i = 1; i < k_ladder.size(); ++i) {
    if (!(k_ladder[i] > k_ladder[i - 1])) {
      throw domain_error("strong_limit: ladder must be strictly increasing");
    }
  }
  if (!(k_ladder.back() / k_ladder.front() >= 1e3)) {
    throw domain_error("strong_limit: ladder must span at least three decades");
  }
  const ExponentPack pk = exponent_pack(hp, q);
  require_subcritical(pk, "strong_limit");

  StrongLimitReport rep;
  rep.ladder = k_ladder;
  SolutionField prev(grid);
  double prev_mass = 0;
  WeakSingularityRun top(grid);
  for (double k : k_ladder) {
    BvpSolveOptions o = opts;
    if (prev_mass > 0) {
      o.initial = &prev;
      o.initial_mass = prev_mass;
    }
    top = solve_weak(k, hp, q, grid, o);
    prev = top.field;
    prev_mass = k;
  }

  const auto sol = solve_omega(hp, q, grid.angular);
  rep.omega = sol.omega;

  // rescale at radii near r_min
  const double rm = grid.r_min();
  for (double target : {2.0 * rm, 4.0 * rm, 8.0 * rm}) {
    int jbest = 1;
    double dbest = std::numeric_limits<double>::infinity();
    for (int j = 1; j + 1 < grid.jr(); ++j) {
      const double d = std::fabs(std::log(grid.r[j] / target));
      if (d < dbest) {
        dbest = d;
        jbest = j;
      }
    }
    const double ell = grid.r[jbest];
    rep.ell_used.push_back(ell);
    std::vector<double> prof(grid.m());
    for (int i = 0; i < grid.m(); ++i) {
      prof[i] = std::pow(ell, pk.sing_exp) * top.field.at(jbest, i);
    }
    rep.profiles.push_back(std::move(prof));
  }
  double worst = 0.0;
  for (const auto& prof : rep.profiles) {
    for (int i = 0; i < grid.m(); ++i) {
      if (std::cos(grid.angular.phi[i]) < 0.2) continue;
      worst = std::max(worst, std::fabs(prof[i] - rep.omega[i]) / rep.omega[i]);
    }
  }
  rep.max_rel_error_interior = worst;
  rep.apriori = apriori_check(top.field, pk);
  return rep;
}

void validate_barrier(const BarrierSpec& spec, const HardyParams& hp, double q) {
  const double a = hp.alpha;
  const bool mu_quarter = hp.mu >= 0.25;
  if (spec.log_case != mu_quarter) {
    throw domain_error("barrier: log-weight flag must match mu = 1/4");
  }
  const double geff = spec.log_case ? 0.5 : spec.gamma;
  if (!spec.log_case) {
    if (!(spec.gamma > 1.0 - a) || !(spec.gamma < a)) {
      throw domain_error("barrier: gamma must lie in (1-alpha, alpha) = (" +
                         std::to_string(1.0 - a) + ", " + std::to_string(a) + ")");
    }
  }
  const double bmin = std::max({(4.0 - q) / (q - 1.0) + geff, 0.5 * (hp.n - 2), 1.0});
  if (!(spec.b >= bmin)) {
    throw domain_error("barrier: b must be at least max{(4-q)/(q-1)+gamma,(N-2)/2,1} = " +
                       std::to_string(bmin));
  }
  if (!(spec.radius > 0.0) || spec.radius > 1.0 / 16.0) {
    throw domain_error("barrier: radius must lie in (0, 1/16]");
  }
  if (spec.z_offset < 0.0 || spec.z_offset + spec.radius > 1.0) {
    throw domain_error("barrier: ball must stay inside the model domain");
  }
}

namespace {

// w / amplitude at local cylindrical coordinates (y = in-plane distance to
// the center, d = height above the boundary plane).
double barrier_shape(const BarrierSpec& spec, double y, double d) {
  const double rr = spec.radius * spec.radius - (y * y + d * d);
  const double f = std::pow(rr, -spec.b);
  if (spec.log_case) {
    return f * std::sqrt(d) * std::sqrt(std::log(2.0 / d));
  }
  return f * std::pow(d, spec.gamma);
}

struct BarrierFields {
  std::vector<double> lin;      // -(Delta w + mu w / d^2) per sample, amplitude 1
  std::vector<double> lin_abs;  // |Delta w| + mu w / d^2
  std::vector<double> grad_q;   // |grad w|^q
  int count = 0;
};

BarrierFields barrier_fields(const BarrierSpec& spec, const HardyParams& hp, double q,
                             int side) {
  if (side < 16) throw domain_error("barrier: sample grid too small");
  const double hi = 0.68 * spec.radius;
  const double lo = 3.0 * hi / (side + 2);
  const double h = (hi - lo) / (side - 1);
  BarrierFields out;
  out.lin.reserve(side * side);
  out.lin_abs.reserve(side * side);
  out.grad_q.reserve(side * side);
  std::vector<double> ys(side + 2), ds(side + 2);
  for (int k = 0; k < side + 2; ++k) {
    ys[k] = lo + (k - 1) * h;
    ds[k] = lo + (k - 1) * h;
  }
  std::vector<double> w((side + 2) * (side + 2));
  for (int a = 0; a < side + 2; ++a)
    for (int b = 0; b < side + 2; ++b) w[a * (side + 2) + b] = barrier_shape(spec, ys[a], ds[b]);
  auto W = [&](int a, int b) { return w[a * (side + 2) + b]; };
  for (int a = 1; a <= side; ++a) {
    for (int b = 1; b <= side; ++b) {
      const double y = ys[a], d = ds[b];
      const double wc = W(a, b);
      const double wyy = (W(a + 1, b) - 2.0 * wc + W(a - 1, b)) / (h * h);
      const double wy = (W(a + 1, b) - W(a - 1, b)) / (2.0 * h);
      const double wdd = (W(a, b + 1) - 2.0 * wc + W(a, b - 1)) / (h * h);
      const double wd = (W(a, b + 1) - W(a, b - 1)) / (2.0 * h);
      const double lap = wyy + (hp.n - 2) * wy / y + wdd;
      const double hardy = hp.mu * wc / (d * d);
      out.lin.push_back(-(lap + hardy));
      out.lin_abs.push_back(std::fabs(lap) + hardy);
      out.grad_q.push_back(std::pow(wy * wy + wd * wd, 0.5 * q));
      ++out.count;
    }
  }
  return out;
}

double min_scaled_residual(const BarrierFields& f, double amp, double q) {
  const double ampq = std::pow(amp, q);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < f.count; ++k) {
    const double resid = amp * f.lin[k] + ampq * f.grad_q[k];
    const double scale = amp * f.lin_abs[k] + ampq * f.grad_q[k] + 1e-300;
    worst = std::min(worst, resid / scale);
  }
  return worst;
}

}  // namespace

double barrier_residual(const BarrierSpec& spec, const HardyParams& hp, double q,
                        int grid_side) {
  validate_barrier(spec, hp, q);
  const BarrierFields f = barrier_fields(spec, hp, q, grid_side);
  return min_scaled_residual(f, spec.amplitude, q);
}

BarrierCertificate barrier_certificate(BarrierSpec spec, const HardyParams& hp, double q,
                                       int grid_side) {
  validate_barrier(spec, hp, q);
  const BarrierFields f = barrier_fields(spec, hp, q, grid_side);
  BarrierCertificate cert;
  cert.grid_side = grid_side;
  for (int j = 0; j <= 400; ++j) {
    const double amp = std::ldexp(1.0, j);
    const double ms = min_scaled_residual(f, amp, q);
    if (ms >= -1e-9) {
      cert.amplitude = amp;
      cert.min_scaled = ms;
      const double ampq = std::pow(amp, q);
      double mn = std::numeric_limits<double>::infinity();
      for (int kk = 0; kk < f.count; ++kk) {
        mn = std::min(mn, amp * f.lin[kk] + ampq * f.grad_q[kk]);
      }
      cert.min_residual = mn;
      return cert;
    }
  }
  throw convergence_error("barrier_certificate: no certifying amplitude up to 2^400", 0.0);
}

}  // namespace hardylab
