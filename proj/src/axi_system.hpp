#pragma once

// Shared discretization backend for the axisymmetric model-domain solvers.
//
// The solvers work in the kernel-scaled unknown v = u / K with
// K = cos^alpha(phi) r^(lam), lam = 2 - N - alpha, for which
//   -L_mu u = -r^(lam-2) cos^alpha(phi) * B v,
//   B v = v_ss - b0 v_s + D_phi v,      s = ln r,  b0 = N + 2 alpha - 2,
// with D_phi the weighted divergence-form angular operator of AngularTables.
// The zeroth-order term cancels exactly, so the kernel itself (v = const) is
// reproduced to rounding and no spurious resonance with the boundary data can
// build up across the radial decades.  Rows are written as G(v) = -B v; the
// linear problem reads G(v) = r^(2-lam) cos^{-alpha} tau.
//
// Grid unknowns: v_{j,i} for j = 1..jr-2, all angular i.  Row j = jr-1 is
// Dirichlet data; row j = 0 is eliminated through the log-linear closure of
// u/K in log r (zero curvature of ln v against ln r), i.e. v_0 = v_1^2 / v_2.
// The power-law form reproduces every pure radial mode r^p exactly, so the
// closure does not bias the solve toward any particular branch; columns where
// the ratio is undefined fall back to the tangent (linear) weights.

#include <Eigen/Sparse>
#include <cmath>
#include <vector>

#include "hardylab/grid.hpp"
#include "hardylab/params.hpp"

namespace hardylab {

struct AxiSystem {
  AxiGrid grid;
  HardyParams hp;
  AngularTables tb;
  int jr, m, nunk;
  double h;       // ln r spacing
  double lam;     // kernel exponent 2 - N - alpha
  double b0;      // radial drift N + 2 alpha - 2
  double ce, cw, cc_rad;  // coefficients of -(v_ss - b0 v_s)
  // Inner-closure flavor.  The tangent (linear) closure v_0 = 2v_1 - v_2
  // suppresses curved radial modes and so continues the solution below r_min
  // as a kernel multiple: the right model for boundary-mass data.  The
  // power-law variant v_0 = v_1^2/v_2 passes every pure mode r^p and is used
  // when the data itself prescribes an inward-growing profile.
  bool power_closure = false;

  AxiSystem(const AxiGrid& g, const HardyParams& params)
      : grid(g), hp(params), tb(g.angular, params.n, params.alpha) {
    jr = grid.jr();
    m = grid.m();
    nunk = (jr - 2) * m;
    h = grid.h_log;
    lam = 2.0 - hp.n - hp.alpha;
    b0 = hp.n + 2.0 * hp.alpha - 2.0;
    ce = -(1.0 / (h * h) - b0 / (2.0 * h));
    cw = -(1.0 / (h * h) + b0 / (2.0 * h));
    cc_rad = 2.0 / (h * h);
  }

  int uidx(int j, int i) const { return (j - 1) * m + i; }

  double kernel_at(int j, int i) const {
    return std::pow(tb.c[i], hp.alpha) * std::pow(grid.r[j], lam);
  }

  // closure ratio v_1/v_2, guarded where a power-law fit is meaningless
  double closure_ratio(double v1, double v2) const {
    if (!power_closure) return 1.0;
    if (!(v1 > 0.0) || !(v2 > 0.0)) return 1.0;
    const double rho = v1 / v2;
    if (!(rho > 1e-6) || !(rho < 1e6)) return 1.0;
    return rho;
  }

  // Full (jr x m) array from unknowns and the Dirichlet row, applying the
  // inner closure at j = 0.
  std::vector<double> full_array(const Eigen::VectorXd& vu,
                                 const std::vector<double>& vout) const {
    std::vector<double> v(jr * m, 0.0);
    for (int j = 1; j + 1 < jr; ++j)
      for (int i = 0; i < m; ++i) v[grid.index(j, i)] = vu[uidx(j, i)];
    for (int i = 0; i < m; ++i) v[grid.index(jr - 1, i)] = vout[i];
    for (int i = 0; i < m; ++i) {
      const double v1 = v[grid.index(1, i)], v2 = v[grid.index(2, i)];
      const double rho = closure_ratio(v1, v2);
      v[grid.index(0, i)] = (2.0 * rho) * v1 - (rho * rho) * v2;
    }
    return v;
  }

  // Tangent weights of the closure at the current iterate: v_0 = a v_1 + b v_2.
  struct ClosureWeights {
    std::vector<double> a, b;
  };
  ClosureWeights closure_weights(const std::vector<double>& vfull) const {
    ClosureWeights w;
    w.a.resize(m);
    w.b.resize(m);
    for (int i = 0; i < m; ++i) {
      const double rho =
          closure_ratio(vfull[grid.index(1, i)], vfull[grid.index(2, i)]);
      w.a[i] = 2.0 * rho;
      w.b[i] = -rho * rho;
    }
    return w;
  }

  // Angular coefficients of G at row i (relative to the node).
  void angular_coeffs(int i, double& self, double& south, double& north) const {
    if (i == 0) {
      self = tb.pole_coeff;
      north = -tb.pole_coeff;
      south = 0.0;
    } else if (i + 1 < m) {
      const double inv = 1.0 / (tb.dxi * tb.dxi * tb.theta[i]);
      const double ap = tb.p_half[i] * inv, am = tb.p_half[i - 1] * inv;
      self = ap + am;
      north = -ap;
      south = -am;
    } else {
      const double f = tb.p_edge / (tb.dxi * tb.scale_b);
      self = f;
      south = -f;
      north = 0.0;
    }
  }

  // Apply the linear rows G to a full array.
  void apply_linear(const std::vector<double>& v, Eigen::VectorXd& out) const {
    out.resize(nunk);
    for (int j = 1; j + 1 < jr; ++j) {
      for (int i = 0; i < m; ++i) {
        const double vc = v[grid.index(j, i)];
        double g = cc_rad * vc + ce * v[grid.index(j + 1, i)] + cw * v[grid.index(j - 1, i)];
        double aself, asouth, anorth;
        angular_coeffs(i, aself, asouth, anorth);
        g += aself * vc;
        if (i > 0) g += asouth * v[grid.index(j, i - 1)];
        if (i + 1 < m) g += anorth * v[grid.index(j, i + 1)];
        out[uidx(j, i)] = g;
      }
    }
  }

  // Adds val * v_{j,i} to the triplet list for `row`, remapping the closure
  // row through the tangent weights and skipping the Dirichlet row (the
  // caller folds data into the rhs by evaluating rows on a data-only array).
  void add_coeff(std::vector<Eigen::Triplet<double>>& ts, int row, int j, int i, double val,
                 const ClosureWeights* cw_tan) const {
    if (j == 0) {
      const double a = cw_tan ? cw_tan->a[i] : 2.0;
      const double b = cw_tan ? cw_tan->b[i] : -1.0;
      ts.emplace_back(row, uidx(1, i), a * val);
      ts.emplace_back(row, uidx(2, i), b * val);
    } else if (j + 1 < jr) {
      ts.emplace_back(row, uidx(j, i), val);
    }
  }

  void linear_triplets(std::vector<Eigen::Triplet<double>>& ts,
                       const ClosureWeights* cw_tan = nullptr) const {
    for (int j = 1; j + 1 < jr; ++j) {
      for (int i = 0; i < m; ++i) {
        const int row = uidx(j, i);
        double aself, asouth, anorth;
        angular_coeffs(i, aself, asouth, anorth);
        add_coeff(ts, row, j, i, cc_rad + aself, cw_tan);
        add_coeff(ts, row, j + 1, i, ce, cw_tan);
        add_coeff(ts, row, j - 1, i, cw, cw_tan);
        if (i > 0) add_coeff(ts, row, j, i - 1, asouth, cw_tan);
        if (i + 1 < m) add_coeff(ts, row, j, i + 1, anorth, cw_tan);
      }
    }
  }

  // r^(2-lam) cos^{-alpha} tau per row; integrated with the weight
  // cos(t)^{N-2} sin(t)^{alpha} on the boundary half cell.
  Eigen::VectorXd source_rhs(const SolutionField* tau) const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(nunk);
    if (!tau) return b;
    for (int j = 1; j + 1 < jr; ++j) {
      const double rp = std::pow(grid.r[j], 2.0 - lam);
      for (int i = 0; i + 1 < m; ++i) {
        b[uidx(j, i)] = rp * std::pow(tb.c[i], -hp.alpha) * tau->at(j, i);
      }
      // boundary half cell: density ~ t^alpha tau_b near pi/2
      const double tau_b = tau->at(j, m - 1);
      const double tau_n = tau->at(j, m - 2);
      const double tau_m = (1.0 - tb.th_interp) * tau_n + tb.th_interp * tau_b;
      const double cm = std::sin(tb.t_mid), sm = std::cos(tb.t_mid);
      const double exact = tau_b * std::pow(tb.t_half, hp.alpha + 1.0) / (hp.alpha + 1.0);
      const double rem =
          (std::pow(sm, hp.n - 2) * std::pow(cm, hp.alpha) * tau_m -
           std::pow(tb.t_mid, hp.alpha) * tau_b) *
          tb.t_half;
      b[uidx(j, m - 1)] = rp * (exact + rem) / tb.scale_b;
    }
    return b;
  }

  // Quadratic extrapolation of the pi/2 value from the last three interior
  // nodes (exact for data proportional to cos^alpha).
  void extrapolate_corner(std::vector<double>& vrow) const {
    const auto& phi = grid.angular.phi;
    const double x = phi[m - 1];
    const double x0 = phi[m - 4], x1 = phi[m - 3], x2 = phi[m - 2];
    const double l0 = (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2));
    const double l1 = (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2));
    const double l2 = (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
    vrow[m - 1] = l0 * vrow[m - 4] + l1 * vrow[m - 3] + l2 * vrow[m - 2];
  }

  // Dirichlet v-values from u-values given on the outer circle.
  std::vector<double> outer_v_from_udata(const std::vector<double>& u_outer) const {
    std::vector<double> vout(m, 0.0);
    for (int i = 0; i + 1 < m; ++i) vout[i] = u_outer[i] / std::pow(tb.c[i], hp.alpha);
    extrapolate_corner(vout);
    return vout;
  }

  SolutionField u_field_from_full(const std::vector<double>& v) const {
    SolutionField f(grid);
    for (int j = 0; j < jr; ++j) {
      for (int i = 0; i < m; ++i) {
        f.at(j, i) = kernel_at(j, i) * v[grid.index(j, i)];
      }
      f.at(j, m - 1) = 0.0;
    }
    return f;
  }
};

}  // namespace hardylab
