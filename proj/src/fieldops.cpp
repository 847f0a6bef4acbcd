#include "hardylab/fieldops.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "axi_system.hpp"
#include "hardylab/numerics.hpp"

namespace hardylab {

double martin_halfspace(double r, double phi, const HardyParams& hp) {
  if (!(r > 0.0)) throw domain_error("martin_halfspace: kernel pole at r = 0");
  return std::pow(std::cos(phi), hp.alpha) * std::pow(r, 2.0 - hp.n - hp.alpha);
}

SolutionField martin_field(const AxiGrid& grid, const HardyParams& hp) {
  SolutionField f(grid);
  for (int j = 0; j < grid.jr(); ++j) {
    for (int i = 0; i < grid.m(); ++i) {
      f.at(j, i) = martin_halfspace(grid.r[j], grid.angular.phi[i], hp);
    }
    f.at(j, grid.m() - 1) = 0.0;
  }
  return f;
}

SolutionField lmu_apply(const SolutionField& field, const HardyParams& hp) {
  const AxiGrid& g = field.grid;
  const int jr = g.jr(), m = g.m();
  if (jr < 3 || m < 3) throw domain_error("lmu_apply: need at least 3 nodes per direction");
  SolutionField out(g);
  const double h = g.h_log;
  const auto& phi = g.angular.phi;
  for (int j = 1; j + 1 < jr; ++j) {
    const double inv_r2 = 1.0 / (g.r[j] * g.r[j]);
    for (int i = 1; i + 1 < m; ++i) {
      const double u_ss = (field.at(j + 1, i) - 2.0 * field.at(j, i) + field.at(j - 1, i)) / (h * h);
      const double u_s = (field.at(j + 1, i) - field.at(j - 1, i)) / (2.0 * h);
      const double hm = phi[i] - phi[i - 1];
      const double hp_ = phi[i + 1] - phi[i];
      const double den = hm * hp_ * (hm + hp_);
      const double u_pp =
          2.0 * (hm * field.at(j, i + 1) - (hm + hp_) * field.at(j, i) + hp_ * field.at(j, i - 1)) /
          den;
      const double u_p = (hm * hm * field.at(j, i + 1) + (hp_ * hp_ - hm * hm) * field.at(j, i) -
                          hp_ * hp_ * field.at(j, i - 1)) /
                         den;
      const double c = std::cos(phi[i]);
      const double cot = c / std::sin(phi[i]);
      out.at(j, i) = -inv_r2 * (u_ss + (hp.n - 2) * u_s + u_pp + (hp.n - 2) * cot * u_p +
                                hp.mu * field.at(j, i) / (c * c));
    }
  }
  return out;
}

double relative_residual_sup(const SolutionField& residual, const SolutionField& u,
                             const Window& w) {
  const AxiGrid& g = residual.grid;
  double sup = 0.0;
  for (int j = 1; j + 1 < g.jr(); ++j) {
    for (int i = 1; i + 1 < g.m(); ++i) {
      if (!w.contains(g, j, i)) continue;
      const double d = g.delta(j, i);
      const double scale =
          std::fabs(u.at(j, i)) * (1.0 / (g.r[j] * g.r[j]) + 1.0 / (d * d)) + 1e-300;
      sup = std::max(sup, std::fabs(residual.at(j, i)) / scale);
    }
  }
  return sup;
}

SolutionField solve_linear_lmu(const AxiGrid& grid, const HardyParams& hp,
                               const SolutionField* source,
                               const std::vector<double>& outer_data) {
  if (static_cast<int>(outer_data.size()) != grid.m()) {
    throw domain_error("solve_linear_lmu: outer data size must match the angular mesh");
  }
  AxiSystem sys(grid, hp);
  Eigen::VectorXd b = sys.source_rhs(source);
  // fold the Dirichlet data in by evaluating the rows on a data-only array
  const std::vector<double> vout = sys.outer_v_from_udata(outer_data);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(sys.nunk);
  std::vector<double> vdata = sys.full_array(zero, vout);
  // the closure row is driven by unknowns only
  for (int i = 0; i < sys.m; ++i) vdata[grid.index(0, i)] = 0.0;
  Eigen::VectorXd gdata;
  sys.apply_linear(vdata, gdata);
  b -= gdata;

  // the power-law closure makes the system mildly nonlinear; relax the
  // tangent weights over a few passes (exact after one pass for power modes)
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  Eigen::VectorXd vu = Eigen::VectorXd::Zero(sys.nunk);
  AxiSystem::ClosureWeights cw_tan;
  const AxiSystem::ClosureWeights* wptr = nullptr;
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<Eigen::Triplet<double>> ts;
    sys.linear_triplets(ts, wptr);
    Eigen::SparseMatrix<double> A(sys.nunk, sys.nunk);
    A.setFromTriplets(ts.begin(), ts.end());
    lu.compute(A);
    if (lu.info() != Eigen::Success) {
      throw std::runtime_error("solve_linear_lmu: sparse factorization failed");
    }
    vu = lu.solve(b);
    cw_tan = sys.closure_weights(sys.full_array(vu, vout));
    wptr = &cw_tan;
  }
  return sys.u_field_from_full(sys.full_array(vu, vout));
}

double rayleigh_lambda(const AxiGrid& grid, const HardyParams& hp, int trial_count) {
  if (trial_count < 1) throw domain_error("rayleigh_lambda: need at least one trial");
  const int jr = grid.jr(), m = grid.m();
  // cell widths
  std::vector<double> wr(jr), wf(m);
  for (int j = 0; j < jr; ++j) {
    const double lo = (j == 0) ? grid.r[0] : std::sqrt(grid.r[j - 1] * grid.r[j]);
    const double hi = (j + 1 == jr) ? grid.r[jr - 1] : std::sqrt(grid.r[j] * grid.r[j + 1]);
    wr[j] = hi - lo;
  }
  const auto& xi = grid.angular.xi;
  for (int i = 0; i < m; ++i) {
    const double lo = (i == 0) ? 0.0 : AngularMesh::map_phi(0.5 * (xi[i - 1] + xi[i]));
    const double hi =
        (i + 1 == m) ? 0.5 * std::numbers::pi : AngularMesh::map_phi(0.5 * (xi[i] + xi[i + 1]));
    wf[i] = hi - lo;
  }
  const double t_last = 0.5 * std::numbers::pi - AngularMesh::map_phi(0.5 * (xi[m - 2] + xi[m - 1]));

  std::vector<double> exps = {hp.alpha};
  for (int t = 1; t < trial_count; ++t) {
    exps.push_back(0.51 + (0.995 - 0.51) * static_cast<double>(t - 1) /
                              std::max(1, trial_count - 2));
  }

  double best = std::numeric_limits<double>::infinity();
  for (double a : exps) {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < jr; ++j) {
      const double r = grid.r[j];
      const double bmp = 1.0 - r * r;
      const double dbmp = -2.0 * r;
      const double rw = std::pow(r, hp.n - 1) * wr[j];
      for (int i = 0; i + 1 < m; ++i) {
        const double c = std::cos(grid.angular.phi[i]);
        const double s = std::sin(grid.angular.phi[i]);
        const double sw = std::pow(s, hp.n - 2) * wf[i];
        const double c2a = std::pow(c, 2.0 * a);
        // pointwise-cancelled numerator density: |grad u|^2 - mu (u/delta)^2
        const double g = dbmp * dbmp * c2a +
                         bmp * bmp * (a * a * s * s - hp.mu) * std::pow(c, 2.0 * a - 2.0) / (r * r);
        num += g * rw * sw;
        den += bmp * bmp * c2a * rw * sw;
      }
      // last angular cell: integrate the leading power of the singular part
      if (a > 0.5) {
        const double g_last =
            bmp * bmp * (a * a - hp.mu) * std::pow(t_last, 2.0 * a - 1.0) / (2.0 * a - 1.0) /
            (r * r);
        num += g_last * rw;
      }
    }
    best = std::min(best, num / den);
  }
  return best;
}

WeakNormReport weak_tail(const SolutionField& field, double gamma) {
  if (gamma < 0.0) throw domain_error("weak_tail: gamma must be nonnegative");
  const AxiGrid& g = field.grid;
  const int jr = g.jr(), m = g.m();
  const int n = g.n;

  // weighted cell masses delta^gamma dV and the field samples
  std::vector<double> mass(jr * m, 0.0);
  const double sigma =
      2.0 * std::pow(std::numbers::pi, 0.5 * (n - 1)) / std::tgamma(0.5 * (n - 1));
  const auto& xi = g.angular.xi;
  std::vector<double> wf(m);
  for (int i = 0; i < m; ++i) {
    const double lo = (i == 0) ? 0.0 : AngularMesh::map_phi(0.5 * (xi[i - 1] + xi[i]));
    const double hi =
        (i + 1 == m) ? 0.5 * std::numbers::pi : AngularMesh::map_phi(0.5 * (xi[i] + xi[i + 1]));
    wf[i] = hi - lo;
  }
  std::vector<double> positive;
  for (int j = 0; j < jr; ++j) {
    const double rlo = (j == 0) ? g.r[0] : std::sqrt(g.r[j - 1] * g.r[j]);
    const double rhi = (j + 1 == jr) ? 1.0 : std::sqrt(g.r[j] * g.r[j + 1]);
    for (int i = 0; i < m; ++i) {
      const double u = field.at(j, i);
      if (u < 0.0) throw domain_error("weak_tail: field must be nonnegative");
      const double s = std::sin(g.angular.phi[i]);
      const double dv = sigma * std::pow(g.r[j], n - 1) * (rhi - rlo) * std::pow(s, n - 2) * wf[i];
      const double d = g.delta(j, i);
      mass[g.index(j, i)] = (gamma == 0.0 ? 1.0 : std::pow(d, gamma)) * dv;
      if (u > 0.0) positive.push_back(u);
    }
  }
  if (positive.size() < 16) throw fit_error("weak_tail: too few positive samples");
  const double lam_lo = std::max(percentile(positive, 1.0), 1e-290);
  const double lam_hi = percentile(positive, 99.9);
  if (!(lam_hi > lam_lo * (1.0 + 1e-12))) {
    throw fit_error("weak_tail: degenerate level range (step-function tail)");
  }

  constexpr int kLevels = 60;
  std::vector<double> lam(kLevels), mm(kLevels);
  for (int k = 0; k < kLevels; ++k) {
    lam[k] = lam_lo * std::pow(lam_hi / lam_lo, static_cast<double>(k) / (kLevels - 1));
  }
  for (int j = 0; j < jr; ++j) {
    for (int i = 0; i < m; ++i) {
      const double u = field.at(j, i);
      const double w = mass[g.index(j, i)];
      // levels are sorted: accumulate into every level below u
      for (int k = 0; k < kLevels && lam[k] < u; ++k) mm[k] += w;
    }
  }

  // fit over the middle two decades of the levels that carry mass
  std::vector<int> valid;
  for (int k = 0; k < kLevels; ++k) {
    if (mm[k] > 0.0) valid.push_back(k);
  }
  if (static_cast<int>(valid.size()) < 10) {
    throw fit_error("weak_tail: fewer than 10 levels with nonzero mass");
  }
  const double l_lo = std::log10(lam[valid.front()]);
  const double l_hi = std::log10(lam[valid.back()]);
  const double mid = 0.5 * (l_lo + l_hi);
  double win_lo = mid - 1.0, win_hi = mid + 1.0;
  if (win_lo < l_lo) win_lo = l_lo;
  if (win_hi > l_hi) win_hi = l_hi;
  std::vector<double> lx, ly;
  WeakNormReport rep;
  rep.gamma = gamma;
  rep.lambda_lo = std::pow(10.0, win_lo);
  rep.lambda_hi = std::pow(10.0, win_hi);
  for (int k : valid) {
    const double l = std::log10(lam[k]);
    if (l < win_lo || l > win_hi) continue;
    lx.push_back(std::log(lam[k]));
    ly.push_back(std::log(mm[k]));
  }
  if (lx.size() < 10) throw fit_error("weak_tail: fewer than 10 levels in the fit window");
  rep.p_hat = -linear_fit(lx, ly).slope;
  if (!(rep.p_hat > 1.0)) {
    throw fit_error("weak_tail: fitted tail exponent not in the admissible range");
  }
  double nrm = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    nrm = std::max(nrm, std::exp(lx[k]) * std::pow(std::exp(ly[k]), 1.0 / rep.p_hat));
  }
  rep.norm_estimate = nrm;
  return rep;
}

}  // namespace hardylab
