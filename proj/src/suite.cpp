#include "hardylab/suite.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "hardylab/bvp.hpp"
#include "hardylab/capacity.hpp"
#include "hardylab/fieldops.hpp"
#include "hardylab/hemisphere.hpp"
#include "hardylab/io.hpp"
#include "hardylab/numerics.hpp"
#include "hardylab/params.hpp"

namespace hardylab {
namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

class Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// The sweep grid shared by the identity checks: N in 3..6, mu in 0.01..0.25.
template <typename F>
void sweep_grid(F&& f) {
  for (int n = 3; n <= 6; ++n) {
    for (int k = 0; k < 7; ++k) {
      f(n, 0.01 + 0.04 * k);
    }
  }
}

int doubled(int m) { return 2 * (m - 1) + 1; }

}  // namespace

void RunConfig::validate() const {
  if (n < 3) throw domain_error("config: N must be >= 3");
  if (!(mu > 0.0) || !(mu <= 0.25)) throw domain_error("config: mu must lie in (0, 1/4]");
  if (!(q > 1.0) || !(q < 2.0)) throw domain_error("config: q must lie in (1, 2)");
  if (!(r_min > 0.0) || !(r_min <= 0.1)) throw domain_error("config: r_min must lie in (0, 0.1]");
  if (m_hemisphere < 16 || m_2d < 16 || jr < 16) {
    throw domain_error("config: mesh sizes too small");
  }
  auto check_ladder = [](const std::vector<double>& l, const char* what) {
    if (l.empty()) throw domain_error(std::string("config: empty ") + what);
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (!(l[i] > 0.0)) throw domain_error(std::string("config: nonpositive entry in ") + what);
      if (i > 0 && !(l[i] > l[i - 1])) {
        throw domain_error(std::string("config: ") + what + " must increase");
      }
    }
  };
  check_ladder(k_ladder, "k ladder");
  check_ladder(strong_ladder, "strong ladder");
}

Report run_suite(const RunConfig& cfg) {
  cfg.validate();
  Report rep;
  const HardyParams hp = HardyParams::make(cfg.n, cfg.mu);
  const double qc = q_crit(cfg.n, hp.alpha);
  const bool subcritical = cfg.q < qc;
  const bool artifacts = !cfg.outdir.empty();
  const std::string outdir = artifacts ? resolve_outdir(cfg.outdir) : std::string();

  // 1. closed-form identity ell(N, q_crit) = kappa on the sweep grid
  {
    Stopwatch sw;
    double worst = 0.0;
    sweep_grid([&](int n, double mu) {
      const double a = alpha_of_mu(mu);
      const double qq = q_crit(n, a);
      const double ell = (2.0 - qq) / (qq - 1.0) * (qq / (qq - 1.0) - n);
      const double kap = a * (n + a - 2.0);
      worst = std::max(worst, std::fabs(ell - kap));
    });
    rep.checks.push_back({"critical-exponent-identity", worst <= cfg.tol.exponent_identity,
                          fmt("max |ell(q_crit)-kappa| = %.3e (tol %.1e)", worst,
                              cfg.tol.exponent_identity),
                          sw.seconds()});
  }

  // 2. |grad phi_0|^2 + phi_0^2 - 1 at 10^4 seeded angles
  {
    Stopwatch sw;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> dist(0.0, 0.5 * std::numbers::pi);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      worst = std::max(worst, std::fabs(grad_identity_gap(dist(rng))));
    }
    rep.checks.push_back({"eigenfunction-identity", worst <= cfg.tol.eigen_identity,
                          fmt("max |identity gap| = %.3e over 10^4 angles (tol %.1e)", worst,
                              cfg.tol.eigen_identity),
                          sw.seconds()});
  }

  // 3. hemisphere profile: residual, amplitude bound, boundary fit,
  //    uniqueness, supercritical refusal
  {
    Stopwatch sw;
    CheckResult c;
    c.name = "hemisphere-solve";
    const auto mesh = AngularMesh::cosine(cfg.m_hemisphere);
    try {
      if (!subcritical) {
        try {
          solve_omega(hp, cfg.q, mesh);
          c.passed = false;
          c.detail = "supercritical configuration was not refused";
        } catch (const supercritical_error&) {
          c.passed = true;
          c.detail = fmt("q = %g >= q_crit = %g refused as expected", cfg.q, qc);
        }
      } else {
        const auto sol = solve_omega(hp, cfg.q, mesh);
        const auto pk = sol.exponents;
        double bound_viol = -1e300;
        for (int i = 0; i < mesh.size(); ++i) {
          bound_viol = std::max(bound_viol, sol.omega[i] - *pk.gamma1 * phi_mu(mesh.phi[i], hp.alpha));
        }
        const double fit = boundary_exponent_fit(sol);
        const double gap = uniqueness_probe(hp, cfg.q, mesh);
        bool refusal = false;
        const double q_super = std::min(0.5 * (qc + 2.0), qc + 0.05);
        try {
          solve_omega(hp, q_super, mesh);
        } catch (const supercritical_error&) {
          refusal = true;
        }
        const bool ok = sol.residual_sup <= cfg.tol.hemisphere_residual &&
                        bound_viol <= cfg.tol.bound_slack &&
                        std::fabs(fit - hp.alpha) <= cfg.tol.fit_rel * hp.alpha &&
                        gap <= cfg.tol.uniqueness_gap && refusal;
        c.passed = ok;
        c.detail = fmt("residual %.2e (<=%.0e), bound slack %.2e (<=%.0e), fit %.5f vs alpha %.5f, "
                       "uniqueness gap %.2e (<=%.0e), refusal at q=%.3g %s",
                       sol.residual_sup, cfg.tol.hemisphere_residual, bound_viol,
                       cfg.tol.bound_slack, fit, hp.alpha, gap, cfg.tol.uniqueness_gap, q_super,
                       refusal ? "ok" : "MISSING");
        if (artifacts) {
          const auto res = ode_residual(sol);
          std::vector<std::vector<double>> rows;
          for (int i = 0; i < mesh.size(); ++i) {
            const double r = (i >= 1 && i + 1 < mesh.size()) ? res[i - 1] : 0.0;
            rows.push_back({mesh.phi[i], sol.omega[i], sol.v[i], r});
          }
          write_csv(outdir + "/omega.csv", {"phi", "omega", "v", "residual"}, rows);
        }
      }
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("unexpected error: ") + e.what();
    }
    c.seconds = sw.seconds();
    rep.checks.push_back(std::move(c));
  }

  // 4. kernel harmonicity: interior residual order under two mesh doublings
  {
    Stopwatch sw;
    CheckResult c;
    c.name = "martin-harmonicity-order";
    try {
      const Window win{0.02, 0.9, 0.1};
      double res[3];
      int jr = 65, m = 81;
      for (int lvl = 0; lvl < 3; ++lvl) {
        const AxiGrid g = AxiGrid::make(cfg.r_min, jr, m, cfg.n);
        const SolutionField K = martin_field(g, hp);
        res[lvl] = relative_residual_sup(lmu_apply(K, hp), K, win);
        jr = doubled(jr);
        m = doubled(m);
      }
      const double o1 = observed_order(res[0], res[1]);
      const double o2 = observed_order(res[1], res[2]);
      c.passed = o1 >= cfg.tol.order_min && o2 >= cfg.tol.order_min;
      c.detail = fmt("window residuals %.3e / %.3e / %.3e, orders %.2f, %.2f (>= %.2f)", res[0],
                     res[1], res[2], o1, o2, cfg.tol.order_min);
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("unexpected error: ") + e.what();
    }
    c.seconds = sw.seconds();
    rep.checks.push_back(std::move(c));
  }

  // 5. weak-tail exponents of the kernel and its gradient
  {
    Stopwatch sw;
    CheckResult c;
    c.name = "weak-tail-exponents";
    try {
      const AxiGrid g = AxiGrid::make(cfg.r_min, cfg.jr, cfg.m_2d, cfg.n);
      SolutionField K = martin_field(g, hp);
      const auto repK = weak_tail(K, 0.0);
      const double wantK = cfg.n / (cfg.n + hp.alpha - 2.0);
      K.compute_gradient();
      SolutionField gmag(g);
      for (int j = 0; j < g.jr(); ++j)
        for (int i = 0; i < g.m(); ++i) gmag.at(j, i) = K.gradient_magnitude(j, i);
      const auto repG = weak_tail(gmag, hp.alpha);
      const double wantG = (cfg.n + hp.alpha) / (cfg.n + hp.alpha - 1.0);
      const double errK = std::fabs(repK.p_hat - wantK) / wantK;
      const double errG = std::fabs(repG.p_hat - wantG) / wantG;
      c.passed = errK <= cfg.tol.tail_rel && errG <= cfg.tol.tail_rel;
      c.detail = fmt("kernel p_hat %.3f vs %.3f (err %.1f%%), gradient p_hat %.3f vs %.3f "
                     "(err %.1f%%), tol %.0f%%",
                     repK.p_hat, wantK, 100 * errK, repG.p_hat, wantG, 100 * errG,
                     100 * cfg.tol.tail_rel);
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("unexpected error: ") + e.what();
    }
    c.seconds = sw.seconds();
    rep.checks.push_back(std::move(c));
  }

  // 6/7. weak singularity: axis ratio with r_min sensitivity; mass monotonicity
  std::vector<WeakSingularityRun> ladder_runs;
  {
    Stopwatch sw;
    CheckResult c;
    c.name = "weak-singularity-ratio";
    try {
      if (!subcritical) {
        try {
          const AxiGrid g = AxiGrid::make(cfg.r_min, cfg.jr, cfg.m_2d, cfg.n);
          solve_weak(1.0, hp, cfg.q, g);
          c.passed = false;
          c.detail = "supercritical configuration was not refused";
        } catch (const supercritical_error&) {
          c.passed = true;
          c.detail = fmt("q = %g >= q_crit = %g refused as expected", cfg.q, qc);
        }
      } else {
        const AxiGrid g = AxiGrid::make(cfg.r_min, cfg.jr, cfg.m_2d, cfg.n);
        const auto run = solve_weak(1.0, hp, cfg.q, g);
        const auto tr = ratio_trace(run);
        // halve r_min at matched spacing
        const int jr2 =
            1 + static_cast<int>(std::lround((cfg.jr - 1) * std::log(2.0 / cfg.r_min) /
                                             -std::log(cfg.r_min)));
        const AxiGrid g2 = AxiGrid::make(0.5 * cfg.r_min, jr2, cfg.m_2d, cfg.n);
        const auto run2 = solve_weak(1.0, hp, cfg.q, g2);
        const auto tr2 = ratio_trace(run2);
        const double drift = std::fabs(tr.extrapolated - tr2.extrapolated);
        c.passed = tr.extrapolated >= cfg.tol.ratio_lo && tr.extrapolated <= cfg.tol.ratio_hi &&
                   drift <= cfg.tol.ratio_drift;
        c.detail = fmt("extrapolated axis ratio %.5f (in [%.2f, %.2f]), halved-r_min drift %.2e "
                       "(<= %.2g)",
                       tr.extrapolated, cfg.tol.ratio_lo, cfg.tol.ratio_hi, drift,
                       cfg.tol.ratio_drift);
        if (artifacts) {
          std::vector<std::vector<double>> rows;
          for (std::size_t j = 0; j < tr.r.size(); ++j) rows.push_back({tr.r[j], tr.ratio[j]});
          write_csv(outdir + "/ratio_trace.csv", {"r", "ratio"}, rows);
        }
      }
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("unexpected error: ") + e.what();
    }
    c.seconds = sw.seconds();
    rep.checks.push_back(std::move(c));
  }
  {
    Stopwatch sw;
    CheckResult c;
    c.name = "k-monotonicity";
    try {
      if (!subcritical) {
        c.passed = true;
        c.detail = "skipped in the supercritical regime (no solves exist)";
      } else {
        const AxiGrid g = AxiGrid::make(cfg.r_min, cfg.jr, cfg.m_2d, cfg.n);
        bool mono = true;
        for (double k : cfg.k_ladder) {
          BvpSolveOptions o;
          if (!ladder_runs.empty()) o.initial = &ladder_runs.back().field;
          ladder_runs.push_back(solve_weak(k, hp, cfg.q, g, o));
        }
        for (std::size_t i = 0; i + 1 < ladder_runs.size(); ++i) {
          mono = mono && comparison_check(ladder_runs[i], ladder_runs[i + 1]);
        }
        c.passed = mono;
        c.detail = fmt("%zu-rung ladder nodewise increasing: %s (slack %.0e)", cfg.k_ladder.size(),
                       mono ? "yes" : "NO", cfg.tol.monotone_slack);
      }
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("unexpected error: ") + e.what();
    }
    c.seconds = sw.seconds();
    rep.checks.push_back(std::move(c));
  }

  // 8/9. strong singularity profile and a priori stability
  {
    Stopwatch sw;
    CheckResult c8, c9;
    c8.name = "strong-singularity-profile";
    c9.name = "apriori-normalized-sups";
    try {
      if (!subcritical) {
        c8.passed = c9.passed = true;
        c8.detail = c9.detail = "skipped in the supercritical regime (no solves exist)";
      } else {
        const AxiGrid g = AxiGrid::make(cfg.r_min, cfg.jr, cfg.m_2d, cfg.n);
        const auto rep_c = strong_limit(hp, cfg.q, g, cfg.strong_ladder);
        const AxiGrid gf = AxiGrid::make(cfg.r_min, doubled(cfg.jr), doubled(cfg.m_2d), cfg.n);
        const auto rep_f = strong_limit(hp, cfg.q, gf, cfg.strong_ladder);
        const double cr = rep_f.apriori.two_sided_c / rep_c.apriori.two_sided_c;
        c8.passed = rep_c.max_rel_error_interior <= cfg.tol.profile_rel &&
                    cr >= cfg.tol.stability_lo && cr <= cfg.tol.stability_hi;
        c8.detail = fmt("interior profile error %.2f%% (<= %.0f%%), two-sided c %.3f -> %.3f, "
                        "ratio %.3f in [%.2f, %.2f]",
                        100 * rep_c.max_rel_error_interior, 100 * cfg.tol.profile_rel,
                        rep_c.apriori.two_sided_c, rep_f.apriori.two_sided_c, cr,
                        cfg.tol.stability_lo, cfg.tol.stability_hi);
        const double ru = rep_f.apriori.sup_u / rep_c.apriori.sup_u;
        const double rg = rep_f.apriori.sup_grad / rep_c.apriori.sup_grad;
        c9.passed = std::isfinite(rep_c.apriori.sup_u) && std::isfinite(rep_c.apriori.sup_grad) &&
                    ru >= cfg.tol.stability_lo && ru <= cfg.tol.stability_hi &&
                    rg >= cfg.tol.stability_lo && rg <= cfg.tol.stability_hi;
        c9.detail = fmt("normalized sups u %.4g (ratio %.3f), grad %.4g (ratio %.3f), "
                        "stability window [%.2f, %.2f]",
                        rep_c.apriori.sup_u, ru, rep_c.apriori.sup_grad, rg,
                        cfg.tol.stability_lo, cfg.tol.stability_hi);
        if (artifacts) {
          std::vector<std::vector<double>> rows;
          for (int i = 0; i < g.m(); ++i) {
            std::vector<double> row = {g.angular.phi[i], rep_c.omega[i]};
            for (const auto& p : rep_c.profiles) row.push_back(p[i]);
            rows.push_back(std::move(row));
          }
          std::vector<std::string> hdr = {"phi", "omega"};
          for (double l : rep_c.ell_used) hdr.push_back("rescaled_at_" + g17(l));
          write_csv(outdir + "/strong_profiles.csv", hdr, rows);
        }
      }
    } catch (const std::exception& e) {
      c8.passed = c9.passed = false;
      c8.detail = c9.detail = std::string("unexpected error: ") + e.what();
    }
    c8.seconds = sw.seconds();
    rep.checks.push_back(std::move(c8));
    rep.checks.push_back(std::move(c9));
  }

  // 10. barrier certificates (canonical parameter pairs)
  {
    Stopwatch sw;
    CheckResult c;
    c.name = "barrier-certificate";
    try {
      BarrierSpec sa;
      sa.gamma = 0.6;
      sa.b = 9.0;
      sa.radius = 1.0 / 16.0;
      const auto ca = barrier_certificate(sa, HardyParams::make(3, 3.0 / 16.0), 4.0 / 3.0, 200);
      BarrierSpec sb;
      sb.log_case = true;
      sb.b = 9.0;
      sb.radius = 1.0 / 16.0;
      const auto cb = barrier_certificate(sb, HardyParams::make(3, 0.25), 4.0 / 3.0, 200);
      c.passed = ca.min_scaled >= -1e-9 && cb.min_scaled >= -1e-9;
      c.detail = fmt("power barrier amplitude %g (min scaled %.2e), log barrier amplitude %g "
                     "(min scaled %.2e), floor -1e-9",
                     ca.amplitude, ca.min_scaled, cb.amplitude, cb.min_scaled);
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("unexpected error: ") + e.what();
    }
    c.seconds = sw.seconds();
    rep.checks.push_back(std::move(c));
  }

  // 11. capacity threshold and removability classification
  {
    Stopwatch sw;
    CheckResult c;
    c.name = "capacity-threshold";
    try {
      double worst = 0.0;
      sweep_grid([&](int n, double mu) {
        worst = std::max(worst, threshold_consistency(HardyParams::make(n, mu)));
      });
      const auto below = classify_removability(hp, qc - 1e-6);
      const auto at = classify_removability(hp, qc);
      const HardyParams hp3 = HardyParams::make(3, 0.25);
      const auto eps_case = classify_removability(hp3, hp3.alpha + 1.0);
      const bool flip = below.regime == Regime::Subcritical && !below.point_removable &&
                        at.regime != Regime::Subcritical && at.point_removable;
      const bool eps_ok = eps_case.regime == Regime::SupercriticalEpsilonCase &&
                          eps_case.eps_hi && *eps_case.eps_hi > 0.0 && eps_case.point_removable;
      c.passed = worst <= cfg.tol.capacity_eps && flip && eps_ok;
      c.detail = fmt("max threshold defect %.2e (<= %.0e), subcritical/removable flip at q_crit: "
                     "%s, eps window (0, %.4f) certifying: %s",
                     worst, cfg.tol.capacity_eps, flip ? "yes" : "NO",
                     eps_case.eps_hi ? *eps_case.eps_hi : -1.0, eps_ok ? "yes" : "NO");
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("unexpected error: ") + e.what();
    }
    c.seconds = sw.seconds();
    rep.checks.push_back(std::move(c));
  }

  // 12. Rayleigh-quotient positivity
  {
    Stopwatch sw;
    CheckResult c;
    c.name = "rayleigh-positivity";
    try {
      const AxiGrid g = AxiGrid::make(cfg.r_min, 65, 97, cfg.n);
      double vals[3];
      const double mus[3] = {0.01, 0.1, 0.25};
      bool pos = true;
      for (int t = 0; t < 3; ++t) {
        vals[t] = rayleigh_lambda(g, HardyParams::make(cfg.n, mus[t]), 8);
        pos = pos && vals[t] > 0.0;
      }
      c.passed = pos && vals[0] > vals[2];
      c.detail = fmt("estimates %.4f / %.4f / %.4f at mu = 0.01 / 0.1 / 0.25 (positive, "
                     "decreasing in mu)",
                     vals[0], vals[1], vals[2]);
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("unexpected error: ") + e.what();
    }
    c.seconds = sw.seconds();
    rep.checks.push_back(std::move(c));
  }

  if (artifacts) {
    std::ofstream out(outdir + "/report.json");
    out << report_json(cfg, rep) << "\n";
  }
  return rep;
}

std::string report_json(const RunConfig& cfg, const Report& report) {
  nlohmann::json j;
  j["config"] = {{"n", cfg.n},
                 {"mu", cfg.mu},
                 {"q", cfg.q},
                 {"m_hemisphere", cfg.m_hemisphere},
                 {"m_2d", cfg.m_2d},
                 {"jr", cfg.jr},
                 {"r_min", cfg.r_min},
                 {"k_ladder", cfg.k_ladder},
                 {"strong_ladder", cfg.strong_ladder},
                 {"seed", cfg.seed}};
  j["checks"] = nlohmann::json::array();
  for (const auto& c : report.checks) {
    j["checks"].push_back(
        {{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"seconds", c.seconds}});
  }
  j["all_passed"] = report.all_passed();
  return j.dump(2);
}

}  // namespace hardylab
