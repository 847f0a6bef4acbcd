// Command-line front end: closed-form constants, hemisphere profile solves,
// kernel diagnostics, nonlinear boundary-value runs, capacity classification,
// and the full verification suite.
#include <CLI11.hpp>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "hardylab/bvp.hpp"
#include "hardylab/capacity.hpp"
#include "hardylab/fieldops.hpp"
#include "hardylab/hemisphere.hpp"
#include "hardylab/io.hpp"
#include "hardylab/suite.hpp"

using nlohmann::json;
using namespace hardylab;

namespace {

json pack_json(const ExponentPack& pk, double alpha) {
  json j;
  j["alpha"] = alpha;
  j["q_crit"] = pk.q_crit;
  j["ell"] = pk.ell;
  j["kappa"] = pk.kappa;
  j["sing_exp"] = pk.sing_exp;
  if (pk.gamma1) j["gamma1"] = *pk.gamma1;
  if (pk.alpha0) j["alpha0"] = *pk.alpha0;
  if (pk.mu0) j["mu0"] = *pk.mu0;
  if (pk.gamma2) j["gamma2"] = *pk.gamma2;
  return j;
}

void emit(const json& j) { std::printf("%s\n", j.dump(2).c_str()); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for -Lap u - mu/delta^2 u + |grad u|^q = 0 on the half ball"};
  app.set_config("--config", "", "flat key=value configuration file; flags override");
  app.require_subcommand(1);

  int n = 3;
  double mu = 0.25, q = 1.2;
  std::string out;
  bool as_json = false;
  app.add_option("--n", n, "dimension N >= 3")->capture_default_str();
  app.add_option("--mu", mu, "Hardy coefficient in (0, 1/4]")->capture_default_str();
  app.add_option("--q", q, "absorption exponent in (1, 2)")->capture_default_str();
  app.add_option("--out", out, "output directory (or HARDYLAB_OUTDIR)");
  app.add_flag("--json", as_json, "machine-readable summaries");

  // constants
  auto* c_cmd = app.add_subcommand("constants", "closed-form exponents and amplitudes");

  // omega solve
  auto* omega = app.add_subcommand("omega", "hemisphere profile");
  auto* osolve = omega->add_subcommand("solve", "solve the profile problem");
  int mesh_m = 400;
  osolve->add_option("--mesh", mesh_m, "angular nodes")->capture_default_str();

  // kernel check / tails / eig
  auto* kernel = app.add_subcommand("kernel", "half-space kernel diagnostics");
  auto* kcheck = kernel->add_subcommand("check", "harmonicity residual orders");
  auto* ktails = kernel->add_subcommand("tails", "weak-tail exponents");
  double tail_gamma = 0.0;
  ktails->add_option("--gamma", tail_gamma, "distribution weight exponent")->capture_default_str();
  bool tails_gradient = false;
  ktails->add_flag("--gradient", tails_gradient, "use |grad K| instead of K");
  auto* keig = kernel->add_subcommand("eig", "Rayleigh-quotient estimate");
  int trials = 8;
  keig->add_option("--trials", trials, "trial profile count")->capture_default_str();

  // bvp solve / strong-limit / barrier
  auto* bvp = app.add_subcommand("bvp", "nonlinear boundary-value runs");
  auto* bsolve = bvp->add_subcommand("solve", "boundary mass k at the origin");
  double k_mass = 1.0;
  bsolve->add_option("--k", k_mass, "boundary mass")->capture_default_str();
  auto* bstrong = bvp->add_subcommand("strong-limit", "mass ladder toward the strong limit");
  std::vector<double> ladder = {1e2, 1e5, 1e8, 1e11};
  bstrong->add_option("--ladder", ladder, "increasing masses (>= 4, >= 3 decades)")
      ->delimiter(',')
      ->capture_default_str();
  auto* bbarrier = bvp->add_subcommand("barrier", "supersolution barrier certificate");
  double bar_gamma = 0.6, bar_b = 9.0, bar_r = 1.0 / 16.0;
  bbarrier->add_option("--gamma", bar_gamma, "boundary exponent")->capture_default_str();
  bbarrier->add_option("--b", bar_b, "sphere-blowup exponent")->capture_default_str();
  bbarrier->add_option("--radius", bar_r, "ball radius (<= 1/16)")->capture_default_str();
  int bar_side = 200;
  bbarrier->add_option("--side", bar_side, "sample grid side")->capture_default_str();

  // capacity classify / sweep
  auto* cap = app.add_subcommand("capacity", "removability classification");
  auto* cclassify = cap->add_subcommand("classify", "verdict for one q");
  auto* csweep = cap->add_subcommand("sweep", "CSV over a q grid");
  int sweep_count = 99;
  csweep->add_option("--count", sweep_count, "grid points in (1, 2)")->capture_default_str();

  // suite
  auto* suite = app.add_subcommand("suite", "full verification battery");
  int m_hemi = 400, m2d = 160, jr = 129;
  double r_min = 1e-3;
  std::uint64_t seed = 20260810ULL;
  suite->add_option("--mesh", m_hemi, "hemisphere angular nodes")->capture_default_str();
  suite->add_option("--mesh2d", m2d, "half-ball angular nodes")->capture_default_str();
  suite->add_option("--jr", jr, "radial nodes")->capture_default_str();
  suite->add_option("--rmin", r_min, "inner radius in (0, 0.1]")->capture_default_str();
  suite->add_option("--seed", seed, "sampling seed")->capture_default_str();
  std::vector<double> kladder = {0.5, 1, 2, 4};
  suite->add_option("--k-ladder", kladder, "masses for the monotonicity check")->delimiter(',');
  std::vector<double> sladder = {1e2, 1e5, 1e8, 1e11};
  suite->add_option("--strong-ladder", sladder, "masses for the strong limit")->delimiter(',');

  // shared solver meshes for omega/bvp/kernel commands
  int g_jr = 129, g_m = 160;
  double g_rmin = 1e-3;
  for (auto* sc : {osolve, kcheck, ktails, keig, bsolve, bstrong}) {
    sc->add_option("--jr", g_jr, "radial nodes");
    sc->add_option("--rmin", g_rmin, "inner radius");
    sc->add_option("--mesh2d", g_m, "angular nodes");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const HardyParams hp = HardyParams::make(n, mu);
    const std::string outdir = resolve_outdir(out);

    if (c_cmd->parsed()) {
      emit(pack_json(exponent_pack(hp, q), hp.alpha));
      return 0;
    }

    if (osolve->parsed()) {
      const auto mesh = AngularMesh::cosine(mesh_m);
      const auto sol = solve_omega(hp, q, mesh);
      const auto res = ode_residual(sol);
      std::vector<std::vector<double>> rows;
      for (int i = 0; i < mesh.size(); ++i) {
        rows.push_back({mesh.phi[i], sol.omega[i], sol.v[i],
                        (i >= 1 && i + 1 < mesh.size()) ? res[i - 1] : 0.0});
      }
      write_csv(outdir + "/omega.csv", {"phi", "omega", "v", "residual"}, rows);
      json j;
      j["residual_sup"] = sol.residual_sup;
      j["boundary_exponent_fit"] = boundary_exponent_fit(sol);
      j["alpha"] = hp.alpha;
      double viol = -1e300;
      for (int i = 0; i < mesh.size(); ++i) {
        viol = std::max(viol, sol.omega[i] - *sol.exponents.gamma1 * phi_mu(mesh.phi[i], hp.alpha));
      }
      j["gamma1_bound_slack"] = viol;
      j["csv"] = outdir + "/omega.csv";
      emit(j);
      return 0;
    }

    if (kcheck->parsed()) {
      const Window win{0.02, 0.9, 0.1};
      json j;
      for (const char* what : {"martin", "power"}) {
        double res[3];
        int jrl = 65, ml = 81;
        for (int lvl = 0; lvl < 3; ++lvl) {
          const AxiGrid g = AxiGrid::make(g_rmin, jrl, ml, n);
          SolutionField f(g);
          for (int jj = 0; jj < g.jr(); ++jj)
            for (int ii = 0; ii < g.m(); ++ii) {
              f.at(jj, ii) = std::string(what) == "martin"
                                 ? martin_halfspace(g.r[jj], g.angular.phi[ii], hp)
                                 : std::pow(g.delta(jj, ii), hp.alpha);
            }
          res[lvl] = relative_residual_sup(lmu_apply(f, hp), f, win);
          jrl = 2 * (jrl - 1) + 1;
          ml = 2 * (ml - 1) + 1;
        }
        j[what] = {{"residuals", {res[0], res[1], res[2]}},
                   {"orders",
                    {std::log2(res[0] / res[1]), std::log2(res[1] / res[2])}}};
      }
      emit(j);
      return 0;
    }

    if (ktails->parsed()) {
      const AxiGrid g = AxiGrid::make(g_rmin, g_jr, g_m, n);
      SolutionField K = martin_field(g, hp);
      WeakNormReport r;
      if (tails_gradient) {
        K.compute_gradient();
        SolutionField gm(g);
        for (int jj = 0; jj < g.jr(); ++jj)
          for (int ii = 0; ii < g.m(); ++ii) gm.at(jj, ii) = K.gradient_magnitude(jj, ii);
        r = weak_tail(gm, tail_gamma);
      } else {
        r = weak_tail(K, tail_gamma);
      }
      emit(json{{"gamma", r.gamma},
                {"p_hat", r.p_hat},
                {"lambda_lo", r.lambda_lo},
                {"lambda_hi", r.lambda_hi},
                {"norm_estimate", r.norm_estimate}});
      return 0;
    }

    if (keig->parsed()) {
      const AxiGrid g = AxiGrid::make(g_rmin, g_jr, g_m, n);
      emit(json{{"lambda_estimate", rayleigh_lambda(g, hp, trials)},
                {"trials", trials},
                {"positive", rayleigh_lambda(g, hp, trials) > 0.0}});
      return 0;
    }

    if (bsolve->parsed()) {
      const AxiGrid g = AxiGrid::make(g_rmin, g_jr, g_m, n);
      const auto run = solve_weak(k_mass, hp, q, g);
      write_field_csv(outdir + "/field.csv", run.field);
      const auto tr = ratio_trace(run);
      std::vector<std::vector<double>> rows;
      for (std::size_t jj = 0; jj < tr.r.size(); ++jj) rows.push_back({tr.r[jj], tr.ratio[jj]});
      write_csv(outdir + "/ratio_trace.csv", {"r", "ratio"}, rows);
      const auto ap = apriori_check(run.field, run.exponents);
      json j;
      j["k"] = k_mass;
      j["n"] = n;
      j["mu"] = mu;
      j["q"] = q;
      j["mesh"] = {{"jr", g_jr}, {"m", g_m}, {"r_min", g_rmin}};
      j["residual_sup"] = run.residual_sup;
      j["ratio_extrapolated"] = tr.extrapolated;
      j["apriori_sup_u"] = ap.sup_u;
      j["apriori_sup_grad"] = ap.sup_grad;
      j["csv"] = {outdir + "/field.csv", outdir + "/ratio_trace.csv"};
      emit(j);
      return 0;
    }

    if (bstrong->parsed()) {
      const AxiGrid g = AxiGrid::make(g_rmin, g_jr, g_m, n);
      const auto r = strong_limit(hp, q, g, ladder);
      std::vector<std::vector<double>> rows;
      for (int i = 0; i < g.m(); ++i) {
        std::vector<double> row = {g.angular.phi[i], r.omega[i]};
        for (const auto& p : r.profiles) row.push_back(p[i]);
        rows.push_back(std::move(row));
      }
      std::vector<std::string> hdr = {"phi", "omega"};
      for (double l : r.ell_used) hdr.push_back("rescaled_at_" + g17(l));
      write_csv(outdir + "/strong_profiles.csv", hdr, rows);
      json j;
      j["ladder"] = r.ladder;
      j["ell_used"] = r.ell_used;
      j["max_rel_error_interior"] = r.max_rel_error_interior;
      j["two_sided_c"] = r.apriori.two_sided_c;
      j["mesh"] = {{"jr", g_jr}, {"m", g_m}, {"r_min", g_rmin}};
      j["csv"] = outdir + "/strong_profiles.csv";
      emit(j);
      return 0;
    }

    if (bbarrier->parsed()) {
      BarrierSpec spec;
      spec.gamma = bar_gamma;
      spec.b = bar_b;
      spec.radius = bar_r;
      spec.log_case = mu >= 0.25;
      const auto cert = barrier_certificate(spec, hp, q, bar_side);
      emit(json{{"amplitude", cert.amplitude},
                {"min_residual", cert.min_residual},
                {"min_scaled", cert.min_scaled},
                {"grid_side", cert.grid_side},
                {"log_case", spec.log_case}});
      return 0;
    }

    if (cclassify->parsed()) {
      const auto v = classify_removability(hp, q);
      json j;
      j["n"] = n;
      j["mu"] = mu;
      j["q"] = q;
      j["regime"] = to_string(v.regime);
      j["point_removable"] = v.point_removable;
      j["conclusive"] = v.conclusive;
      if (v.regime != Regime::Subcritical) {
        j["s"] = v.s;
        j["p"] = v.p;
      }
      if (v.eps_lo) j["eps_window"] = {*v.eps_lo, *v.eps_hi};
      if (v.eps_cert_lo) j["eps_certifying"] = {*v.eps_cert_lo, *v.eps_cert_hi};
      emit(j);
      return 0;
    }

    if (csweep->parsed()) {
      std::vector<std::vector<double>> rows;
      for (int i = 1; i <= sweep_count; ++i) {
        const double qq = 1.0 + static_cast<double>(i) / (sweep_count + 1);
        const auto v = classify_removability(hp, qq);
        rows.push_back({qq, static_cast<double>(static_cast<int>(v.regime)), v.s, v.p, v.s * v.p,
                        v.point_removable ? 1.0 : 0.0});
      }
      const std::string path = outdir + "/capacity_sweep.csv";
      write_csv(path, {"q", "regime", "s", "p", "sp", "removable"}, rows);
      emit(json{{"csv", path}, {"rows", rows.size()}});
      return 0;
    }

    if (suite->parsed()) {
      RunConfig cfg;
      cfg.n = n;
      cfg.mu = mu;
      cfg.q = q;
      cfg.m_hemisphere = m_hemi;
      cfg.m_2d = m2d;
      cfg.jr = jr;
      cfg.r_min = r_min;
      cfg.k_ladder = kladder;
      cfg.strong_ladder = sladder;
      cfg.outdir = outdir;
      cfg.seed = seed;
      const Report rep = run_suite(cfg);
      if (as_json) {
        std::printf("%s\n", report_json(cfg, rep).c_str());
      } else {
        for (const auto& c : rep.checks) {
          std::printf("[%s] %-28s %s (%.2fs)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                      c.detail.c_str(), c.seconds);
        }
      }
      return rep.all_passed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
