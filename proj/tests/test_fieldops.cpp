#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hardylab/fieldops.hpp"

using namespace hardylab;

namespace {
const Window kWindow{0.02, 0.9, 0.1};

SolutionField power_field(const AxiGrid& g, const HardyParams& hp) {
  SolutionField f(g);
  for (int j = 0; j < g.jr(); ++j)
    for (int i = 0; i < g.m(); ++i) f.at(j, i) = std::pow(g.delta(j, i), hp.alpha);
  return f;
}
}  // namespace

TEST_CASE("half-space kernel values") {
  const auto hp = HardyParams::make(3, 0.25);
  CHECK(martin_halfspace(1.0, 0.0, hp) == 1.0);
  CHECK(martin_halfspace(0.1, 0.0, hp) == doctest::Approx(std::pow(0.1, -1.5)).epsilon(1e-14));
  // homogeneity of degree 2 - N - alpha
  for (double ell : {0.3, 2.0}) {
    for (double r : {0.2, 0.8}) {
      for (double phi : {0.0, 0.7, 1.4}) {
        CHECK(martin_halfspace(ell * r, phi, hp) ==
              doctest::Approx(std::pow(ell, 2.0 - hp.n - hp.alpha) * martin_halfspace(r, phi, hp))
                  .epsilon(1e-13));
      }
    }
  }
  CHECK_THROWS_AS(martin_halfspace(0.0, 0.3, hp), domain_error);
}

TEST_CASE("discrete operator annihilates the kernel at second order") {
  const auto hp = HardyParams::make(3, 0.25);
  double res_k[3], res_p[3];
  int jr = 65, m = 81;
  for (int lvl = 0; lvl < 3; ++lvl) {
    const AxiGrid g = AxiGrid::make(1e-3, jr, m, 3);
    const SolutionField K = martin_field(g, hp);
    res_k[lvl] = relative_residual_sup(lmu_apply(K, hp), K, kWindow);
    const SolutionField P = power_field(g, hp);
    res_p[lvl] = relative_residual_sup(lmu_apply(P, hp), P, kWindow);
    jr = 2 * (jr - 1) + 1;
    m = 2 * (m - 1) + 1;
  }
  CHECK(std::log2(res_k[0] / res_k[1]) >= 1.8);
  CHECK(std::log2(res_k[1] / res_k[2]) >= 1.8);
  CHECK(std::log2(res_p[0] / res_p[1]) >= 1.8);
  CHECK(std::log2(res_p[1] / res_p[2]) >= 1.8);
}

TEST_CASE("operator is linear and vanishes on zero") {
  const auto hp = HardyParams::make(4, 0.2);
  const AxiGrid g = AxiGrid::make(1e-2, 33, 41, 4);
  SolutionField z(g);
  const auto res0 = lmu_apply(z, hp);
  for (double v : res0.values) CHECK(v == 0.0);

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  SolutionField u(g), v(g), w(g);
  for (std::size_t idx = 0; idx < u.values.size(); ++idx) {
    u.values[idx] = d(rng);
    v.values[idx] = d(rng);
    w.values[idx] = 2.5 * u.values[idx] - 1.25 * v.values[idx];
  }
  const auto lu = lmu_apply(u, hp), lv = lmu_apply(v, hp), lw = lmu_apply(w, hp);
  for (std::size_t idx = 0; idx < u.values.size(); ++idx) {
    const double want = 2.5 * lu.values[idx] - 1.25 * lv.values[idx];
    CHECK(lw.values[idx] == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("linear solve recovers the kernel from its boundary data") {
  const auto hp = HardyParams::make(3, 0.25);
  const AxiGrid g = AxiGrid::make(1e-3, 97, 120, 3);
  std::vector<double> data(g.m());
  for (int i = 0; i < g.m(); ++i) data[i] = martin_halfspace(1.0, g.angular.phi[i], hp);
  const auto u = solve_linear_lmu(g, hp, nullptr, data);
  const auto K = martin_field(g, hp);
  double worst = 0.0;
  for (int j = 0; j < g.jr(); ++j) {
    for (int i = 0; i + 1 < g.m(); ++i) {
      if (!kWindow.contains(g, j, i)) continue;
      worst = std::max(worst, std::fabs(u.at(j, i) - K.at(j, i)) / K.at(j, i));
    }
  }
  CHECK(worst <= 5e-3);  // second-order recovery at this resolution
}

TEST_CASE("linear solve: zero data gives zero, and superposition holds") {
  const auto hp = HardyParams::make(3, 0.25);
  const AxiGrid g = AxiGrid::make(1e-2, 49, 60, 3);
  std::vector<double> zero(g.m(), 0.0);
  const auto u0 = solve_linear_lmu(g, hp, nullptr, zero);
  for (double v : u0.values) CHECK(std::fabs(v) <= 1e-12);

  SolutionField s1(g), s2(g);
  for (int j = 0; j < g.jr(); ++j) {
    for (int i = 0; i < g.m(); ++i) {
      const double r = g.r[j], phi = g.angular.phi[i];
      s1.at(j, i) = std::exp(-30.0 * (r - 0.5) * (r - 0.5)) * std::cos(phi);
      s2.at(j, i) = r * std::sin(phi) * std::cos(phi);
    }
  }
  const auto u1 = solve_linear_lmu(g, hp, &s1, zero);
  const auto u2 = solve_linear_lmu(g, hp, &s2, zero);
  SolutionField sum(g);
  for (std::size_t idx = 0; idx < sum.values.size(); ++idx) {
    sum.values[idx] = s1.values[idx] + s2.values[idx];
  }
  const auto u12 = solve_linear_lmu(g, hp, &sum, zero);
  for (std::size_t idx = 0; idx < u12.values.size(); ++idx) {
    CHECK(u12.values[idx] ==
          doctest::Approx(u1.values[idx] + u2.values[idx]).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("discrete maximum principle at the default grading") {
  const auto hp = HardyParams::make(3, 0.25);
  const AxiGrid g = AxiGrid::make(1e-3, 65, 80, 3);
  // nonnegative interior bump source, zero data
  SolutionField src(g);
  for (int j = 0; j < g.jr(); ++j) {
    for (int i = 0; i < g.m(); ++i) {
      const double r = g.r[j], c = std::cos(g.angular.phi[i]);
      src.at(j, i) = std::max(0.0, 1.0 - 40.0 * ((r - 0.4) * (r - 0.4) + (c - 0.5) * (c - 0.5)));
    }
  }
  std::vector<double> zero(g.m(), 0.0);
  const auto u = solve_linear_lmu(g, hp, &src, zero);
  for (double v : u.values) CHECK(v >= -1e-10);
  // kernel data, zero source
  std::vector<double> data(g.m());
  for (int i = 0; i < g.m(); ++i) data[i] = martin_halfspace(1.0, g.angular.phi[i], hp);
  const auto u2 = solve_linear_lmu(g, hp, nullptr, data);
  for (double v : u2.values) CHECK(v >= -1e-10);
}

TEST_CASE("Rayleigh estimate: positive, monotone in mu, finite surrogate") {
  const AxiGrid g = AxiGrid::make(1e-3, 65, 97, 3);
  const double l_small = rayleigh_lambda(g, HardyParams::make(3, 0.01), 8);
  const double l_mid = rayleigh_lambda(g, HardyParams::make(3, 0.1), 8);
  const double l_big = rayleigh_lambda(g, HardyParams::make(3, 0.25), 8);
  CHECK(l_small > 0.0);
  CHECK(l_mid > 0.0);
  CHECK(l_big > 0.0);
  CHECK(l_small > l_big);
  // single-trial surrogate (the cos^alpha bump itself)
  const double l_one = rayleigh_lambda(g, HardyParams::make(3, 0.25), 1);
  CHECK(std::isfinite(l_one));
  CHECK(l_one > 0.0);
  CHECK_THROWS_AS(rayleigh_lambda(g, HardyParams::make(3, 0.25), 0), domain_error);
}

TEST_CASE("weak tails of the kernel and of its gradient") {
  const auto hp = HardyParams::make(3, 0.25);
  const AxiGrid g = AxiGrid::make(1e-3, 129, 160, 3);
  SolutionField K = martin_field(g, hp);
  const auto repK = weak_tail(K, 0.0);
  CHECK(repK.p_hat == doctest::Approx(3.0 / 1.5).epsilon(0.10));
  CHECK(repK.lambda_lo < repK.lambda_hi);
  CHECK(repK.norm_estimate > 0.0);

  K.compute_gradient();
  SolutionField gm(g);
  for (int j = 0; j < g.jr(); ++j)
    for (int i = 0; i < g.m(); ++i) gm.at(j, i) = K.gradient_magnitude(j, i);
  const auto repG = weak_tail(gm, hp.alpha);
  CHECK(repG.p_hat == doctest::Approx(3.5 / 2.5).epsilon(0.10));
}

TEST_CASE("weak tail of the interior solve with a near-boundary source") {
  // the boundary regime of the membership exponent (N+gamma)/(N+alpha-2) is
  // produced by mass concentrated near the boundary plane
  const auto hp = HardyParams::make(3, 0.25);
  const AxiGrid g = AxiGrid::make(1e-3, 129, 160, 3);
  SolutionField src(g);
  for (int j = 0; j < g.jr(); ++j) {
    for (int i = 0; i < g.m(); ++i) {
      const double x = g.r[j] * std::sin(g.angular.phi[i]);   // in-plane distance
      const double d = g.delta(j, i);                          // height
      const double r2 = (x - 0.3) * (x - 0.3) + (d - 0.015) * (d - 0.015);
      src.at(j, i) = std::exp(-r2 / (2.0 * 0.005 * 0.005));
    }
  }
  std::vector<double> zero(g.m(), 0.0);
  const auto green = solve_linear_lmu(g, hp, &src, zero);
  SolutionField pos(g);
  for (std::size_t idx = 0; idx < pos.values.size(); ++idx) {
    pos.values[idx] = std::max(0.0, green.values[idx]);
  }
  const auto rep = weak_tail(pos, 0.0);
  CHECK(rep.p_hat == doctest::Approx(3.0 / 1.5).epsilon(0.10));
}

TEST_CASE("degenerate tails are reported as fit errors") {
  const AxiGrid g = AxiGrid::make(1e-2, 33, 40, 3);
  SolutionField c(g);
  for (auto& v : c.values) v = 3.14;
  CHECK_THROWS_AS(weak_tail(c, 0.0), fit_error);
  SolutionField neg(g);
  neg.values[5] = -1.0;
  CHECK_THROWS_AS(weak_tail(neg, 0.0), domain_error);
}

TEST_CASE("gradient components match closed forms on the kernel") {
  const auto hp = HardyParams::make(3, 0.25);
  const AxiGrid g = AxiGrid::make(1e-2, 129, 160, 3);
  SolutionField K = martin_field(g, hp);
  K.compute_gradient();
  // d/dr [cos^a r^(2-N-a)] = (2-N-a) cos^a r^(1-N-a)
  const int j = 64, i = 40;
  const double r = g.r[j], phi = g.angular.phi[i];
  const double a = hp.alpha;
  const double want_r = (2.0 - hp.n - a) * std::pow(std::cos(phi), a) * std::pow(r, 1.0 - hp.n - a);
  const double want_p = -a * std::pow(std::cos(phi), a - 1.0) * std::sin(phi) *
                        std::pow(r, 2.0 - hp.n - a) / r;
  // centered differences at this spacing carry ~5e-4 relative truncation
  CHECK(K.grad_r[g.index(j, i)] == doctest::Approx(want_r).epsilon(2e-3));
  CHECK(K.grad_phi_over_r[g.index(j, i)] == doctest::Approx(want_p).epsilon(2e-3));
}
