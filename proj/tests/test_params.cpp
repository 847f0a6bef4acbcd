#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <random>

#include "hardylab/params.hpp"

using namespace hardylab;

namespace {

// exact rational arithmetic for the ell(q_crit) = kappa identity
struct Frac {
  long long num = 0, den = 1;
  Frac(long long n = 0, long long d = 1) : num(n), den(d) { reduce(); }
  void reduce() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long long g = std::gcd(std::llabs(num), den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  friend Frac operator+(Frac a, Frac b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Frac operator-(Frac a, Frac b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
  friend Frac operator*(Frac a, Frac b) { return {a.num * b.num, a.den * b.den}; }
  friend Frac operator/(Frac a, Frac b) { return {a.num * b.den, a.den * b.num}; }
  friend bool operator==(Frac a, Frac b) { return a.num == b.num && a.den == b.den; }
};

}  // namespace

TEST_CASE("alpha closed form") {
  CHECK(alpha_of_mu(0.25) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(alpha_of_mu(3.0 / 16.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(alpha_of_mu(0.21) == doctest::Approx(0.7).epsilon(1e-13));
  CHECK_THROWS_AS(alpha_of_mu(0.0), domain_error);
  CHECK_THROWS_AS(alpha_of_mu(0.26), domain_error);
  CHECK_THROWS_AS(alpha_of_mu(-1.0), domain_error);
}

TEST_CASE("alpha is the algebraic inverse of mu = a(1-a), strictly decreasing") {
  double prev = 2.0;
  for (int k = 1; k <= 400; ++k) {
    const double mu = 0.25 * k / 400.0;
    const double a = alpha_of_mu(mu);
    CHECK(a * (1.0 - a) == doctest::Approx(mu).epsilon(1e-14));
    CHECK(a < prev);
    prev = a;
  }
}

TEST_CASE("critical exponent") {
  CHECK(q_crit(3, 0.5) == doctest::Approx(1.4).epsilon(1e-15));
  CHECK(q_crit(3, 0.7) == doctest::Approx(37.0 / 27.0).epsilon(1e-15));
  // alpha -> 1 recovers the potential-free critical exponent (N+1)/N
  for (int n = 3; n <= 6; ++n) {
    CHECK(q_crit(n, 1.0 - 1e-13) ==
          doctest::Approx((n + 1.0) / n).epsilon(1e-10));
  }
  // strictly decreasing in alpha
  double prev = 10.0;
  for (double a = 0.5; a < 1.0; a += 0.01) {
    const double qc = q_crit(4, a);
    CHECK(qc < prev);
    prev = qc;
  }
  CHECK_THROWS_AS(q_crit(2, 0.5), domain_error);
  CHECK_THROWS_AS(q_crit(3, 1.0), domain_error);
}

TEST_CASE("exponent pack at N=3, mu=1/4, q=4/3") {
  const auto hp = HardyParams::make(3, 0.25);
  const auto pk = exponent_pack(hp, 4.0 / 3.0);
  CHECK(pk.ell == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(pk.kappa == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(pk.sing_exp == doctest::Approx(2.0).epsilon(1e-14));
  REQUIRE(pk.gamma1.has_value());
  // (1.25 * 2^(4/3))^3, checked against a 50-digit evaluation
  CHECK(*pk.gamma1 == doctest::Approx(31.25).epsilon(1e-12));
}

TEST_CASE("exponent pack at N=3, mu=1/4, q=1.2 (frozen high-precision values)") {
  const auto hp = HardyParams::make(3, 0.25);
  const auto pk = exponent_pack(hp, 1.2);
  CHECK(pk.ell == doctest::Approx(12.0).epsilon(1e-13));
  REQUIRE(pk.gamma1.has_value());
  CHECK(*pk.gamma1 == doctest::Approx(11533007.8125).epsilon(1e-11));
  REQUIRE(pk.alpha0.has_value());
  CHECK(*pk.alpha0 == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(*pk.mu0 == doctest::Approx(0.1875).epsilon(1e-15));
  REQUIRE(pk.gamma2.has_value());
  CHECK(*pk.gamma2 == doctest::Approx(5.3583676268861454e-06).epsilon(1e-12));
}

TEST_CASE("exponent pack at the critical point") {
  const auto hp = HardyParams::make(3, 0.25);
  const auto pk = exponent_pack(hp, 1.4);
  CHECK(std::fabs(pk.ell - pk.kappa) <= 1e-12);
  CHECK(!pk.gamma1.has_value());
  CHECK(!pk.gamma2.has_value());
  CHECK(!pk.subcritical());
  CHECK_THROWS_AS(require_subcritical(pk, "test"), supercritical_error);
  CHECK_THROWS_AS(exponent_pack(hp, 1.0), domain_error);
  CHECK_THROWS_AS(exponent_pack(hp, 2.0), domain_error);
}

TEST_CASE("ell(q_crit) = kappa on the sweep grid") {
  for (int n = 3; n <= 6; ++n) {
    for (int k = 0; k < 7; ++k) {
      const double mu = 0.01 + 0.04 * k;
      const auto hp = HardyParams::make(n, mu);
      const double qc = q_crit(n, hp.alpha);
      const double ell = (2.0 - qc) / (qc - 1.0) * (qc / (qc - 1.0) - n);
      CHECK(std::fabs(ell - hp.alpha * (n + hp.alpha - 2.0)) <= 1e-12);
    }
  }
}

TEST_CASE("ell(q_crit) = kappa in exact rational arithmetic") {
  // rational alphas 1/2, 3/4, 7/10, 9/10 (mu = 1/4, 3/16, 21/100, 9/100)
  for (const Frac a : {Frac{1, 2}, Frac{3, 4}, Frac{7, 10}, Frac{9, 10}}) {
    for (long long n = 3; n <= 6; ++n) {
      const Frac qc = (Frac(n) + a) / (Frac(n) + a - Frac(1));
      const Frac ell = (Frac(2) - qc) / (qc - Frac(1)) * (qc / (qc - Frac(1)) - Frac(n));
      const Frac kappa = a * (Frac(n) + a - Frac(2));
      CHECK(ell == kappa);
    }
  }
}

TEST_CASE("gamma1 vanishes monotonically toward the critical exponent") {
  const auto hp = HardyParams::make(3, 0.25);
  const double qc = q_crit(3, hp.alpha);
  double prev = 1e300;
  for (double step : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    const auto pk = exponent_pack(hp, qc - step);
    REQUIRE(pk.gamma1.has_value());
    CHECK(*pk.gamma1 < prev);
    prev = *pk.gamma1;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("gamma2 <= gamma1 whenever both exist") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mu_d(0.005, 0.25), t_d(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 4);
    const auto hp = HardyParams::make(n, mu_d(rng));
    const double qc = q_crit(n, hp.alpha);
    const double q = 1.0 + (qc - 1.0) * (0.05 + 0.9 * t_d(rng));
    const auto pk = exponent_pack(hp, q);
    REQUIRE(pk.gamma1.has_value());
    REQUIRE(pk.gamma2.has_value());
    CHECK(*pk.gamma2 <= *pk.gamma1);
    CHECK(*pk.gamma2 > 0.0);
  }
}

TEST_CASE("hemisphere eigenfunction profile") {
  CHECK(phi_mu(0.0, 0.5) == 1.0);
  CHECK(std::fabs(phi_mu(std::numbers::pi / 2, 0.5)) <= 1e-8);
  CHECK(phi_mu(std::numbers::pi / 3, 0.5) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
}

TEST_CASE("gradient identity of the mu=0 eigenfunction") {
  CHECK(grad_identity_gap(0.0) == 0.0);
  CHECK(std::fabs(grad_identity_gap(std::numbers::pi / 4)) <= 1e-15);
  CHECK(std::fabs(grad_identity_gap(1.2)) <= 1e-15);
  std::mt19937_64 rng(20260810ULL);
  std::uniform_real_distribution<double> dist(0.0, std::numbers::pi / 2);
  for (int i = 0; i < 10000; ++i) {
    CHECK(std::fabs(grad_identity_gap(dist(rng))) <= 1e-12);
  }
}

TEST_CASE("boundary weight") {
  const auto hp1 = HardyParams::make(3, 3.0 / 16.0);
  CHECK(weight_W(0.01, hp1, 2.0) == doctest::Approx(std::pow(0.01, 0.25)).epsilon(1e-14));
  const auto hp2 = HardyParams::make(3, 0.25);
  CHECK(weight_W(std::exp(-2.0), hp2, 2.0) ==
        doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(weight_W(1.0, hp2, 2.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(weight_W(0.0, hp2, 2.0), domain_error);
  CHECK_THROWS_AS(weight_W(-0.5, hp2, 2.0), domain_error);
  CHECK_THROWS_AS(weight_W(3.0, hp2, 2.0), domain_error);
}
