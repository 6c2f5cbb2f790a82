#include <cmath>
#include <random>

#include "doctest.h"
#include "frozen_oracles.hpp"
#include "lpq/interval.hpp"

using namespace lpq;

TEST_CASE("interval: closed cases") {
  IntervalSpec a = admissible_interval(0, 0, 0, 0, 1);
  CHECK(a.kind == IntervalSpec::Kind::AllP);
  CHECK(a.str() == "]1, inf[");
  IntervalSpec b = admissible_interval(0, 1, 1, 0, 0.5);
  CHECK(b.kind == IntervalSpec::Kind::Closed);
  CHECK(b.lo == 1.2);
  CHECK(b.hi == 6.0);
  CHECK(b.str() == "[1.2, 6]");
  IntervalSpec c = admissible_interval(0, 1, 0, 0, 1);
  CHECK(c.kind == IntervalSpec::Kind::LeftClosed);
  CHECK(c.lo == 1.25);
  CHECK(c.str() == "[1.25, inf[");
  IntervalSpec d = admissible_interval(0, 0, 1, 0, 1);
  CHECK(d.kind == IntervalSpec::Kind::RightClosed);
  CHECK(d.hi == 5.0);
  CHECK(d.str() == "]1, 5]");
}

TEST_CASE("interval: rejects inadmissible constants") {
  CHECK_THROWS_AS(admissible_interval(0, 0, 0, 1, 1), HypothesisViolation);
  CHECK_THROWS_AS(admissible_interval(0, 3, 3, 0, 1), HypothesisViolation);
  CHECK_THROWS_AS(admissible_interval(-1, 0, 0, 0, 1), std::invalid_argument);
}

TEST_CASE("interval: endpoints against frozen bisection oracle") {
  for (int i = 0; i < 3; ++i) {
    const double* t = oracle::kIntervalTuples + 5 * i;
    IntervalSpec s = admissible_interval(t[0], t[1], t[2], t[3], t[4]);
    CHECK(s.lo == doctest::Approx(oracle::kIntervalLo[i]).epsilon(1e-12));
    CHECK(s.hi == doctest::Approx(oracle::kIntervalHi[i]).epsilon(1e-12));
  }
}

TEST_CASE("interval: PSD sweep agrees on random tuples") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto grid = default_p_grid(1.001, 20.0, 1e-3);
  int tested = 0;
  while (tested < 20) {
    double kA = U(rng), kB = U(rng), kC = U(rng), kW = 0.5 * U(rng), g = 0.2 + U(rng);
    if (g * kW >= 1 || K_value(kB, kC, kW, g) <= 0) continue;
    ++tested;
    IntervalSpec s = admissible_interval(kA, kB, kC, kW, g);
    auto adm = psd_sweep_Mgamma(kA, kB, kC, kW, g, grid);
    CHECK(sweep_agrees(s, grid, adm, 1e-3));
  }
}

TEST_CASE("interval: p = 2 always admissible when K >= 0") {
  CHECK(mgamma_admissible(0.7, 0.3, 0.9, 0.1, 0.8, 2.0));
  CHECK(M_gamma(0.7, 0.3, 0.9, 0.1, 0.8, 2.0).row(1).isZero());
}

TEST_CASE("gamma_p: closed values and frozen oracle") {
  CHECK(gamma_p(0, 1, 1, 0, 2) == doctest::Approx(1.0));  // (kW + (kB+kC)^2/4)^-1
  CHECK(gamma_p(0, 1, 1, 0, 3) == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
  for (int i = 0; i < 4; ++i) {
    const double* c = oracle::kGammaPCases + 5 * i;
    CHECK(gamma_p(c[0], c[1], c[2], c[3], c[4]) == doctest::Approx(oracle::kGammaP[i]).epsilon(1e-12));
  }
  // boundary of the range as p -> 3 for kA = 1/2
  CHECK(gamma_p(0.5, 1, 1, 0, 3 - 1e-6) < 1e-5);
  CHECK_THROWS(gamma_p(0.5, 1, 1, 0, 3.0));
}

TEST_CASE("gamma_p: E_gamma PSD exactly at the threshold") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    double kB = U(rng), kC = U(rng), kW = U(rng);
    for (double p : {1.5, 2.0, 3.0, 6.0}) {
      double g = gamma_p(0, kB, kC, kW, p);
      CHECK(psd_check_Egamma(0, kB, kC, kW, g, p));
      CHECK_FALSE(psd_check_Egamma(0, kB, kC, kW, g * (1 + 1e-6), p));
    }
  }
  double g2 = gamma_p(0, 0.4, 0.6, 0.2, 2);
  std::normal_distribution<double> N;
  for (int i = 0; i < 200; ++i) {
    double x = N(rng), y = N(rng), r = std::hypot(x, y);
    CHECK(Egamma_value(0, 0.4, 0.6, 0.2, g2, 2, x / r, y / r) >= -1e-12);
  }
}

TEST_CASE("growth exponents") {
  // constant phi recovers C/gamma
  CHECK(growth_exponent([](double) { return 3.0; }, 1.5) == doctest::Approx(2.0));
  CHECK(phi_b(0.0, 7.0) == 1.0);
  // the b = 2a case matches phi_a evaluated at gamma_p with kappa_B = kappa_C = kappa sqrt(d)
  double a = 0.2, kappa = 0.3, kW = 0.1, p = 3.0;
  int d = 2;
  double kk = kappa * std::sqrt(d);
  double gp = gamma_p(0, kk, kk, kW, p);
  double direct = phi_power(a, 2 * a, gp) / gp;
  CHECK(growth_exponent_b2a(a, kappa, kW, d, 0, p) == doctest::Approx(direct).epsilon(1e-12));
  // the prefactor vanishes like (1 - 2a)/e as a -> 1/2
  double prev = 1;
  for (double aa : {0.49, 0.499, 0.4999}) {
    double e = std::fabs(growth_prefactor(aa) / (1 - 2 * aa) * std::exp(1.0) - 1);
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("tau constants") {
  Tau t = tau_constants(0.7, 2.0, 0.5, 3.0, 0.0);
  CHECK(t.tau == doctest::Approx(2.0 * std::pow(9 * 0.49 / 4, 1.5)));
  CHECK(t.hat_tau == doctest::Approx(2.0 * std::pow(9 * 0.49 / 2, 1.5)));
  Tau u = tau_constants(0.5, 1.0, 0.0, 2.0, 0.0);
  CHECK(u.tau == doctest::Approx(0.25));
  CHECK(u.hat_tau == doctest::Approx(0.5));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    double kappa = 2 * U(rng), c = 1 + 2 * U(rng), beta = 2 * U(rng), p = 2 + 4 * U(rng), s = 4 * U(rng) - 2;
    Tau v = tau_constants(kappa, c, beta, p, s);
    double rhs = Hhat(kappa, c, beta) * std::pow(p, 2 * beta + 2) * (std::pow(std::fabs(s), 2 * beta + 2) + 1);
    CHECK(v.hat_tau <= rhs * (1 + 1e-12));
  }
}

TEST_CASE("moser sums against frozen high-precision sums") {
  int i = 0;
  for (double r : {3.0, 4.0, 5.0})
    for (double beta : {0.0, 0.5, 1.0, 2.0}) {
      CHECK(moser_sum_t(r, beta, 400) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(moser_sum_inv_p(r, 400) == doctest::Approx(r / 2).epsilon(1e-12));
      MoserSums m = moser_sums(r, beta);
      CHECK(m.A < 1);
      CHECK(m.L == doctest::Approx(oracle::kMoserL[i]).epsilon(1e-12));
      CHECK(moser_L_direct(r, beta, 200) == doctest::Approx(m.L).epsilon(1e-10));
      CHECK(m.B == doctest::Approx(oracle::kMoserB[i]).epsilon(1e-11));
      CHECK(moser_B_closed(r, beta) == doctest::Approx(m.B).epsilon(1e-11));
      ++i;
    }
}

TEST_CASE("kernel constants and bound shape") {
  CHECK(sobolev_constant(3) == doctest::Approx(oracle::kSobolev34[0]).epsilon(1e-13));
  CHECK(sobolev_constant(4) == doctest::Approx(oracle::kSobolev34[1]).epsilon(1e-13));
  ConstantsBundle b = kernel_constants(2, 0.0, 0.3, 1.0, 2.0);
  CHECK(b.r == 3);
  CHECK(b.rstar == 6);
  CHECK(b.C1 == doctest::Approx(4 * b.Hhat));
  double t = 0.3;
  CHECK(gaussian_bound_rhs(b, t, 0) == doctest::Approx(b.C0 * (1 + 1 / t) * std::exp(b.C1 * t)));
  // beta = 0: the exponent scales like dist^2 / t
  double l1 = std::log(gaussian_bound_rhs(b, t, 1.0)), l2 = std::log(gaussian_bound_rhs(b, t, 2.0));
  double p1 = std::log(std::pow(1 + 1 / t + std::pow(1.0 / t, 2.0), 1.0)),
         p2 = std::log(std::pow(1 + 1 / t + std::pow(2.0 / t, 2.0), 1.0));
  CHECK((l2 - p2) - (l1 - p1) == doctest::Approx(-b.C2 / t * 3.0));
  CHECK_THROWS(kernel_constants(2, 0, 0.3, 0.5, 1));
  CHECK_THROWS(gaussian_bound_rhs(b, 0.0, 1.0));
}
