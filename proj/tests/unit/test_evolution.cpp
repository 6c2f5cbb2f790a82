#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lpq/evolution.hpp"
#include "lpq/gallery.hpp"
#include "testing.hpp"

using namespace lpq;

namespace {
const double kPi = std::numbers::pi;

CVec sine_mode(const DiscreteForm& F) {
  CVec u(F.size());
  int n = F.grid.n[0];
  for (long i = 0; i < F.size(); ++i) u[i] = std::sin(kPi * (i + 1) / n);
  return u;
}

DiscreteForm heat1d(int n, double v0) {
  Scenario s = lpqt::scenario({.cells = n, .op = "q.11 = \"1\"\nv.11 = \"" + std::to_string(v0) + "\"\n"});
  return assemble(sample(s.sys, s.grid));
}
}  // namespace

TEST_CASE("sparse LU solves and transposed solves") {
  Scenario s = gallery_scenario("G3");
  s.grid = BoxDomain::cube(2, -2, 2, 12);
  DiscreteForm F = assemble(sample(s.sys, s.grid));
  SpMat A = F.S;
  for (long i = 0; i < A.rows(); ++i) A.coeffRef(i, i) += F.vol * 10;
  DirectSolver lu(A, amd_order(A));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  Eigen::VectorXd b(A.rows());
  for (long i = 0; i < b.size(); ++i) b[i] = N(rng);
  Eigen::VectorXd x = b, y = b;
  lu.solve(x);
  lu.solve_transpose(y);
  CHECK((A * x - b).norm() < 1e-12 * b.norm());
  CHECK((SpMat(A.transpose()) * y - b).norm() < 1e-12 * b.norm());
  CHECK_FALSE(lu.used_fallback());
}

TEST_CASE("implicit Euler on an eigenvector") {
  DiscreteForm F = heat1d(32, 1.0);
  double lam = 2.0 * 32 * 32 * (1 - std::cos(kPi / 32)) + 1.0;
  double dt = 1e-4, t = 0.05;
  Stepper st(F, Scheme::ImplicitEuler, dt);
  CVec u0 = sine_mode(F);
  CVec u = evolve(st, u0, t);
  double rel = (u - std::exp(-lam * t) * u0).norm() / (std::exp(-lam * t) * u0.norm());
  CHECK(rel <= dt * lam * lam * t / 2 + 1e-9);
  CHECK(evolve(st, CVec::Zero(F.size()), t).norm() == 0.0);
}

TEST_CASE("Crank-Nicolson decay rate of the first mode") {
  DiscreteForm F = heat1d(128, 2.0);
  Stepper st(F, Scheme::CrankNicolson, 1e-3);
  CVec u0 = sine_mode(F);
  double r1 = evolve(st, u0, 0.1).norm(), r2 = evolve(st, u0, 0.2).norm();
  double rate = std::log(r1 / r2) / 0.1;
  CHECK(rate == doctest::Approx(kPi * kPi + 2).epsilon(2e-3));
}

TEST_CASE("semigroup property and adjoint duality") {
  Scenario s = gallery_scenario("G5");
  s.grid = BoxDomain::cube(2, -2, 2, 12);
  SampledSystem ss = sample(s.sys, s.grid);
  DiscreteForm F = assemble(ss), Fa = assemble_adjoint(ss);
  Stepper st(F, Scheme::ImplicitEuler, 1e-3), sa(Fa, Scheme::ImplicitEuler, 1e-3);
  std::mt19937_64 rng(3);
  CVec f = smooth_random_field(s.grid, 2, 4, rng), g = smooth_random_field(s.grid, 2, 4, rng);
  RowMat X = to_columns(f), Y = to_columns(f);
  st.advance(X, 30);
  st.advance(X, 20);
  st.advance(Y, 50);
  CHECK((X - Y).norm() <= 1e-10 * Y.norm());
  CHECK(adjoint_duality_check(st, nullptr, 0.05, f, g) <= 1e-10);
  CHECK(adjoint_duality_check(st, &sa, 0.05, f, g) <= 1e-10);
  CHECK(adjoint_duality_check(st, nullptr, 0.0, f, g) <= 1e-14);
  CHECK(st.max_residual() < 1e-10);
}

TEST_CASE("decoupled scalar probe decays at rate v0") {
  Scenario s = lpqt::scenario({.d = 2, .cells = 16, .op = "q.11 = \"1\"\nq.22 = \"1\"\nv.11 = \"3\"\n"});
  DiscreteForm F = assemble(sample(s.sys, s.grid));
  Stepper st(F, Scheme::ImplicitEuler, 1e-3);
  ProbeConfig cfg;
  cfg.t_final = 0.1;
  cfg.samples = 6;
  cfg.checkpoints = 10;
  auto tr = contractivity_probe(st, {1.5, 2.0, 4.0}, cfg);
  REQUIRE(tr.size() == 3);
  for (const auto& g : tr) CHECK(g.measured() <= -3.0 + 0.05);
}

TEST_CASE("scheme names") {
  CHECK(parse_scheme("cn") == Scheme::CrankNicolson);
  CHECK(parse_scheme("implicit_euler") == Scheme::ImplicitEuler);
  CHECK(std::string(scheme_name(Scheme::CrankNicolson)) == "crank_nicolson");
  CHECK_THROWS(parse_scheme("rk4"));
}
