#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "frozen_oracles.hpp"
#include "lpq/form.hpp"
#include "lpq/gallery.hpp"
#include "lpq/hypotheses.hpp"
#include "testing.hpp"

using namespace lpq;

namespace {
const double kPi = std::numbers::pi;

DiscreteForm form(const Scenario& s) { return assemble(sample(s.sys, s.grid)); }

CVec random_vec(long n, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  CVec u(n);
  for (long i = 0; i < n; ++i) u[i] = {N(rng), N(rng)};
  return u;
}

double discrete_eig_1d(int n, double v0) {
  double h = 1.0 / n;
  return 2.0 / (h * h) * (1 - std::cos(kPi * h)) + v0;
}
}  // namespace

TEST_CASE("1D stiffness stencil") {
  Scenario s = lpqt::scenario({.cells = 8, .op = "q.11 = \"1\"\nv.11 = \"0\"\n"});
  DiscreteForm F = form(s);
  Eigen::MatrixXd S(F.S);
  double h = 1.0 / 8;
  CHECK(S.rows() == 7);
  for (int i = 0; i < 7; ++i) {
    CHECK(S(i, i) == doctest::Approx(2 / h));
    if (i + 1 < 7) CHECK(S(i, i + 1) == doctest::Approx(-1 / h));
    if (i + 1 < 7) CHECK(S(i + 1, i) == doctest::Approx(-1 / h));
  }
  CHECK(F.S.nonZeros() == 7 + 2 * 6);

  Scenario sv = lpqt::scenario({.cells = 8, .op = "q.11 = \"1\"\nv.11 = \"3\"\n"});
  Eigen::MatrixXd D = Eigen::MatrixXd(form(sv).S) - S;
  CHECK(D.isApprox(3 * h * Eigen::MatrixXd::Identity(7, 7)));
}

TEST_CASE("antisymmetric potential drops out of the Hermitian part") {
  Scenario s = lpqt::scenario({.cells = 4, .m = 2, .op = "q.11 = \"1\"\nv.11 = \"2\"\nv.22 = \"5\"\nv.12 = \"0.7\"\nv.21 = \"-0.7\"\n"});
  DiscreteForm F = form(s);
  Eigen::MatrixXd P(F.potential);
  Eigen::MatrixXd H = 0.5 * (P + P.transpose());
  double h = 0.25;
  for (int x = 0; x < 3; ++x) {
    CHECK(H(2 * x, 2 * x) == doctest::Approx(2 * h));
    CHECK(H(2 * x + 1, 2 * x + 1) == doctest::Approx(5 * h));
    CHECK(H(2 * x, 2 * x + 1) == 0);
  }
  CHECK(P(0, 1) == doctest::Approx(0.7 * h));
}

TEST_CASE("form value on eigenvectors and Hermitian forms") {
  Scenario s = lpqt::scenario({.cells = 16, .op = "q.11 = \"1\"\nv.11 = \"2\"\n"});
  DiscreteForm F = form(s);
  CVec u(F.size());
  for (long i = 0; i < F.size(); ++i) u[i] = std::sin(kPi * (i + 1) / 16.0);
  double lam = discrete_eig_1d(16, 2) * F.vol;
  CHECK(form_value(F, u, u).real() == doctest::Approx(lam * u.squaredNorm()).epsilon(1e-12));

  Scenario s2 = lpqt::scenario({.d = 2, .cells = 8, .m = 2,
                                .op = "q.11 = \"1\"\nq.22 = \"1 + x1\"\nv.11 = \"2\"\nv.22 = \"1\"\nv.12 = \"0.2\"\nv.21 = \"0.2\"\n"});
  DiscreteForm F2 = form(s2);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 5; ++k) {
    CVec w = random_vec(F2.size(), rng);
    CHECK(std::fabs(form_value(F2, w, w).imag()) < 1e-12 * std::abs(form_value(F2, w, w)));
  }
}

TEST_CASE("adjoint assembly is the exact transpose") {
  for (const char* id : {"G3", "G4", "G5"}) {
    Scenario s = gallery_scenario(id);
    s.grid = BoxDomain::cube(2, s.grid.lower[0], s.grid.upper[0], 10);
    SampledSystem ss = sample(s.sys, s.grid);
    DiscreteForm F = assemble(ss), Fa = assemble_adjoint(ss);
    SpMat T = SpMat(F.S.transpose());
    SpMat D = T - Fa.S;
    double mx = 0;
    for (long i = 0; i < D.outerSize(); ++i)
      for (SpMat::InnerIterator it(D, i); it; ++it) mx = std::max(mx, std::fabs(it.value()));
    CHECK_MESSAGE(mx == 0.0, id);
    std::mt19937_64 rng(2);
    CVec u = random_vec(F.size(), rng), v = random_vec(F.size(), rng);
    cplx a = form_value(F, u, v), b = std::conj(form_value(Fa, v, u));
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
  }
}

TEST_CASE("omega0 against the discrete eigenvalue") {
  Scenario s = lpqt::scenario({.cells = 64, .op = "q.11 = \"1\"\nv.11 = \"2\"\n"});
  Omega0Result r = omega0(form(s));
  CHECK(r.converged);
  CHECK(r.omega0 == doctest::Approx(-discrete_eig_1d(64, 2)).epsilon(1e-11));
  CHECK(std::fabs(r.omega0 + kPi * kPi + 2) < 0.03);

  Scenario c = lpqt::scenario({.d = 2, .lo = -1, .hi = 1, .cells = 12, .m = 2,
                               .op = "q.11 = \"1\"\nq.22 = \"1\"\nv.11 = \"3\"\nv.22 = \"3\"\n"});
  CHECK(omega0(form(c)).omega0 <= -3.0);
}

TEST_CASE("omega0 bound for a coupled gallery system") {
  Scenario s = gallery_scenario("G3");
  s.grid = BoxDomain::cube(2, -2, 2, 16);
  SampledSystem ss = sample(s.sys, s.grid);
  HypothesisReport r = check_all(ss, s.mode);
  double bound = r.Cgamma * (r.kW + (r.kB + r.kC) * (r.kB + r.kC) / 4);
  CHECK(omega0(assemble(ss)).omega0 <= bound + 1e-8);
}

TEST_CASE("p-norms") {
  Scenario s = lpqt::scenario({.cells = 10, .op = "q.11 = \"1\"\nv.11 = \"1\"\n"});
  DiscreteForm F = form(s);
  CVec one = CVec::Constant(F.size(), cplx(0.6, 0.8));
  for (double p : {1.5, 2.0, 4.0}) CHECK(pnorm(one, 1, F.vol, p) == doctest::Approx(std::pow(0.9, 1 / p)));
  CHECK(pnorm(one, 1, F.vol, 2.0) == doctest::Approx(std::sqrt(F.vol) * one.norm()));
  CHECK(pnorm(one, 1, F.vol, std::numeric_limits<double>::infinity()) == doctest::Approx(1.0));

  BoxDomain g = BoxDomain::cube(2, -4, 4, 256);
  CVec gauss = sample_interior(g, 1, [](const double* x, cplx* u, cplx*) { u[0] = std::exp(-(x[0] * x[0] + x[1] * x[1])); });
  CHECK(std::fabs(pnorm(gauss, 1, g.cell_volume(), 4.0) - oracle::kGaussL4Box4) < 1e-6);
}

TEST_CASE("unit-ball truncation") {
  CVec u = CVec::Constant(6, cplx(2.0 / std::sqrt(2.0), 0));
  CVec t = truncate_unit(u, 2);
  CHECK((t - u / 2).norm() < 1e-15);
  CVec small = CVec::Constant(6, cplx(0.1, 0.2));
  CHECK(truncate_unit(small, 3) == small);

  auto f = [](const double* x, cplx* u, cplx* du) {
    u[0] = {2 * std::sin(x[0]) * std::cos(x[1]), 0.5};
    u[1] = {std::cos(x[0] + x[1]), 1.5 * x[0]};
    du[0] = {2 * std::cos(x[0]) * std::cos(x[1]), 0};
    du[1] = {-std::sin(x[0] + x[1]), 1.5};
    du[2] = {-2 * std::sin(x[0]) * std::sin(x[1]), 0};
    du[3] = {-std::sin(x[0] + x[1]), 0};
  };
  double e1 = truncation_gradient_error(BoxDomain::cube(2, -2, 2, 32), 2, f);
  double e2 = truncation_gradient_error(BoxDomain::cube(2, -2, 2, 64), 2, f);
  double e3 = truncation_gradient_error(BoxDomain::cube(2, -2, 2, 128), 2, f);
  CHECK(e1 / e2 >= 1.5);
  CHECK(e2 / e3 >= 1.5);
}

TEST_CASE("nittka value") {
  Scenario s = lpqt::scenario({.d = 2, .cells = 16, .m = 2,
                               .op = "q.11 = \"1 + x1^2\"\nq.22 = \"1\"\nv.11 = \"1\"\nv.22 = \"2 + x2\"\n"});
  DiscreteForm F = form(s);
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) {
    CVec u = smooth_random_field(s.grid, 2, 4, rng);
    CHECK(nittka_value(F, u, 2.0) == doctest::Approx(form_value(F, u, u).real()).epsilon(1e-12));
    for (double p : {1.2, 1.5, 3.0, 8.0}) CHECK(nittka_value(F, u, p) >= 0.0);
  }
  CHECK_THROWS(nittka_value(F, CVec::Zero(F.size()), 1.0));

  Scenario g = gallery_scenario("G3");
  g.grid = BoxDomain::cube(2, -2, 2, 16);
  SampledSystem gs = sample(g.sys, g.grid);
  DiscreteForm G = assemble(gs);
  HypothesisReport r = check_all(gs, g.mode);
  double shift = r.Cgamma / r.gamma;
  for (int k = 0; k < 20; ++k) {
    CVec u = smooth_random_field(g.grid, 2, 4, rng);
    CHECK(nittka_shifted(G, u, 2.0, shift) >= -1e-10);
  }
}
