#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lpq/kernel.hpp"
#include "testing.hpp"

using namespace lpq;

namespace {
struct Setup {
  Scenario sc;
  DiscreteForm F;
};

Setup make(const lpqt::Spec& spec) {
  Setup s{lpqt::scenario(spec), {}};
  s.F = assemble(sample(s.sc.sys, s.sc.grid));
  return s;
}
}  // namespace

TEST_CASE("1D kernel matches the Gaussian") {
  Setup s = make({.lo = -6, .hi = 6, .cells = 600, .op = "q.11 = \"1\"\nv.11 = \"4\"\n"});
  Stepper st(s.F, Scheme::CrankNicolson, 2e-4);
  long y = s.sc.grid.interior_index({300});
  double t = 0.1;
  Eigen::VectorXd k = kernel_column(st, y, 0, t);
  double worst = 0;
  std::vector<double> x(1);
  for (long i = 0; i < s.F.N; ++i) {
    s.sc.grid.coords(s.sc.grid.interior_to_node(i), x.data());
    if (std::fabs(x[0]) > 3 * std::sqrt(t)) continue;
    double g = std::exp(-x[0] * x[0] / (4 * t) - 4 * t) / std::sqrt(4 * std::numbers::pi * t);
    worst = std::max(worst, std::fabs(k[i] / g - 1));
  }
  CHECK(worst < 0.05);
}

TEST_CASE("decoupled pair keeps components apart and obeys the mass bound") {
  Setup s = make({.d = 2, .lo = -2, .hi = 2, .cells = 24, .m = 2,
                  .op = "q.11 = \"1\"\nq.22 = \"1\"\nv.11 = \"2\"\nv.22 = \"3\"\n"});
  Stepper st(s.F, Scheme::ImplicitEuler, 1e-3);
  long y = s.sc.grid.interior_index({12, 12});
  double t = 0.1;
  auto cols = kernel_columns(st, {{y, 0}, {y, 1}}, {t});
  const RowMat& K = cols[0];
  for (long i = 0; i < s.F.N; ++i) {
    CHECK(K(2 * i + 1, 0) == 0.0);
    CHECK(K(2 * i, 1) == 0.0);
  }
  double mass = 0;
  for (long i = 0; i < s.F.N; ++i) mass += K(2 * i, 0) * s.F.vol;
  // implicit Euler damps the constant mode by (1 + v0 dt)^-k
  CHECK(mass <= std::pow(1 + 2 * 1e-3, -st.steps_for(t)));
  CHECK(mass > 0.5);
}

TEST_CASE("Gaussian bound in the constant-coefficient case") {
  Setup s = make({.d = 2, .lo = -3, .hi = 3, .cells = 32,
                  .op = "q.11 = \"1\"\nq.22 = \"1\"\nv.11 = \"2\"\n", .hyp = "mode = kernel\nbeta = 0\nc = 1\n"});
  SampledSystem ss = sample(s.sc.sys, s.sc.grid);
  HypothesisReport r = check_all(ss, s.sc.mode);
  ConstantsBundle b = kernel_constants(2, 0.0, r.kappa, 1.0, r.nu0);
  Stepper st(s.F, Scheme::ImplicitEuler, 1e-3);
  long yn = s.sc.grid.node_index({16, 16});
  DistanceMap dm = distance_map(weight_field(ss.V, ss.Q, s.sc.grid, 0.0), yn);
  auto blocks = kernel_blocks(st, s.sc.grid.interior_index({16, 16}), {0.05, 0.1}, dm, b);
  for (const auto& blk : blocks) {
    GaussianCheck g = verify_gaussian(blk, s.sc.grid);
    CHECK(g.pass);
    CHECK(g.min_margin >= 0);
    CHECK(g.checked > 0);
    CHECK(g.ondiag_rhs == doctest::Approx(b.C0 * (1 + 1 / blk.t) * std::exp(b.C1 * blk.t)));
    CHECK(g.ondiag_value <= g.ondiag_rhs);
  }
}

TEST_CASE("kernel symmetry for a self-adjoint system") {
  Setup s = make({.d = 2, .lo = -1, .hi = 1, .cells = 16, .m = 2,
                  .op = "q.11 = \"1 + x1^2\"\nq.22 = \"1\"\nv.11 = \"2\"\nv.22 = \"2\"\nv.12 = \"0.5\"\nv.21 = \"0.5\"\n"});
  Stepper st(s.F, Scheme::ImplicitEuler, 1e-3);
  CHECK(symmetry_check(st, 0.05, 20, 100) < 1e-8);
  CHECK_THROWS(kernel_columns(st, {{-1, 0}}, {0.1}));
  CHECK_THROWS(kernel_columns(st, {{0, 0}}, {0.2, 0.1}));
}
