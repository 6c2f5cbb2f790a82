#include <cmath>
#include <random>

#include "doctest.h"
#include "frozen_oracles.hpp"
#include "lpq/metric.hpp"
#include "testing.hpp"

using namespace lpq;

namespace {
MetricField field(const Scenario& s, double beta) {
  SampledSystem ss = sample(s.sys, s.grid);
  return weight_field(ss.V, ss.Q, s.grid, beta);
}
}  // namespace

TEST_CASE("weight field") {
  Scenario s = lpqt::scenario({.lo = -2, .hi = 2, .cells = 40, .op = "q.11 = \"1\"\nv.11 = \"1 + x1^2\"\n"});
  MetricField f0 = field(s, 0.0);
  for (double w : f0.w) CHECK(w == 1.0);
  MetricField f1 = field(s, 1.0);
  std::vector<double> x(1);
  for (long i = 0; i < s.grid.node_count(); ++i) {
    s.grid.coords(i, x.data());
    CHECK(f1.w[i] == doctest::Approx(std::sqrt(1 + x[0] * x[0])));
  }
  Scenario c = lpqt::scenario({.cells = 4, .op = "q.11 = \"1\"\nv.11 = \"9\"\n"});
  for (double w : field(c, 2.0).w) CHECK(w == doctest::Approx(std::pow(9.0, 2.0 / 3.0)));
  CHECK_THROWS(weight_field(sample(c.sys, c.grid).V, sample(c.sys, c.grid).Q, c.grid, -1));
}

TEST_CASE("stencils") {
  CHECK(stencil_moves(2, 4).size() == 4);
  CHECK(stencil_moves(2, 8).size() == 8);
  CHECK(stencil_moves(2, 16).size() == 16);
  CHECK(stencil_moves(1, 16).size() == 2);
  CHECK_THROWS(stencil_moves(2, 6));
}

TEST_CASE("constant metric gives scaled Euclidean distance") {
  Scenario s = lpqt::scenario({.d = 2, .lo = -1, .hi = 1, .cells = 64,
                               .op = "q.11 = \"1\"\nq.22 = \"1\"\nv.11 = \"4\"\n"});
  MetricField f = field(s, 1.0);
  long src = s.grid.node_index({32, 32});
  DistanceMap dm = distance_map(f, src, 16);
  double scale = std::pow(4.0, 0.25);
  double worst = 0;
  std::vector<double> x(2);
  for (long i = 0; i < s.grid.node_count(); ++i) {
    s.grid.coords(i, x.data());
    double e = scale * std::hypot(x[0], x[1]);
    if (e > 0.2) worst = std::max(worst, std::fabs(dm.dist[i] / e - 1));
  }
  CHECK(worst < 0.03);
  CHECK(dm.dist[src] == 0);
}

TEST_CASE("1D weighted length against quadrature") {
  Scenario s = lpqt::scenario({.lo = -3, .hi = 3, .cells = 1200, .op = "q.11 = \"1\"\nv.11 = \"1 + x1^2\"\n"});
  MetricField f = field(s, 1.0);
  DistanceMap dm = distance_map(f, s.grid.node_index({600}), 16);
  for (int i = 0; i < 4; ++i) {
    int node = 600 + static_cast<int>(std::lround(oracle::kWeightedLenY[i] / s.grid.h(0)));
    CHECK(dm.dist[node] == doctest::Approx(oracle::kWeightedLen[i]).epsilon(1e-3));
  }
}

TEST_CASE("distance properties") {
  Scenario s = lpqt::scenario({.d = 2, .lo = -1, .hi = 1, .cells = 24,
                               .op = "q.11 = \"1 + x1^2\"\nq.22 = \"2\"\nq.12 = \"0.3\"\nv.11 = \"2 + sin(3*x1)*x2^2\"\n"});
  MetricField f = field(s, 1.0);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<long> pick(0, s.grid.node_count() - 1);
  for (int k = 0; k < 5; ++k) {
    long a = pick(rng), b = pick(rng);
    DistanceMap da = distance_map(f, a), db = distance_map(f, b);
    CHECK(std::fabs(da.dist[b] - db.dist[a]) <= 1e-12 * std::max(1.0, da.dist[b]));
    for (long c = 0; c < s.grid.node_count(); ++c) CHECK(da.dist[c] <= da.dist[b] + db.dist[c] + 1e-12);
  }
}

TEST_CASE("Euclidean equivalence") {
  Scenario a = lpqt::scenario({.d = 2, .cells = 8, .op = "q.11 = \"1\"\nq.22 = \"1\"\nv.11 = \"1\"\n"});
  Equivalence e = euclid_equivalence_check(field(a, 1.0), sample(a.sys, a.grid).Q);
  CHECK(e.q0 == doctest::Approx(1.0));
  CHECK(e.q1 == doctest::Approx(1.0));
  CHECK(e.equivalent);

  // Q = (1+|x|^2) I and lambda_V = (1+|x|^2)^2 with beta = 1 cancel exactly
  Scenario b = lpqt::scenario({.d = 2, .lo = -3, .hi = 3, .cells = 8,
                               .op = "q.11 = \"1 + x1^2 + x2^2\"\nq.22 = \"1 + x1^2 + x2^2\"\n"
                                     "v.11 = \"(1 + x1^2 + x2^2)^2\"\n"});
  Equivalence eb = euclid_equivalence_check(field(b, 1.0), sample(b.sys, b.grid).Q);
  CHECK(eb.q0 == doctest::Approx(1.0));
  CHECK(eb.q1 == doctest::Approx(1.0));

  double last = 1e300;
  for (double L : {10.0, 100.0, 1000.0}) {
    Scenario c = lpqt::scenario({.d = 1, .lo = -L, .hi = L, .cells = 16, .op = "q.11 = \"1\"\nv.11 = \"1 + x1^2\"\n"});
    Equivalence ec = euclid_equivalence_check(field(c, 1.0), sample(c.sys, c.grid).Q);
    CHECK(ec.q0 < last);
    last = ec.q0;
  }
  CHECK(last < 1e-3);
}
