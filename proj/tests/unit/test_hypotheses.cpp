#include <cmath>

#include "doctest.h"
#include "lpq/gallery.hpp"
#include "lpq/hypotheses.hpp"
#include "testing.hpp"

using namespace lpq;

namespace {
HypothesisReport check(const Scenario& s) { return check_all(sample(s.sys, s.grid), s.mode); }
}  // namespace

TEST_CASE("grid indexing") {
  BoxDomain g({-1, 0}, {1, 2}, {4, 8});
  CHECK(g.node_count() == 45);
  CHECK(g.interior_count() == 21);
  CHECK(g.cell_volume() == doctest::Approx(0.125));
  for (long i = 0; i < g.interior_count(); ++i) {
    auto mi = g.interior_multi(i);
    CHECK(g.interior_index(mi) == i);
    CHECK_FALSE(g.is_boundary(mi));
  }
  CHECK(g.interior_index({0, 3}) == -1);
  CHECK(g.coords(std::vector<int>{2, 4})[1] == doctest::Approx(1.0));
  CHECK(g.refined().n[1] == 16);
}

TEST_CASE("scalar potential: v0 and c0") {
  Scenario s = lpqt::scenario({.d = 1, .lo = -1, .hi = 1, .cells = 20, .op = "q.11 = \"1\"\nv.11 = \"3 + x1^2\"\n"});
  HypothesisReport r = check(s);
  CHECK(r.v0 == doctest::Approx(3.0));
  CHECK(r.c0 == doctest::Approx(0.0));
  CHECK(r.kA == 0);
  CHECK(r.pass());
}

TEST_CASE("antisymmetric potential coupling bounded by closed form") {
  HypothesisReport r = check(gallery_scenario("G2"));
  CHECK(r.pass());
  CHECK(r.c0 <= 0.5 + 1e-9);
  CHECK(r.c0 > 0.4);
}

TEST_CASE("gallery closed forms") {
  for (const auto& e : gallery()) {
    HypothesisReport r = check(gallery_scenario(e.id));
    CHECK_MESSAGE(r.pass(), e.id);
    auto le = [&](const char* key, double v) {
      auto it = e.closed.find(key);
      if (it != e.closed.end()) CHECK_MESSAGE(v <= it->second + 1e-9, e.id << " " << key);
    };
    le("c0", r.c0);
    le("kappaA", r.kA);
    le("kappaB", r.kB);
    le("kappaC", r.kC);
    le("kappaW", r.kW);
  }
  CHECK(check(gallery_scenario("G4")).kA == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(check(gallery_scenario("G3")).kB > 0.38);
}

TEST_CASE("random probe finds no slack violation") {
  Scenario s = gallery_scenario("G3");
  s.grid = BoxDomain::cube(2, -2, 2, 16);
  SampledSystem ss = sample(s.sys, s.grid);
  HypothesisReport r = check_all(ss, s.mode);
  ProbeResult p = random_probe(ss, r.gamma, s.mode.R(r.gamma), r, 50, 3);
  CHECK(p.slack_B >= -1e-10);
  CHECK(p.slack_C >= -1e-10);
  CHECK(p.slack_W >= -1e-10);
  CHECK(p.slack_c0 >= -1e-10);
}

TEST_CASE("indefinite potential fails") {
  Scenario s = lpqt::scenario({.op = "q.11 = \"1\"\nv.11 = \"x1 - 0.5\"\n"});
  HypothesisReport r = check(s);
  CHECK_FALSE(r.pass());
}

TEST_CASE("drift without potential growth breaks the drift bound") {
  Scenario s = lpqt::scenario({.op = "q.11 = \"1\"\nv.11 = \"1\"\nb.1.11 = \"5\"\n"});
  HypothesisReport r = check(s);
  CHECK(r.kB > 2.0);
  CHECK_FALSE(r.pass());
}
