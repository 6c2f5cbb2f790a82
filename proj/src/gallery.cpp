#include "lpq/gallery.hpp"

#include <cmath>
#include <stdexcept>

namespace lpq {

namespace {

std::vector<GalleryEntry> build() {
  const double s2 = std::sqrt(2.0);
  std::vector<GalleryEntry> g;

  g.push_back({"G1", "scalar constant-coefficient baseline", R"SC([domain]
d = 2
lower = 0
upper = 1
cells = 32

[operator]
m = 1
q.11 = "1"
q.22 = "1"
v.11 = "2"

[hypotheses]
mode = fixed
gamma = 1
Cgamma = 1

[run]
name = scalar-baseline
family = G1
seed = 11
p = 1.5, 2, 4
t_final = 0.2
samples = 10
checkpoints = 20
distance_source = 0.5, 0.5
nittka_samples = 10
)SC",
               {{"c0", 0.0}, {"kappaA", 0.0}, {"kappaB", 0.0}, {"kappaC", 0.0}, {"kappaW", 0.0}}});

  g.push_back({"G2", "antisymmetric potential coupling", R"SC([domain]
d = 2
lower = -1
upper = 1
cells = 32

[operator]
m = 2
q.11 = "1"
q.22 = "1"
v.11 = "2 + x1^2"
v.22 = "3 + x2^2"
v.12 = "0.5*min(2 + x1^2, 3 + x2^2)"
v.21 = "-0.5*min(2 + x1^2, 3 + x2^2)"

[hypotheses]
mode = fixed
gamma = 1
Cgamma = 1

[run]
name = antisymmetric-potential
family = G2
seed = 12
p = 1.5, 2, 4
t_final = 0.2
samples = 10
checkpoints = 20
)SC",
               {{"c0", 0.5}, {"kappaA", 0.0}, {"kappaB", 0.0}, {"kappaC", 0.0}}});

  g.push_back({"G3", "first-order coupling, drifts bounded by (lambda_Q lambda_V)^(1/2)", R"SC([domain]
d = 2
lower = -2
upper = 2
cells = 64

[operator]
m = 2
q.11 = "1"
q.22 = "1"
v.11 = "4 + x1^2 + x2^2"
v.22 = "4 + x1^2 + x2^2"
b.1.12 = "0.3*sqrt(4 + x1^2 + x2^2)"
b.1.21 = "-0.3*sqrt(4 + x1^2 + x2^2)"
b.2.11 = "0.3*sqrt(4 + x1^2 + x2^2)"
b.2.22 = "-0.3*sqrt(4 + x1^2 + x2^2)"
c.1.12 = "0.3*sqrt(4 + x1^2 + x2^2)"
c.1.21 = "0.3*sqrt(4 + x1^2 + x2^2)"
c.2.12 = "-0.3*sqrt(4 + x1^2 + x2^2)"
c.2.21 = "0.3*sqrt(4 + x1^2 + x2^2)"

[hypotheses]
mode = fixed
gamma = 1
Cgamma = 1

[run]
name = drift-coupled
family = G3
seed = 13
p = 1.1, 1.5, 2, 3, 6, 12
t_final = 0.5
dt = 1e-4
samples = 50
checkpoints = 50
nittka_grids = 32, 64, 128
nittka_samples = 20
reference_grid = 256
)SC",
               {{"c0", 0.0}, {"kappaA", 0.0}, {"kappaB", 0.3 * s2}, {"kappaC", 0.3 * s2}, {"kappaW", 0.0}}});

  g.push_back({"G4", "strong coupling A^hk = q_hk G", R"SC([domain]
d = 2
lower = -1
upper = 1
cells = 32

[operator]
m = 2
q.11 = "1 + x1^2"
q.12 = "0.2"
q.22 = "1 + x2^2"
a.11.11 = "0.3*(1 + x1^2)"
a.11.12 = "0.1*(1 + x1^2)"
a.11.21 = "0.1*(1 + x1^2)"
a.11.22 = "0.3*(1 + x1^2)"
a.12.11 = "0.06"
a.12.12 = "0.02"
a.12.21 = "0.02"
a.12.22 = "0.06"
a.21.11 = "0.06"
a.21.12 = "0.02"
a.21.21 = "0.02"
a.21.22 = "0.06"
a.22.11 = "0.3*(1 + x2^2)"
a.22.12 = "0.1*(1 + x2^2)"
a.22.21 = "0.1*(1 + x2^2)"
a.22.22 = "0.3*(1 + x2^2)"
v.11 = "2 + x1^2 + x2^2"
v.22 = "2 + x1^2 + x2^2"

[hypotheses]
mode = fixed
gamma = 1
Cgamma = 1

[run]
name = strong-coupling
family = G4
seed = 14
p = 1.5, 2, 4, 8
t_final = 0.2
samples = 10
checkpoints = 20
)SC",
               {{"kappaA", 0.4}, {"kappaB", 0.0}, {"kappaC", 0.0}, {"kappaW", 0.0}}});

  // k0 = 0.05 (kappa_A <= m d k0), kappa = 0.2, kappa_0 = 0.2, a = 1/4, b = 2a
  g.push_back({"G5", "refined power-growth drifts, b = 2a", R"SC([domain]
d = 2
lower = -2
upper = 2
cells = 32

[operator]
m = 2
q.11 = "1"
q.22 = "1"
a.11.11 = "0.05"
a.11.12 = "0.05"
a.11.21 = "0.05"
a.11.22 = "0.05"
a.22.11 = "0.05"
a.22.12 = "0.05"
a.22.21 = "0.05"
a.22.22 = "0.05"
b.1.12 = "0.2*(1 + x1^2 + x2^2)^0.25"
b.1.21 = "-0.2*(1 + x1^2 + x2^2)^0.25"
b.2.11 = "0.2*(1 + x1^2 + x2^2)^0.25"
b.2.22 = "-0.2*(1 + x1^2 + x2^2)^0.25"
c.1.11 = "0.2*(1 + x1^2 + x2^2)^0.25"
c.1.22 = "0.2*(1 + x1^2 + x2^2)^0.25"
c.2.12 = "0.2*(1 + x1^2 + x2^2)^0.25"
c.2.21 = "0.2*(1 + x1^2 + x2^2)^0.25"
v.11 = "1 + x1^2 + x2^2"
v.22 = "1 + x1^2 + x2^2"
w.12 = "0.2*sqrt(1 + x1^2 + x2^2)"
w.21 = "-0.2*sqrt(1 + x1^2 + x2^2)"

[hypotheses]
mode = refined
a = 0.25
b = 0.5

[run]
name = refined-power
family = G5
seed = 15
p = 1.5, 2, 3, 5
t_final = 0.2
samples = 10
checkpoints = 20
)SC",
               {{"kappaA", 0.2}, {"kappaB", 0.2 * s2}, {"kappaC", 0.2 * s2}, {"kappaW", 0.2}}});

  g.push_back({"G6", "kernel mode, bounded coefficients (beta = 0)", R"SC([domain]
d = 2
lower = -3
upper = 3
cells = 64

[operator]
m = 2
q.11 = "1"
q.22 = "1"
v.11 = "2 + sin(x1)*cos(x2)"
v.22 = "2 + sin(x1)*cos(x2)"
b.1.12 = "0.3"
b.1.21 = "-0.3"
b.2.11 = "0.3"
b.2.22 = "-0.3"
c.1.12 = "0.3"
c.1.21 = "0.3"
c.2.12 = "-0.3"
c.2.21 = "0.3"

[hypotheses]
mode = kernel
beta = 0
c = 1

[run]
name = kernel-bounded
family = G6
seed = 16
p = 2
t_final = 0.2
dt = 1e-3
samples = 10
checkpoints = 20
kernel_times = 0.05, 0.1, 0.2
)SC",
               {{"kappaB", 0.3 * s2}, {"kappaC", 0.3 * s2}}});

  g.push_back({"G6b", "kernel mode, unbounded potential (beta = 1)", R"SC([domain]
d = 2
lower = -3
upper = 3
cells = 64

[operator]
m = 2
q.11 = "1"
q.22 = "1"
v.11 = "1 + x1^2 + x2^2"
v.22 = "1 + x1^2 + x2^2"
b.1.12 = "0.3*(1 + x1^2 + x2^2)^0.25"
b.1.21 = "-0.3*(1 + x1^2 + x2^2)^0.25"
b.2.11 = "0.3*(1 + x1^2 + x2^2)^0.25"
b.2.22 = "-0.3*(1 + x1^2 + x2^2)^0.25"
c.1.12 = "0.3*(1 + x1^2 + x2^2)^0.25"
c.1.21 = "0.3*(1 + x1^2 + x2^2)^0.25"
c.2.12 = "-0.3*(1 + x1^2 + x2^2)^0.25"
c.2.21 = "0.3*(1 + x1^2 + x2^2)^0.25"

[hypotheses]
mode = kernel
beta = 1
c = 1

[run]
name = kernel-unbounded
family = G6b
seed = 17
p = 2
t_final = 0.2
dt = 1e-3
samples = 10
checkpoints = 20
kernel_times = 0.05, 0.1, 0.2
)SC",
               {{"kappaB", 0.3}, {"kappaC", 0.3}}});
  return g;
}

}  // namespace

const std::vector<GalleryEntry>& gallery() {
  static const std::vector<GalleryEntry> g = build();
  return g;
}

const GalleryEntry& gallery_entry(const std::string& id) {
  for (const auto& e : gallery())
    if (e.id == id) return e;
  throw std::invalid_argument("unknown gallery scenario '" + id + "'");
}

Scenario gallery_scenario(const std::string& id) {
  const GalleryEntry& e = gallery_entry(id);
  return parse_scenario(e.text, "gallery:" + e.id);
}

}  // namespace lpq
