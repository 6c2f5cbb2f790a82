#include "lpq/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <random>
#include <sstream>

#include "lpq/form.hpp"
#include "lpq/gallery.hpp"

namespace lpq {

namespace fs = std::filesystem;

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"check-hypotheses", "p-interval", "evolve", "nittka",
                                             "kernel",           "distance",   "gallery", "all"};
  return c;
}

Scenario resolve_scenario(const std::string& source, const Overrides& ov) {
  Scenario sc;
  if (source.rfind("gallery:", 0) == 0) {
    try {
      sc = gallery_scenario(source.substr(8));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(source, 0, 0, e.what());
    }
  } else {
    sc = load_scenario(source);
  }
  apply_overrides(sc, ov);
  return sc;
}

namespace {

constexpr double kPStep = 1e-3;

struct Ctx {
  Scenario sc;
  std::string origin;
  std::string out;
  bool write = true;
  Timings tm;
  Json rep;
  std::vector<std::string> failures, findings;
  std::ostream* log = nullptr;

  std::optional<SampledSystem> sys;
  std::optional<HypothesisReport> hyp;
  std::optional<DiscreteForm> form;
  std::optional<IntervalSpec> interval;
  bool interval_done = false;

  const SampledSystem& sampled() {
    if (!sys) {
      tm.start("sample");
      sys = sample(sc.sys, sc.grid);
      tm.stop();
    }
    return *sys;
  }
  const HypothesisReport& hypotheses() {
    if (!hyp) {
      const SampledSystem& s = sampled();
      tm.start("hypotheses");
      hyp = check_all(s, sc.mode);
      tm.stop();
    }
    return *hyp;
  }
  const DiscreteForm& discrete() {
    if (!form) {
      const SampledSystem& s = sampled();
      tm.start("assemble");
      form = assemble(s);
      tm.stop();
    }
    return *form;
  }
  // the fixed-mode interval, when K > 0
  const IntervalSpec* interval_fixed() {
    if (!interval_done) {
      interval_done = true;
      const HypothesisReport& h = hypotheses();
      if (sc.mode.kind == HypMode::Kind::Fixed && h.K > 0 && h.gamma * h.kW < 1)
        interval = admissible_interval(h.kA, h.kB, h.kC, h.kW, h.gamma);
    }
    return interval ? &*interval : nullptr;
  }
  std::string path(const std::string& name) const { return (fs::path(out) / name).string(); }
  void fail(const std::string& s) { failures.push_back(s); }
  void note(const std::string& s) { findings.push_back(s); }
};

std::string fmtd(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

long nearest_node(const BoxDomain& g, const std::vector<double>& x) {
  std::vector<int> mi(g.d);
  for (int k = 0; k < g.d; ++k) {
    double c = x.empty() ? 0.5 * (g.lower[k] + g.upper[k]) : x[k];
    long i = std::lround((c - g.lower[k]) / g.h(k));
    mi[k] = static_cast<int>(std::clamp<long>(i, 0, g.n[k]));
  }
  return g.node_index(mi);
}

long nearest_interior(const BoxDomain& g, const std::vector<double>& x) {
  std::vector<int> mi = g.node_multi(nearest_node(g, x));
  for (int k = 0; k < g.d; ++k) mi[k] = std::clamp(mi[k], 1, g.n[k] - 1);
  return g.interior_index(mi);
}

bool is_two(double p) { return std::fabs(p - 2.0) < 1e-12; }

// growth exponent the theory guarantees for p, or nullopt
struct Bound {
  double value;
  std::string source;
};

std::optional<Bound> growth_bound(Ctx& c, double p) {
  const HypothesisReport& h = c.hypotheses();
  const HypMode& md = c.sc.mode;
  switch (md.kind) {
    case HypMode::Kind::Fixed: {
      if (!(h.K > 0)) return std::nullopt;
      if (is_two(p)) {
        double b = h.Cgamma * (h.kW + 0.25 * (h.kB + h.kC) * (h.kB + h.kC));
        return Bound{b, "p2"};
      }
      const IntervalSpec* I = c.interval_fixed();
      if (I && I->contains(p)) return Bound{h.Cgamma / h.gamma, "interval"};
      auto [lo, hi] = refined_p_range(h.kA);
      if (p > lo && p < hi) return Bound{h.Cgamma / gamma_p(h.kA, h.kB, h.kC, h.kW, p), "gamma_p"};
      return std::nullopt;
    }
    case HypMode::Kind::Refined: {
      auto [lo, hi] = refined_p_range(h.kA);
      if (!(p > lo && p < hi)) return std::nullopt;
      double gp = gamma_p(h.kA, h.kB, h.kC, h.kW, p);
      return Bound{phi_power(md.a, md.b, gp) / gp, "gamma_p"};
    }
    case HypMode::Kind::Kernel:
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<double> probe_ps(Ctx& c) {
  if (!c.sc.run.p.empty()) return c.sc.run.p;
  std::vector<double> ps = {2.0};
  if (const IntervalSpec* I = c.interval_fixed()) {
    double mid = I->midpoint();
    if (!is_two(mid)) ps.push_back(mid);
  }
  return ps;
}

// ---------------------------------------------------------------- sections

void section_hypotheses(Ctx& c) {
  const SampledSystem& s = c.sampled();
  const HypothesisReport& h = c.hypotheses();
  Json j = to_json(h);
  for (const auto& [k, v] : h.flags)
    if (!v) c.fail("hypotheses: " + k + " does not hold");

  if (h.flags.count("constants_finite") && h.flags.at("constants_finite")) {
    double gamma = 1.0, R = c.sc.mode.R(1.0);
    if (c.sc.mode.kind == HypMode::Kind::Fixed) {
      gamma = c.sc.mode.gamma;
      R = c.sc.mode.Cgamma;
    }
    c.tm.start("hypotheses_probe");
    ProbeResult pr = random_probe(s, gamma, R, h, std::max(1, c.sc.run.probe_pairs), c.sc.run.seed, 2000);
    c.tm.stop();
    Json pj;
    pj["gamma"] = num(gamma);
    pj["R"] = num(R);
    pj["pairs_per_node"] = c.sc.run.probe_pairs;
    pj["slack_B"] = num(pr.slack_B);
    pj["slack_C"] = num(pr.slack_C);
    pj["slack_W"] = num(pr.slack_W);
    pj["slack_A"] = num(pr.slack_A);
    pj["slack_c0"] = num(pr.slack_c0);
    pj["tol"] = -1e-10;
    bool ok = true;
    for (double v : {pr.slack_B, pr.slack_C, pr.slack_W, pr.slack_A, pr.slack_c0}) ok = ok && !(v < -1e-10);
    pj["pass"] = ok;
    if (!ok) c.fail("hypotheses: random probe undercuts a reported constant");
    j["probe"] = pj;
  }

  if (!c.sc.family.empty()) {
    const GalleryEntry* ge = nullptr;
    for (const auto& e : gallery())
      if (e.id == c.sc.family) ge = &e;
    if (ge) {
      Json cj = Json::object();
      const std::map<std::string, double> est = {
          {"c0", h.c0}, {"kappaA", h.kA}, {"kappaB", h.kB}, {"kappaC", h.kC}, {"kappaW", h.kW}};
      for (const auto& [k, v] : ge->closed) {
        double e = est.at(k);
        bool ok = e <= v + 1e-9;
        cj[k] = {{"estimated", num(e)}, {"closed_form", num(v)}, {"tol", 1e-9}, {"pass", ok}};
        if (!ok) c.fail("hypotheses: " + k + " exceeds its closed form for " + ge->id);
      }
      j["closed_form"] = cj;
    }
  }
  *c.log << "hypotheses: mode " << h.mode.name() << ", v0 " << fmtd(h.v0) << ", c0 " << fmtd(h.c0) << ", kA "
         << fmtd(h.kA) << ", kB " << fmtd(h.kB) << ", kC " << fmtd(h.kC) << ", kW " << fmtd(h.kW);
  if (h.mode.kind == HypMode::Kind::Fixed) *c.log << ", K " << fmtd(h.K);
  *c.log << (h.pass() ? "  [pass]" : "  [FAIL]") << "\n";
  c.rep["hypotheses"] = j;
}

Json interval_json(double kA, double kB, double kC, double kW, double gamma, const IntervalSpec& I, bool& agree,
                   std::vector<double>* grid_out = nullptr, std::vector<char>* adm_out = nullptr) {
  std::vector<double> grid = default_p_grid(1.001, 64.0, kPStep);
  std::vector<char> adm = psd_sweep_Mgamma(kA, kB, kC, kW, gamma, grid);
  SweepBounds sb = sweep_bounds(grid, adm);
  agree = sweep_agrees(I, grid, adm, kPStep);
  Json j = to_json(I);
  j["delta1"] = num(I.kind == IntervalSpec::Kind::Closed ? 2.0 - I.lo : kInf);
  j["delta2"] = num(I.kind == IntervalSpec::Kind::Closed ? I.hi - 2.0 : kInf);
  j["oracle"] = {{"grid", {{"lo", 1.001}, {"hi", 64.0}, {"step", kPStep}}},
                 {"admissible_lo", num(sb.lo)},
                 {"admissible_hi", num(sb.hi)},
                 {"contiguous", sb.contiguous},
                 {"agree", agree}};
  if (grid_out) *grid_out = std::move(grid);
  if (adm_out) *adm_out = std::move(adm);
  return j;
}

void section_interval(Ctx& c) {
  const HypothesisReport& h = c.hypotheses();
  const HypMode& md = c.sc.mode;
  Json j;
  j["mode"] = md.name();
  c.tm.start("interval");
  std::vector<double> grid;
  std::vector<char> adm;
  std::function<double(double)> expo;
  auto [rlo, rhi] = refined_p_range(h.kA);
  j["gamma_p_range"] = {{"lo", num(rlo)}, {"hi", num(rhi)}};

  if (md.kind == HypMode::Kind::Fixed) {
    j["K"] = num(h.K);
    if (const IntervalSpec* I = c.interval_fixed()) {
      bool agree = false;
      j["interval"] = interval_json(h.kA, h.kB, h.kC, h.kW, h.gamma, *I, agree, &grid, &adm);
      j["exponent_interval"] = num(h.Cgamma / h.gamma);
      j["exponent_p2"] = num(h.Cgamma * (h.kW + 0.25 * (h.kB + h.kC) * (h.kB + h.kC)));
      if (!agree) c.fail("p-interval: closed-form endpoints disagree with the matrix sweep");
      *c.log << "p-interval: " << I->str() << (agree ? "  (matrix sweep agrees)" : "  (matrix sweep DISAGREES)")
             << "\n";
    } else {
      c.fail("p-interval: K is not positive, no interval");
      *c.log << "p-interval: K = " << fmtd(h.K) << " is not positive\n";
    }
    const double Cg = h.Cgamma;
    expo = [Cg](double gp) { return Cg / gp; };
  } else if (md.kind == HypMode::Kind::Refined) {
    const double a = md.a, b = md.b;
    expo = [a, b](double gp) { return phi_power(a, b, gp) / gp; };
    *c.log << "p-interval: refined range ]" << fmtd(rlo) << ", " << fmtd(rhi) << "[\n";
  } else {
    ConstantsBundle cb = kernel_constants(c.sc.grid.d, h.beta, h.kappa, h.c, h.nu0);
    j["kernel_constants"] = to_json(cb);
    Json tj = Json::array();
    bool ok = true;
    for (double p : {2.0, 4.0, 8.0})
      for (double sg : {0.0, 0.5, 2.0}) {
        Tau t = tau_constants(h.kappa, h.c, h.beta, p, sg);
        double cap = cb.Hhat * std::pow(p, 2 * h.beta + 2) * (std::pow(sg, 2 * h.beta + 2) + 1);
        bool good = t.tau <= t.hat_tau * (1 + 1e-12) && t.hat_tau <= cap * (1 + 1e-12);
        ok = ok && good;
        tj.push_back({{"p", p}, {"sigma", sg}, {"tau", num(t.tau)}, {"hat_tau", num(t.hat_tau)}, {"cap", num(cap)},
                      {"pass", good}});
      }
    j["tau"] = tj;
    if (!ok) c.fail("p-interval: tau ordering violated");
    *c.log << "p-interval: kernel constants C0 " << fmtd(cb.C0) << ", C1 " << fmtd(cb.C1) << ", C2 "
           << fmtd(cb.C2) << "\n";
  }

  if (expo) {
    Json pj = Json::array();
    for (double p : probe_ps(c)) {
      Json e;
      e["p"] = num(p);
      if (p > rlo && p < rhi) {
        double gp = gamma_p(h.kA, h.kB, h.kC, h.kW, p);
        e["gamma_p"] = num(gp);
        e["exponent"] = num(expo(gp));
        e["psd_at_gamma_p"] = psd_check_Egamma(h.kA, h.kB, h.kC, h.kW, gp, p);
        if (md.kind == HypMode::Kind::Refined && std::fabs(md.b - 2 * md.a) < 1e-15) {
          const double kap = std::max(h.kB, h.kC) / std::sqrt(double(c.sc.grid.d));
          e["exponent_b2a"] = num(growth_exponent_b2a(md.a, kap, h.kW, c.sc.grid.d, h.kA, p));
        }
      } else {
        e["gamma_p"] = nullptr;
        c.note("p-interval: p = " + fmtd(p) + " lies outside the gamma_p range");
      }
      if (const IntervalSpec* I = c.interval_fixed()) e["in_interval"] = I->contains(p);
      pj.push_back(e);
    }
    j["p"] = pj;
  }
  c.tm.stop();

  if (c.write && !grid.empty()) {
    c.tm.start("write_p_sweep");
    const HypothesisReport hh = h;
    write_atomic_with(c.path("p_sweep.csv"), [&](const std::string& tmp) {
      std::FILE* fp = std::fopen(tmp.c_str(), "w");
      if (!fp) throw std::runtime_error("cannot write " + tmp);
      std::fprintf(fp, "p,admissible,gamma_p,exponent\n");
      for (size_t i = 0; i < grid.size(); ++i) {
        double p = grid[i];
        if (p > rlo && p < rhi) {
          double gp = gamma_p(hh.kA, hh.kB, hh.kC, hh.kW, p);
          std::fprintf(fp, "%.6f,%d,%.17g,%.17g\n", p, int(adm[i]), gp, expo(gp));
        } else {
          std::fprintf(fp, "%.6f,%d,nan,nan\n", p, int(adm[i]));
        }
      }
      std::fclose(fp);
    });
    c.tm.stop();
  }
  c.rep["p_interval"] = j;
}

void section_evolve(Ctx& c) {
  const DiscreteForm& F = c.discrete();
  const RunParams& r = c.sc.run;
  double dt = r.dt > 0 ? r.dt : default_dt(F);
  Json j;
  j["scheme"] = scheme_name(r.scheme);
  j["dt"] = num(dt);
  j["t_final"] = num(r.t_final);
  j["samples"] = r.samples;

  c.tm.start("omega0");
  Omega0Result om = omega0(F);
  c.tm.stop();
  j["omega0"] = {{"value", num(om.omega0)},
                 {"residual", num(om.residual)},
                 {"iterations", om.iterations},
                 {"converged", om.converged}};
  if (!om.converged) c.note("evolve: omega0 iteration did not reach its tolerance");
  if (c.sc.mode.kind == HypMode::Kind::Fixed) {
    const HypothesisReport& h = c.hypotheses();
    double b = h.Cgamma * (h.kW + 0.25 * (h.kB + h.kC) * (h.kB + h.kC));
    bool ok = om.omega0 <= b + 1e-8;
    j["omega0"]["bound"] = num(b);
    j["omega0"]["tol"] = 1e-8;
    j["omega0"]["pass"] = ok;
    if (!ok) c.fail("evolve: omega0 exceeds its bound");
  }

  c.tm.start("factorize");
  Stepper st(F, r.scheme, dt);
  c.tm.stop();
  std::vector<double> ps = probe_ps(c);
  ProbeConfig cfg;
  cfg.t_final = r.t_final;
  cfg.samples = r.samples;
  cfg.checkpoints = r.checkpoints;
  cfg.kmax = r.kmax;
  cfg.seed = r.seed;
  cfg.refine_iters = r.refine_iters;
  cfg.refine_horizon = r.refine_horizon;
  c.tm.start("probe");
  std::vector<GrowthTrace> tr = contractivity_probe(st, ps, cfg);
  c.tm.stop();

  Json tj = Json::array();
  for (GrowthTrace& g : tr) {
    Json e;
    auto b = growth_bound(c, g.p);
    if (b) {
      g.bound = b->value;
      g.tol = r.tol_scale * std::max(std::fabs(b->value), 1.0);
      g.pass = g.measured() <= g.bound + g.tol;
      if (!g.pass) c.fail("evolve: p = " + fmtd(g.p) + " growth " + fmtd(g.measured()) + " above bound " + fmtd(g.bound));
    } else {
      g.bound = std::numeric_limits<double>::quiet_NaN();
      c.note("evolve: no theoretical bound for p = " + fmtd(g.p));
    }
    e = to_json(g);
    e["bound_source"] = b ? b->source : "none";
    if (is_two(g.p)) {
      Json w;
      if (r.scheme == Scheme::ImplicitEuler) {
        double sharp = -std::log1p(-dt * om.omega0) / dt;
        bool ok = g.measured() <= sharp + 1e-8;
        w["sharp"] = num(sharp);
        w["pass"] = ok;
        if (!ok) c.fail("evolve: p = 2 growth exceeds the omega0 bound");
      }
      w["literal"] = num(-om.omega0);
      w["literal_pass"] = g.measured() <= -om.omega0 + 1e-8;
      w["tol"] = 1e-8;
      e["omega0_check"] = w;
    }
    tj.push_back(e);
    *c.log << "evolve: p = " << fmtd(g.p) << "  slope " << fmtd(g.measured());
    if (b) *c.log << "  bound " << fmtd(g.bound) << " + " << fmtd(g.tol) << (g.pass ? "  [pass]" : "  [FAIL]");
    *c.log << "\n";
  }
  j["traces"] = tj;
  j["solver"] = {{"max_residual", num(st.max_residual())}, {"fallback", st.used_fallback()}};
  if (st.max_residual() > 1e-10) c.note("evolve: solver residual above 1e-10");
  j["note"] = "probe lower bound vs theoretical upper bound";
  if (c.write) {
    c.tm.start("write_growth");
    write_atomic_with(c.path("growth.csv"), [&](const std::string& tmp) { write_growth_csv(tmp, tr); });
    c.tm.stop();
  }
  c.rep["evolve"] = j;
}

std::optional<double> nittka_shift(Ctx& c, double p) {
  const HypothesisReport& h = c.hypotheses();
  const HypMode& md = c.sc.mode;
  if (md.kind == HypMode::Kind::Fixed) {
    const IntervalSpec* I = c.interval_fixed();
    if (I && I->contains(p)) return h.Cgamma / h.gamma;
    return std::nullopt;
  }
  if (md.kind == HypMode::Kind::Refined) {
    auto [lo, hi] = refined_p_range(h.kA);
    if (!(p > lo && p < hi)) return std::nullopt;
    double gp = gamma_p(h.kA, h.kB, h.kC, h.kW, p);
    return phi_power(md.a, md.b, gp) / gp;
  }
  return std::nullopt;
}

void section_nittka(Ctx& c) {
  const RunParams& r = c.sc.run;
  std::vector<double> ps = probe_ps(c);
  std::vector<int> grids = r.nittka_grids;
  if (grids.empty()) grids.push_back(c.sc.grid.n[0]);
  const bool refine_study = grids.size() >= 2;
  if (refine_study && !c.sc.tables.empty()) throw ConfigError(c.origin, 0, 0, "refinement study needs expression coefficients");

  auto values_on = [&](int n, std::vector<std::vector<double>>& vals, std::vector<std::vector<double>>& norms) {
    BoxDomain g(c.sc.grid.lower, c.sc.grid.upper, std::vector<int>(c.sc.grid.d, n));
    DiscreteForm F = assemble(sample(c.sc.sys, g));
    std::mt19937_64 rng(r.seed);
    vals.assign(ps.size(), {});
    norms.assign(ps.size(), {});
    for (int s = 0; s < r.nittka_samples; ++s) {
      CVec u = smooth_random_field(g, F.m, r.kmax, rng, true);
      for (size_t q = 0; q < ps.size(); ++q) {
        vals[q].push_back(nittka_value(F, u, ps[q]));
        norms[q].push_back(std::pow(pnorm(u, F.m, F.vol, ps[q]), ps[q]));
      }
    }
  };

  c.tm.start("nittka");
  std::vector<std::vector<std::vector<double>>> V(grids.size()), P(grids.size());
  for (size_t i = 0; i < grids.size(); ++i) values_on(grids[i], V[i], P[i]);
  std::vector<std::vector<double>> Vref, Pref;
  if (refine_study) values_on(r.reference_grid, Vref, Pref);
  c.tm.stop();

  Json j;
  j["grids"] = grids;
  j["samples"] = r.nittka_samples;
  if (refine_study) j["reference_grid"] = r.reference_grid;
  Json pj = Json::array();
  for (size_t q = 0; q < ps.size(); ++q) {
    double p = ps[q];
    auto shift = nittka_shift(c, p);
    Json e;
    e["p"] = num(p);
    e["shift"] = shift ? num(*shift) : Json(nullptr);
    Json gj = Json::array();
    std::vector<double> eps;
    for (size_t i = 0; i < grids.size(); ++i) {
      double mn = kInf, mn_raw = kInf, ep = 0;
      for (size_t s = 0; s < V[i][q].size(); ++s) {
        double sv = V[i][q][s] + (shift ? *shift * P[i][q][s] : 0.0);
        mn = std::min(mn, sv);
        mn_raw = std::min(mn_raw, V[i][q][s]);
        if (refine_study) {
          double sr = Vref[q][s] + (shift ? *shift * Pref[q][s] : 0.0);
          ep = std::max(ep, std::fabs(sv - sr));
        }
      }
      Json ge;
      ge["n"] = grids[i];
      ge["min_value"] = num(mn_raw);
      ge["min_shifted"] = num(mn);
      if (refine_study) {
        ge["eps"] = num(ep);
        eps.push_back(ep);
      }
      if (shift) {
        double tol = refine_study ? ep : (is_two(p) ? 1e-10 : 0.0);
        bool ok = mn >= -tol;
        ge["tol"] = num(tol);
        ge["pass"] = ok;
        if (!ok) {
          if (refine_study || is_two(p))
            c.fail("nittka: p = " + fmtd(p) + " shifted value " + fmtd(mn) + " below -eps on n = " + std::to_string(grids[i]));
          else
            c.note("nittka: p = " + fmtd(p) + " shifted value " + fmtd(mn) + " negative on n = " + std::to_string(grids[i]));
        }
      } else if (mn < 0) {
        ge["witness"] = true;
      }
      gj.push_back(ge);
    }
    e["by_grid"] = gj;
    if (eps.size() >= 2) {
      Json rj = Json::array();
      for (size_t i = 0; i + 1 < eps.size(); ++i) {
        double ratio = eps[i + 1] > 0 ? eps[i] / eps[i + 1] : kInf;
        bool ok = ratio >= 1.5;
        rj.push_back({{"coarse", grids[i]}, {"fine", grids[i + 1]}, {"ratio", num(ratio)}, {"pass", ok}});
        if (shift && !ok) c.note("nittka: p = " + fmtd(p) + " defect ratio " + fmtd(ratio) + " below 1.5");
      }
      e["eps_ratios"] = rj;
    }
    pj.push_back(e);
    *c.log << "nittka: p = " << fmtd(p) << "  min shifted " << gj.back()["min_shifted"].dump();
    if (!eps.empty()) *c.log << "  eps " << fmtd(eps.back());
    *c.log << "\n";
  }
  j["p"] = pj;
  c.rep["nittka"] = j;
}

double metric_beta(const Scenario& sc) { return sc.mode.kind == HypMode::Kind::Kernel ? sc.mode.beta : 0.0; }

void section_distance(Ctx& c) {
  const SampledSystem& s = c.sampled();
  const BoxDomain& g = c.sc.grid;
  const double beta = metric_beta(c.sc);
  c.tm.start("distance");
  MetricField mf = weight_field(s.V, s.Q, g, beta);
  long src = nearest_node(g, c.sc.run.distance_source);
  DistanceMap dm = distance_map(mf, src, c.sc.run.stencil);
  Equivalence eq = euclid_equivalence_check(mf, s.Q);

  // property suite on a few extra sources
  std::mt19937_64 rng(c.sc.run.seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_int_distribution<long> pick(0, g.node_count() - 1);
  std::vector<DistanceMap> extra;
  for (int k = 0; k < 3; ++k) extra.push_back(distance_map(mf, pick(rng), c.sc.run.stencil));
  double sym = 0, tri = kInf;
  for (const auto& e : extra) {
    sym = std::max(sym, std::fabs(dm.dist[e.source] - e.dist[src]));
    for (long x = 0; x < g.node_count(); ++x) tri = std::min(tri, dm.dist[e.source] + e.dist[x] - dm.dist[x]);
  }
  for (size_t a = 0; a < extra.size(); ++a)
    for (size_t b = 0; b < extra.size(); ++b) sym = std::max(sym, std::fabs(extra[a].dist[extra[b].source] - extra[b].dist[extra[a].source]));
  c.tm.stop();
  double dmax = 0;
  for (double v : dm.dist) dmax = std::max(dmax, v);
  Json j;
  j["beta"] = num(beta);
  j["stencil"] = dm.stencil;
  j["source_node"] = src;
  std::vector<double> xs(g.d);
  g.coords(src, xs.data());
  j["source"] = xs;
  j["max_distance"] = num(dmax);
  j["equivalence"] = to_json(eq);
  bool sym_ok = sym <= 1e-12 * std::max(1.0, dmax);
  bool tri_ok = tri >= -1e-12 * std::max(1.0, dmax);
  j["symmetry"] = {{"max_gap", num(sym)}, {"pass", sym_ok}};
  j["triangle"] = {{"min_slack", num(tri)}, {"pass", tri_ok}};
  if (!sym_ok) c.fail("distance: symmetry gap " + fmtd(sym));
  if (!tri_ok) c.fail("distance: triangle inequality slack " + fmtd(tri));
  if (!eq.equivalent) c.note("distance: metric not equivalent to the Euclidean one on this grid");
  if (c.write) {
    c.tm.start("write_distance");
    write_atomic_with(c.path("distance.csv"), [&](const std::string& tmp) { write_distance_csv(tmp, dm, g); });
    c.tm.stop();
  }
  *c.log << "distance: beta " << fmtd(beta) << ", max " << fmtd(dmax) << ", q0 " << fmtd(eq.q0) << ", q1 "
         << fmtd(eq.q1) << "\n";
  c.rep["distance"] = j;
}

void section_kernel(Ctx& c) {
  const HypothesisReport& h = c.hypotheses();
  const DiscreteForm& F = c.discrete();
  const BoxDomain& g = c.sc.grid;
  const RunParams& r = c.sc.run;
  double dt = r.dt > 0 ? r.dt : default_dt(F);
  std::vector<double> times = r.kernel_times.empty() ? std::vector<double>{0.05, 0.1, 0.2} : r.kernel_times;
  std::sort(times.begin(), times.end());

  c.tm.start("kernel");
  long y = nearest_interior(g, r.kernel_source);
  long ynode = g.interior_to_node(y);
  MetricField mf = weight_field(c.sampled().V, c.sampled().Q, g, h.beta);
  DistanceMap dm = distance_map(mf, ynode, r.stencil);
  ConstantsBundle cb = kernel_constants(g.d, h.beta, h.kappa, h.c, h.nu0);
  Stepper st(F, r.scheme, dt);
  std::vector<KernelBlock> blocks = kernel_blocks(st, y, times, dm, cb);
  // second point for the duality check: a quarter box away along axis 0
  std::vector<int> mi = g.interior_multi(y);
  mi[0] = std::clamp(mi[0] + std::max(1, g.n[0] / 8), 1, g.n[0] - 1);
  long y2 = g.interior_index(mi);
  double sym = symmetry_check(st, times.front(), y, y2);
  c.tm.stop();

  Json j;
  j["constants"] = to_json(cb);
  j["dt"] = num(dt);
  j["scheme"] = scheme_name(r.scheme);
  std::vector<double> yx(g.d);
  g.coords(ynode, yx.data());
  j["source"] = yx;
  j["margin_cells"] = 5;
  Json bj = Json::array();
  for (const auto& b : blocks) {
    GaussianCheck gc = verify_gaussian(b, g);
    Json e = to_json(gc);
    e["t"] = num(b.t);
    bj.push_back(e);
    if (!gc.pass) c.fail("kernel: Gaussian bound violated at t = " + fmtd(b.t));
    *c.log << "kernel: t = " << fmtd(b.t) << "  min margin " << fmtd(gc.min_margin) << (gc.pass ? "  [pass]" : "  [FAIL]")
           << "\n";
  }
  j["blocks"] = bj;
  bool sym_ok = sym <= 1e-8;
  j["symmetry"] = {{"value", num(sym)}, {"tol", 1e-8}, {"pass", sym_ok}};
  if (!sym_ok) c.fail("kernel: duality symmetry gap " + fmtd(sym));
  if (c.write) {
    c.tm.start("write_kernel");
    write_atomic_with(c.path("kernel.csv"), [&](const std::string& tmp) { write_kernel_csv(tmp, blocks, g); });
    c.tm.stop();
  }
  c.rep["kernel"] = j;
}

Json header(const std::string& command) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = {{"name", "lpqlab"}, {"version", LPQ_VERSION}};
  j["command"] = command;
  return j;
}

void finish(Outcome& o, Json& rep, std::vector<std::string>& failures, std::vector<std::string>& findings,
            bool strict) {
  rep["checks"] = {{"failures", failures}, {"findings", findings}, {"strict", strict}};
  bool pass = failures.empty() && (!strict || findings.empty());
  rep["pass"] = pass;
  o.failures = failures;
  o.findings = findings;
  o.exit_code = pass ? kExitOk : kExitCheck;
  o.report = rep;
}

int run_gallery(const RunOptions& opt, Outcome& o, std::ostream& log) {
  Json rep = header("gallery");
  Json list = Json::array();
  for (const auto& e : gallery()) {
    Scenario sc = parse_scenario(e.text, "gallery:" + e.id);
    Json c = Json::object();
    for (const auto& [k, v] : e.closed) c[k] = num(v);
    list.push_back({{"id", e.id}, {"name", sc.name}, {"title", e.title}, {"mode", sc.mode.name()}, {"closed_form", c}});
  }
  rep["gallery"] = list;
  if (opt.list || opt.gallery_id.empty()) {
    for (const auto& e : gallery()) {
      log << e.id << "  " << e.title << "\n   ";
      for (const auto& [k, v] : e.closed) log << " " << k << " <= " << fmtd(v);
      log << "\n";
    }
  } else {
    const GalleryEntry& e = gallery_entry(opt.gallery_id);
    if (opt.write_files) {
      std::string path = (fs::path(opt.out) / (e.id + ".scn")).string();
      write_atomic(path, e.text);
      log << "wrote " << path << "\n";
    } else {
      log << e.text;
    }
    rep["selected"] = e.id;
  }
  std::vector<std::string> none;
  finish(o, rep, none, none, opt.strict);
  return o.exit_code;
}

int run_constants_interval(const RunOptions& opt, Outcome& o, std::ostream& log) {
  const auto& k = opt.constants;
  if (k.size() != 5) throw ConfigError("--constants", 0, 0, "expected kA,kB,kC,kW,gamma");
  Json rep = header("p-interval");
  std::vector<std::string> failures, findings;
  Json j;
  j["constants"] = {{"kappaA", k[0]}, {"kappaB", k[1]}, {"kappaC", k[2]}, {"kappaW", k[3]}, {"gamma", k[4]}};
  double K = K_value(k[1], k[2], k[3], k[4]);
  j["K"] = num(K);
  try {
    IntervalSpec I = admissible_interval(k[0], k[1], k[2], k[3], k[4]);
    bool agree = false;
    j["interval"] = interval_json(k[0], k[1], k[2], k[3], k[4], I, agree);
    log << I.str() << "\n" << (agree ? "matrix sweep agrees" : "matrix sweep DISAGREES") << "\n";
    if (!agree) failures.push_back("p-interval: closed-form endpoints disagree with the matrix sweep");
  } catch (const HypothesisViolation& e) {
    failures.push_back(std::string("p-interval: ") + e.what());
    log << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    throw ConfigError("--constants", 0, 0, e.what());
  }
  rep["p_interval"] = j;
  finish(o, rep, failures, findings, opt.strict);
  if (opt.write_files) write_json((fs::path(opt.out) / "report.json").string(), o.report);
  return o.exit_code;
}

}  // namespace

Outcome run(const std::string& command, const RunOptions& opt, std::ostream& log) {
  Outcome o;
  try {
    if (std::find(commands().begin(), commands().end(), command) == commands().end())
      throw ConfigError("<command>", 0, 0, "unknown subcommand '" + command + "'");
    if (command == "gallery") {
      run_gallery(opt, o, log);
      return o;
    }
    if (command == "p-interval" && opt.scenario.empty() && !opt.constants.empty()) {
      run_constants_interval(opt, o, log);
      return o;
    }
    if (opt.scenario.empty()) throw ConfigError("<command line>", 0, 0, "--scenario is required for " + command);
    if (opt.jobs < 1) throw ConfigError("--jobs", 0, 0, "jobs must be at least 1");

    Ctx c;
    c.log = &log;
    c.origin = opt.scenario;
    c.out = opt.out;
    c.write = opt.write_files;
    c.tm.start("load");
    c.sc = resolve_scenario(opt.scenario, opt.ov);
    c.tm.stop();
    if (command == "kernel" && c.sc.mode.kind != HypMode::Kind::Kernel)
      throw ConfigError(opt.scenario, 0, 0, "kernel analysis needs mode = kernel in [hypotheses]");

    c.rep = header(command);
    const BoxDomain& g = c.sc.grid;
    c.rep["scenario"] = {{"name", c.sc.name},
                         {"family", c.sc.family},
                         {"hash", scenario_hash(c.sc)},
                         {"d", g.d},
                         {"m", c.sc.sys.m},
                         {"lower", g.lower},
                         {"upper", g.upper},
                         {"cells", g.n},
                         {"mode", c.sc.mode.name()}};
    c.rep["seed"] = c.sc.run.seed;
    log << "scenario " << c.sc.name << " (" << scenario_hash(c.sc) << "), grid";
    for (int k = 0; k < g.d; ++k) log << (k ? "x" : " ") << g.n[k];
    log << ", m = " << c.sc.sys.m << "\n";

    const bool all = command == "all";
    if (all || command == "check-hypotheses") section_hypotheses(c);
    if (all || command == "p-interval") section_interval(c);
    if (all || command == "evolve") section_evolve(c);
    if (all || command == "nittka") section_nittka(c);
    if (all || command == "distance") section_distance(c);
    if (command == "kernel" || (all && c.sc.mode.kind == HypMode::Kind::Kernel)) section_kernel(c);
    if (opt.dump_matrices && c.write) {
      const DiscreteForm& F = c.discrete();
      write_atomic_with(c.path("S.triplets"), [&](const std::string& p) { write_triplets(p, F.S); });
      write_atomic_with(c.path("S_adjoint.triplets"),
                        [&](const std::string& p) { write_triplets(p, assemble_adjoint(c.sampled()).S); });
      write_atomic_with(c.path("M.triplets"), [&](const std::string& p) { write_mass(p, F); });
    }

    finish(o, c.rep, c.failures, c.findings, opt.strict);
    c.tm.stop();
    o.timings = c.tm.to_json();
    o.timings["jobs"] = opt.jobs;
    if (c.write) {
      write_json(c.path("report.json"), o.report);
      write_json(c.path("timings.json"), o.timings);
    }
    for (const auto& f : o.failures) log << "FAIL " << f << "\n";
    for (const auto& f : o.findings) log << "note " << f << "\n";
    log << (o.exit_code == kExitOk ? "pass" : "fail") << "\n";
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    o.exit_code = kExitConfig;
  } catch (const ParseError& e) {
    log << "error: " << e.what() << "\n";
    o.exit_code = kExitConfig;
  } catch (const DomainError& e) {
    log << "error: " << e.what() << "\n";
    o.exit_code = kExitConfig;
  } catch (const BlowUp& e) {
    log << "error: " << e.what() << "\n";
    o.exit_code = kExitCheck;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    o.exit_code = kExitInternal;
  }
  return o;
}

}  // namespace lpq
