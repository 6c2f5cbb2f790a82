#include "lpq/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace lpq {

Json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json to_json(const Witness& w) {
  Json j;
  j["node"] = w.node;
  j["x"] = w.x;
  j["value"] = num(w.value);
  return j;
}

Json to_json(const HypothesisReport& r) {
  Json j;
  j["mode"] = r.mode.name();
  j["nodes"] = r.nodes;
  j["estimate"] = "grid";
  j["v0"] = num(r.v0);
  j["c0"] = num(r.c0);
  j["kappaA"] = num(r.kA);
  j["kappaB"] = num(r.kB);
  j["kappaC"] = num(r.kC);
  j["kappaW"] = num(r.kW);
  j["lambdaQ_min"] = num(r.lambdaQ_min);
  j["A_re_min"] = num(r.A_re_min);
  switch (r.mode.kind) {
    case HypMode::Kind::Fixed:
      j["gamma"] = num(r.gamma);
      j["Cgamma"] = num(r.Cgamma);
      j["K"] = num(r.K);
      j["best_gamma"] = num(r.best_gamma);
      j["best_K"] = num(r.best_K);
      break;
    case HypMode::Kind::Refined:
      j["phi"] = {{"a", r.mode.a}, {"b", r.mode.b}};
      j["gamma_sup"] = {{"B", num(r.gamma_sup_B)}, {"C", num(r.gamma_sup_C)}, {"W", num(r.gamma_sup_W)}};
      break;
    case HypMode::Kind::Kernel:
      j["beta"] = num(r.beta);
      j["c"] = num(r.c);
      j["kappa"] = num(r.kappa);
      j["nu0"] = num(r.nu0);
      j["gamma_sup"] = {{"B", num(r.gamma_sup_B)}, {"C", num(r.gamma_sup_C)}};
      break;
  }
  Json f = Json::object();
  for (const auto& [k, v] : r.flags) f[k] = v;
  j["flags"] = f;
  j["pass"] = r.pass();
  Json w = Json::object();
  for (const auto& [k, v] : r.worst) w[k] = to_json(v);
  j["worst"] = w;
  if (!r.A_witness.empty()) j["A_witness"] = r.A_witness;
  return j;
}

Json to_json(const IntervalSpec& s) {
  Json j;
  j["kind"] = IntervalSpec::kind_name(s.kind);
  j["lo"] = num(s.lo);
  j["hi"] = num(s.hi);
  j["text"] = s.str();
  return j;
}

Json to_json(const ConstantsBundle& b) {
  Json j;
  j["d"] = b.d;
  j["beta"] = num(b.beta);
  j["kappa"] = num(b.kappa);
  j["c"] = num(b.c);
  j["nu0"] = num(b.nu0);
  j["r"] = num(b.r);
  j["rstar"] = num(b.rstar);
  j["A"] = num(b.moser.A);
  j["B"] = num(b.moser.B);
  j["B_terms"] = b.moser.B_terms;
  j["L"] = num(b.moser.L);
  j["Hhat"] = num(b.Hhat);
  j["H"] = num(b.H);
  j["H1"] = num(b.H1);
  j["sobolev"] = num(b.sobolev);
  j["C0"] = num(b.C0);
  j["C1"] = num(b.C1);
  j["C2"] = num(b.C2);
  return j;
}

Json to_json(const GrowthTrace& g) {
  Json j;
  j["p"] = num(g.p);
  j["max_slope"] = num(g.max_slope);
  j["refined_slope"] = num(g.refined_slope);
  j["measured"] = num(g.measured());
  j["worst_sample"] = g.worst_sample;
  j["worst_t"] = num(g.worst_t);
  j["bound"] = num(g.bound);
  j["tol"] = num(g.tol);
  j["pass"] = g.pass;
  return j;
}

Json to_json(const GaussianCheck& g) {
  Json j;
  j["min_margin"] = num(g.min_margin);
  j["checked"] = g.checked;
  j["violations"] = g.violations;
  j["worst_node"] = g.worst_node;
  j["worst_value"] = num(g.worst_value);
  j["worst_rhs"] = num(g.worst_rhs);
  j["worst_dist"] = num(g.worst_dist);
  j["ondiag_value"] = num(g.ondiag_value);
  j["ondiag_rhs"] = num(g.ondiag_rhs);
  j["pass"] = g.pass;
  return j;
}

Json to_json(const Equivalence& e) {
  return Json{{"q0", num(e.q0)}, {"q1", num(e.q1)}, {"equivalent", e.equivalent}};
}

void write_atomic_with(const std::string& path, const std::function<void(const std::string&)>& writer) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  std::string tmp = path + ".tmp";
  writer(tmp);
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move " + tmp + " to " + path + ": " + ec.message());
  }
}

void write_atomic(const std::string& path, const std::string& content) {
  write_atomic_with(path, [&](const std::string& tmp) {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  });
}

void write_json(const std::string& path, const Json& j) { write_atomic(path, j.dump(2) + "\n"); }

void Timings::start(const std::string& name) {
  if (running_) stop();
  cur_ = name;
  t0_ = Clock::now();
  running_ = true;
}

void Timings::stop() {
  if (!running_) return;
  done_.emplace_back(cur_, std::chrono::duration<double>(Clock::now() - t0_).count());
  running_ = false;
}

double Timings::total() const {
  double s = 0;
  for (const auto& [n, v] : done_) s += v;
  return s;
}

Json Timings::to_json() const {
  Json j = Json::object();
  for (const auto& [n, v] : done_) j[n] = v;
  j["total"] = total();
  return j;
}

}  // namespace lpq
