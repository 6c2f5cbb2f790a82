#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lpq/form.hpp"
#include "lpq/gallery.hpp"
#include "lpq/metric.hpp"
#include "lpq/pipeline.hpp"

namespace py = pybind11;
using namespace lpq;

namespace {

py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::dict interval_dict(const IntervalSpec& s) {
  py::dict d;
  d["kind"] = IntervalSpec::kind_name(s.kind);
  d["lo"] = s.lo;
  d["hi"] = s.hi;
  d["text"] = s.str();
  return d;
}

Scenario scenario_from(const std::string& source) {
  if (source.find('\n') != std::string::npos) return parse_scenario(source, "<python>");
  return resolve_scenario(source, {});
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "L^p quasicontractivity laboratory";
  m.attr("__version__") = LPQ_VERSION;
  m.attr("SCHEMA_VERSION") = kSchemaVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ExprParseError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "ExprDomainError", PyExc_ArithmeticError);
  py::register_exception<HypothesisViolation>(m, "HypothesisViolation", PyExc_ValueError);

  m.def(
      "eval_expr",
      [](const std::string& text, std::vector<double> x) {
        Expr e = parse_expr(text, static_cast<int>(x.size()));
        return eval(e, x.data(), static_cast<int>(x.size()));
      },
      py::arg("text"), py::arg("x"));
  m.def(
      "print_expr", [](const std::string& text, int dim) { return print_expr(parse_expr(text, dim)); },
      py::arg("text"), py::arg("dim") = 0);

  m.def(
      "interval",
      [](double kA, double kB, double kC, double kW, double gamma) {
        return interval_dict(admissible_interval(kA, kB, kC, kW, gamma));
      },
      py::arg("kappaA"), py::arg("kappaB"), py::arg("kappaC"), py::arg("kappaW"), py::arg("gamma"));
  m.def(
      "psd_sweep",
      [](double kA, double kB, double kC, double kW, double gamma, std::vector<double> grid) {
        auto a = psd_sweep_Mgamma(kA, kB, kC, kW, gamma, grid);
        return std::vector<bool>(a.begin(), a.end());
      },
      py::arg("kappaA"), py::arg("kappaB"), py::arg("kappaC"), py::arg("kappaW"), py::arg("gamma"),
      py::arg("p_grid"));
  m.def("gamma_p", &gamma_p, py::arg("kappaA"), py::arg("kappaB"), py::arg("kappaC"), py::arg("kappaW"),
        py::arg("p"));
  m.def("psd_check_egamma", &psd_check_Egamma, py::arg("kappaA"), py::arg("kappaB"), py::arg("kappaC"),
        py::arg("kappaW"), py::arg("gamma"), py::arg("p"));
  m.def(
      "kernel_constants",
      [](int d, double beta, double kappa, double c, double nu0) {
        return to_py(to_json(kernel_constants(d, beta, kappa, c, nu0)));
      },
      py::arg("d"), py::arg("beta"), py::arg("kappa"), py::arg("c"), py::arg("nu0"));
  m.def(
      "gaussian_bound",
      [](int d, double beta, double kappa, double c, double nu0, double t, double dist) {
        return gaussian_bound_rhs(kernel_constants(d, beta, kappa, c, nu0), t, dist);
      },
      py::arg("d"), py::arg("beta"), py::arg("kappa"), py::arg("c"), py::arg("nu0"), py::arg("t"), py::arg("dist"));

  m.def("gallery", []() {
    py::list out;
    for (const auto& e : gallery()) {
      py::dict d;
      d["id"] = e.id;
      d["title"] = e.title;
      d["closed_form"] = e.closed;
      out.append(d);
    }
    return out;
  });
  m.def(
      "gallery_text", [](const std::string& id) { return gallery_entry(id).text; }, py::arg("id"));

  m.def(
      "scenario_hash", [](const std::string& source) { return scenario_hash(scenario_from(source)); },
      py::arg("scenario"));
  m.def(
      "canonical_text", [](const std::string& source) { return to_text(scenario_from(source)); }, py::arg("scenario"));

  m.def(
      "check_hypotheses",
      [](const std::string& source) {
        Scenario sc = scenario_from(source);
        return to_py(to_json(check_all(sample(sc.sys, sc.grid), sc.mode)));
      },
      py::arg("scenario"));

  m.def(
      "omega0",
      [](const std::string& source) {
        Scenario sc = scenario_from(source);
        return omega0(assemble(sample(sc.sys, sc.grid))).omega0;
      },
      py::arg("scenario"));

  m.def(
      "distance",
      [](const std::string& scenario, std::vector<double> point, int stencil) {
        Scenario sc = scenario_from(scenario);
        SampledSystem s = sample(sc.sys, sc.grid);
        double beta = sc.mode.kind == HypMode::Kind::Kernel ? sc.mode.beta : 0.0;
        MetricField f = weight_field(s.V, s.Q, sc.grid, beta);
        std::vector<int> mi(sc.grid.d);
        for (int k = 0; k < sc.grid.d; ++k)
          mi[k] = static_cast<int>(std::lround((point.at(k) - sc.grid.lower[k]) / sc.grid.h(k)));
        DistanceMap dm = distance_map(f, sc.grid.node_index(mi), stencil);
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(dm.dist.data(), dm.dist.size()));
      },
      py::arg("scenario"), py::arg("source"), py::arg("stencil") = 16);

  m.def(
      "run",
      [](const std::string& command, const std::string& scenario, const std::string& out, int grid, double dt,
         std::vector<double> p, long long seed, bool strict, bool write_files) {
        RunOptions o;
        o.scenario = scenario;
        o.out = out;
        o.ov.grid = grid;
        o.ov.dt = dt;
        o.ov.p = std::move(p);
        o.ov.seed = seed;
        o.strict = strict;
        o.write_files = write_files;
        std::ostringstream log;
        Outcome r;
        {
          py::gil_scoped_release release;
          r = lpq::run(command, o, log);
        }
        py::dict d;
        d["exit_code"] = r.exit_code;
        d["report"] = r.report.is_null() ? py::object(py::none()) : to_py(r.report);
        d["log"] = log.str();
        return d;
      },
      py::arg("command"), py::arg("scenario") = "", py::arg("out") = "lpq-out", py::arg("grid") = 0,
      py::arg("dt") = 0.0, py::arg("p") = std::vector<double>{}, py::arg("seed") = -1, py::arg("strict") = false,
      py::arg("write_files") = false);
}
