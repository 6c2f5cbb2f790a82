#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lpq/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"lpqlab: L^p quasicontractivity laboratory for elliptic systems"};
  app.set_version_flag("--version", std::string(LPQ_VERSION));
  app.require_subcommand(1);

  lpq::RunOptions opt;
  std::string p_list;
  std::string constants;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", opt.scenario, "scenario file, or gallery:<id>");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--grid", opt.ov.grid, "cells per axis (overrides the scenario)");
    sub->add_option("--dt", opt.ov.dt, "time step");
    sub->add_option("--p", p_list, "comma separated exponents");
    sub->add_option("--seed", opt.ov.seed, "random seed");
    sub->add_option("--jobs", opt.jobs, "worker count")->capture_default_str();
    sub->add_flag("--strict", opt.strict, "turn findings into failures");
    sub->add_flag("--dump-matrices", opt.dump_matrices, "write S, adjoint S and M as triplet files");
  };

  for (const auto& name : lpq::commands()) {
    CLI::App* sub = app.add_subcommand(name);
    common(sub);
    if (name == "gallery") {
      sub->add_flag("--list", opt.list, "list the built-in scenarios");
      sub->add_option("id", opt.gallery_id, "scenario to export");
    }
    if (name == "p-interval") sub->add_option("--constants", constants, "kA,kB,kC,kW,gamma (no scenario needed)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : lpq::kExitConfig;
  }

  try {
    if (!p_list.empty()) opt.ov.p = lpq::parse_number_list(p_list);
    if (!constants.empty()) opt.constants = lpq::parse_number_list(constants);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lpq::kExitConfig;
  }

  std::string command = app.get_subcommands().front()->get_name();
  lpq::Outcome o = lpq::run(command, opt, std::cout);
  return o.exit_code;
}
