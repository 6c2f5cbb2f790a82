#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "lpq/report.hpp"
#include "lpq/scenario.hpp"

namespace lpq {

enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitConfig = 2, kExitCheck = 3 };

struct RunOptions {
  std::string scenario;  // file path, or gallery:<id>
  std::string out = "lpq-out";
  Overrides ov;
  int jobs = 1;
  bool strict = false;
  bool list = false;                // gallery --list
  std::string gallery_id;           // gallery <id>
  std::vector<double> constants;    // p-interval without a scenario: kA, kB, kC, kW, gamma
  bool write_files = true;
  bool dump_matrices = false;       // S, adjoint S and M as 1-based triplets
};

struct Outcome {
  Json report;
  Json timings;
  std::vector<std::string> failures, findings;
  int exit_code = kExitOk;
};

const std::vector<std::string>& commands();
// never throws; configuration problems map to kExitConfig
Outcome run(const std::string& command, const RunOptions& opt, std::ostream& log);

// scenario from a path or gallery:<id>, overrides applied
Scenario resolve_scenario(const std::string& source, const Overrides& ov);

}  // namespace lpq
