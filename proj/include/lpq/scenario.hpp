#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpq/coeff.hpp"
#include "lpq/evolution.hpp"
#include "lpq/hypotheses.hpp"

namespace lpq {

class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& origin, int line, int col, const std::string& msg)
      : std::runtime_error(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line_(line), col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

private:
  int line_, col_;
};

struct RunParams {
  std::vector<double> p;              // empty: derived from the interval
  double t_final = 0.5;
  double dt = 0;                      // 0: default_dt
  Scheme scheme = Scheme::ImplicitEuler;
  int samples = 20;
  int checkpoints = 50;
  int kmax = 6;
  int refine_iters = 2;
  double refine_horizon = 0.1;
  double tol_scale = 0.05;
  std::vector<double> kernel_times;
  std::vector<double> kernel_source;  // coordinates; empty: box centre
  std::vector<double> distance_source;
  int stencil = 16;
  std::vector<int> nittka_grids;
  int nittka_samples = 20;
  int reference_grid = 256;
  int probe_pairs = 200;
  unsigned long seed = 0;
  bool has_seed = false;
};

struct Scenario {
  std::string name = "unnamed";
  std::string family;  // gallery tag, empty for user files
  CoefficientSystem sys;
  BoxDomain grid;
  HypMode mode;
  RunParams run;
  std::map<std::string, std::string> tables;  // block key -> csv path
};

Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::string& path);
// canonical text; parse_scenario(to_text(s)) reproduces s
std::string to_text(const Scenario& s);

std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);
std::string scenario_hash(const Scenario& s);

struct Overrides {
  int grid = 0;
  double dt = 0;
  std::vector<double> p;
  long long seed = -1;
};
// applies CLI overrides; grid override is rejected for table-backed blocks
void apply_overrides(Scenario& s, const Overrides& o);

std::vector<double> parse_number_list(const std::string& text);

}  // namespace lpq
