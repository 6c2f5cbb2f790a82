#pragma once

#include <string>

#include "lpq/scenario.hpp"

namespace lpqt {

// builds scenario text; op must hold the q.* entries
struct Spec {
  int d = 1;
  double lo = 0, hi = 1;
  int cells = 32;
  int m = 1;
  std::string op;
  std::string hyp = "mode = fixed\ngamma = 1\nCgamma = 1\n";
  std::string run;
};

inline std::string text(const Spec& s) {
  std::string t = "[domain]\nd = " + std::to_string(s.d) + "\nlower = " + std::to_string(s.lo) +
                  "\nupper = " + std::to_string(s.hi) + "\ncells = " + std::to_string(s.cells) + "\n\n";
  t += "[operator]\nm = " + std::to_string(s.m) + "\n" + s.op + "\n";
  t += "[hypotheses]\n" + s.hyp + "\n";
  t += "[run]\nseed = 1\n" + s.run;
  return t;
}

inline lpq::Scenario scenario(const Spec& s) { return lpq::parse_scenario(text(s), "<test>"); }

}  // namespace lpqt
