#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lpq/gallery.hpp"
#include "lpq/pipeline.hpp"
#include "testing.hpp"

using namespace lpq;

namespace {
ConfigError config_error(const std::string& text) {
  try {
    parse_scenario(text, "t.scn");
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("no error for:\n" << text);
  return ConfigError("", 0, 0, "");
}

const char* kBase = R"([domain]
d = 1
lower = 0
upper = 1
cells = 8

[operator]
m = 1
q.11 = "1"
v.11 = "2"

[run]
seed = 3
)";
}  // namespace

TEST_CASE("scenario: parse minimal file") {
  Scenario s = parse_scenario(kBase);
  CHECK(s.grid.n[0] == 8);
  CHECK(s.run.seed == 3);
  CHECK(s.mode.kind == HypMode::Kind::Fixed);
}

TEST_CASE("scenario: errors point at line and column") {
  std::string t = kBase;
  ConfigError e = config_error(t + "t_final = -1\n");
  CHECK(e.line() == 14);
  CHECK(e.col() == 11);

  std::string bad = t;
  bad.replace(bad.find("\"2\""), 3, "\"2 +\"");
  ConfigError e2 = config_error(bad);
  CHECK(e2.line() == 10);
  CHECK(e2.col() == 12);

  CHECK(config_error(t + "seed = 4\n").line() == 14);
  CHECK(config_error(t + "bogus = 1\n").col() == 1);
  std::string noseed = t.substr(0, t.find("seed"));
  config_error(noseed);
  config_error(std::string(kBase).replace(std::string(kBase).find("\"2\""), 3, "2"));
  config_error("[nope]\n");
}

TEST_CASE("scenario: canonical text round trip and hash") {
  for (const auto& g : gallery()) {
    Scenario s = gallery_scenario(g.id);
    std::string t = to_text(s);
    Scenario r = parse_scenario(t);
    CHECK(to_text(r) == t);
    CHECK(scenario_hash(r) == scenario_hash(s));
    CHECK(scenario_hash(s).size() == 16);
  }
  CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
  CHECK(scenario_hash(gallery_scenario("G1")) != scenario_hash(gallery_scenario("G2")));
}

TEST_CASE("scenario: overrides") {
  Scenario s = gallery_scenario("G1");
  Overrides o;
  o.grid = 10;
  o.dt = 0.01;
  o.p = {3.0};
  o.seed = 99;
  apply_overrides(s, o);
  CHECK(s.grid.n[0] == 10);
  CHECK(s.run.dt == 0.01);
  CHECK(s.run.p == std::vector<double>{3.0});
  CHECK(s.run.seed == 99);
  CHECK(parse_number_list("1, 2.5,3") == std::vector<double>{1, 2.5, 3});
  CHECK_THROWS(parse_number_list("1,,2"));
}

TEST_CASE("scenario: tables") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "lpq_table_test";
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "v.csv");
    for (int i = 0; i <= 4; ++i) f << 1 + i << "\n";
  }
  std::string t = "[domain]\nd = 1\nlower = 0\nupper = 1\ncells = 4\n\n[operator]\nm = 1\nq.11 = \"1\"\ntable.v = \"" +
                  (dir / "v.csv").string() + "\"\n\n[run]\nseed = 1\n";
  Scenario s = parse_scenario(t);
  SampledSystem ss = sample(s.sys, s.grid);
  CHECK(ss.V.values[3](0, 0) == 4.0);
  Overrides o;
  o.grid = 8;
  CHECK_THROWS_AS(apply_overrides(s, o), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("gallery entries") {
  CHECK(gallery().size() == 7);
  CHECK(gallery_entry("G4").closed.at("kappaA") == 0.4);
  CHECK_THROWS(gallery_entry("G9"));
}
