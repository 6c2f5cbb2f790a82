#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lpq/evolution.hpp"
#include "lpq/hypotheses.hpp"
#include "lpq/interval.hpp"
#include "lpq/kernel.hpp"
#include "lpq/metric.hpp"

namespace lpq {

using Json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

// non-finite values become the strings "inf", "-inf", "nan"
Json num(double v);
Json to_json(const Witness& w);
Json to_json(const HypothesisReport& r);
Json to_json(const IntervalSpec& s);
Json to_json(const ConstantsBundle& b);
Json to_json(const GrowthTrace& g);
Json to_json(const GaussianCheck& g);
Json to_json(const Equivalence& e);

// write to a sibling temporary, then rename over the target
void write_atomic(const std::string& path, const std::string& content);
// same, for writers that take a path
void write_atomic_with(const std::string& path, const std::function<void(const std::string&)>& writer);
void write_json(const std::string& path, const Json& j);

class Timings {
public:
  void start(const std::string& name);
  void stop();
  double total() const;
  Json to_json() const;

private:
  using Clock = std::chrono::steady_clock;
  std::vector<std::pair<std::string, double>> done_;
  std::string cur_;
  Clock::time_point t0_;
  bool running_ = false;
};

}  // namespace lpq
