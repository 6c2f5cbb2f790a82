#pragma once

#include <map>
#include <string>
#include <vector>

#include "lpq/scenario.hpp"

namespace lpq {

struct GalleryEntry {
  std::string id;     // G1..G6, G6b
  std::string title;
  std::string text;   // scenario source
  // closed-form upper bounds for estimated constants, keyed like the report
  std::map<std::string, double> closed;
};

const std::vector<GalleryEntry>& gallery();
const GalleryEntry& gallery_entry(const std::string& id);
Scenario gallery_scenario(const std::string& id);

}  // namespace lpq
