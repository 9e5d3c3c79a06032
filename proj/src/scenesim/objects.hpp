#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scenesim/types.hpp"

namespace pgr::scenesim {

struct CategorySpec {
  std::string name;
  bool hard = true;   // hard-to-grasp (thin plate) vs easy (tall, narrow)
  bool train = true;  // seen during training vs held-out
};

const std::vector<CategorySpec>& category_table();

// set: train-hard | test-hard | train-easy | test-easy
std::vector<std::string> category_set(const std::string& set);

// Procedural instance; the seed jitters scale and outline so each category
// yields a family of shapes.
ObjectModel make_object(const std::string& category, std::uint64_t seed);

}  // namespace pgr::scenesim
