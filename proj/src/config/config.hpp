#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "datagen/collect.hpp"
#include "evalharness/eval.hpp"
#include "planner/planner.hpp"
#include "relaytrain/train.hpp"

namespace pgr::config {

// One document drives every subcommand: shared simulator / renderer
// parameters plus per-stage groups. Unknown keys are rejected.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::size_t cloud_n = 256;

  scenesim::SimParams sim;
  scenesim::PlacementConfig placement;
  scenesim::GraspOracleConfig oracle;

  // datagen
  std::uint64_t grasp_success = 2000, grasp_failure = 6000;
  std::vector<scenesim::SceneKind> grasp_scenes;
  std::vector<std::string> grasp_categories;
  datagen::GraspCollectConfig grasp_collect;

  std::uint64_t pregrasp_success = 2000, pregrasp_failure = 6000;
  std::vector<scenesim::SceneKind> pregrasp_scenes;
  std::vector<std::string> pregrasp_categories;
  datagen::PreGraspCollectConfig pregrasp_collect;

  relaytrain::TrainConfig train;
  planner::PlannerConfig planner;
  evalharness::EvalSpec eval;

  // compatibility sweep
  std::vector<double> theta_grid{0.2, 0.4, 0.6, 0.8, 0.95};
  std::vector<std::string> sweep_graspable;
  std::vector<std::string> sweep_ungraspable;
  scenesim::SceneKind sweep_scene = scenesim::SceneKind::Edge;
  int sweep_trials = 100;
};

// Defaults for every field; the normalized form always contains all keys.
RunConfig default_config();

// Strict parse: rejects unknown keys anywhere in the document and
// re-derives the dependent sub-configs (shared sim/oracle/cloud size).
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);

// Read a JSON file (empty path: defaults), then apply the PGR_SEED
// environment override if set.
RunConfig load_config(const std::string& path);

// CRC-32 of the normalized document, as 8 hex digits; embedded in outputs.
std::string config_hash(const RunConfig& cfg);

}  // namespace pgr::config
