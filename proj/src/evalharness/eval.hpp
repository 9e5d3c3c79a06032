#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "planner/planner.hpp"
#include "scenesim/sampling.hpp"

namespace pgr::evalharness {

enum class Baseline : std::uint8_t {
  NoPregrasp = 0,
  RandomDirection,
  CenterPoint,
  OursNoClosedLoop,
  Ours,
};

Baseline baseline_from_string(const std::string& s);
std::string to_string(Baseline b);
const std::vector<Baseline>& all_baselines();

struct EvalSpec {
  std::vector<scenesim::SceneKind> scenes;
  std::vector<std::string> category_sets;  // train-hard | test-hard | ...
  std::vector<Baseline> baselines;
  int trials = 200;  // T, per (scene, set, baseline) cell
  std::uint64_t seed = 0;
};

struct EvalCell {
  scenesim::SceneKind scene;
  std::string category_set;
  Baseline baseline;
  int trials = 0;
  int successes = 0;
  int pushed = 0;  // trials in which at least one push was executed

  double success_rate() const { return double(successes) / trials; }
  double pregrasp_rate() const { return double(pushed) / trials; }
  // Normal-approximation 95% half-width.
  double half_width() const;
};

struct EvalReport {
  std::vector<EvalCell> cells;
  double average_success(Baseline b) const;  // mean over this baseline's cells
};

// Per-trial module construction: net-backed factories ignore the state;
// oracle stubs in tests bind to it.
class ModuleFactory {
 public:
  virtual ~ModuleFactory() = default;
  virtual std::unique_ptr<planner::GraspModule> grasp(
      const scenesim::SceneState& state) = 0;
  virtual std::unique_ptr<planner::PreGraspModule> pregrasp(
      const scenesim::SceneState& state) = 0;
};

class NetModuleFactory : public ModuleFactory {
 public:
  NetModuleFactory(const nets::ModuleNet<float>& grasp,
                   const nets::ModuleNet<float>& pregrasp, double push_max)
      : grasp_(grasp), pregrasp_(pregrasp), push_max_(push_max) {}
  std::unique_ptr<planner::GraspModule> grasp(
      const scenesim::SceneState&) override {
    return std::make_unique<planner::NetGraspModule>(grasp_);
  }
  std::unique_ptr<planner::PreGraspModule> pregrasp(
      const scenesim::SceneState&) override {
    return std::make_unique<planner::NetPreGraspModule>(pregrasp_, push_max_);
  }

 private:
  const nets::ModuleNet<float>& grasp_;
  const nets::ModuleNet<float>& pregrasp_;
  double push_max_;
};

// The baseline's push decision on a freshly rendered (world-frame) cloud.
// NoPregrasp never pushes; the others vary the contact / displacement rule.
struct PushDecision {
  bool push = false;
  scenesim::PreGraspAction action;
};
PushDecision baseline_push(Baseline kind, const scenesim::SceneState& state,
                           const cloudgen::LabeledPointCloud& world_cloud,
                           planner::PreGraspModule& module,
                           const planner::PlannerConfig& cfg,
                           std::uint64_t seed);

struct TrialResult {
  bool success = false;
  bool pushed = false;
};
TrialResult run_trial(Baseline kind, const scenesim::SceneState& state,
                      ModuleFactory& factory,
                      const planner::PlannerConfig& cfg, std::uint64_t seed);

// Full grid: one cell per (scene, category set, baseline), T trials each.
// Simulator/render errors count as failures; nothing is thrown per trial.
EvalReport run_eval(const EvalSpec& spec, ModuleFactory& factory,
                    const planner::PlannerConfig& cfg);

// Table IV analogue: pre-grasping rate and success rate of the full policy
// ("ours") at each threshold, split by category set.
struct SweepRow {
  double theta_g = 0;
  double graspable_pregrasp_rate = 0;
  double graspable_success_rate = 0;
  double ungraspable_pregrasp_rate = 0;
  double ungraspable_success_rate = 0;
};
std::vector<SweepRow> compatibility_sweep(
    ModuleFactory& factory, const std::vector<std::string>& graspable,
    const std::vector<std::string>& ungraspable,
    const std::vector<double>& theta_grid, scenesim::SceneKind scene,
    int trials, const planner::PlannerConfig& cfg, std::uint64_t seed);

std::string report_csv(const EvalReport& report);
nlohmann::json report_json(const EvalReport& report);
std::string report_table(const EvalReport& report);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace pgr::evalharness
