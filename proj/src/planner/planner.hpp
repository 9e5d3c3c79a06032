#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "relaytrain/scorer.hpp"
#include "scenesim/scene.hpp"

namespace pgr::planner {

struct PlannerConfig {
  double theta_g = 0.8;        // necessity-check threshold
  int n1 = 10, m1 = 10;        // pre-grasp candidate points / latents
  int n2 = 10, m2 = 10;        // grasp candidate points / latents
  int max_iterations = 5;      // K: push cap before the grasp is forced
  std::uint64_t seed = 0;
  std::size_t cloud_n = 256;   // points rendered per loop iteration
  int push_steps = 100;
  scenesim::SimParams sim;
  scenesim::GraspOracleConfig oracle;
};

struct PreGraspCandidate {
  int point = -1;              // index into the canonical cloud
  Vec2 displacement{0, 0};
  double score = 0;            // critic score of the selected pair
};

struct GraspCandidate {
  int point = -1;
  Vec3 euler{0, 0, 0};
  double score = 0;
};

// Planner-facing module interfaces: the estimator interface plus
// action-returning sampling. Tests substitute analytic stubs.
class GraspModule : public relaytrain::GraspScorer {
 public:
  virtual GraspCandidate sample_action(int point_index, Rng& rng) = 0;
  double sample_and_score(int p, Rng& rng) final {
    return sample_action(p, rng).score;
  }
};

class PreGraspModule : public relaytrain::GraspScorer {
 public:
  virtual PreGraspCandidate sample_action(int point_index, Rng& rng) = 0;
  double sample_and_score(int p, Rng& rng) final {
    return sample_action(p, rng).score;
  }
};

// Grasp-net-backed module (proposal hemisphere around +z, matching training).
class NetGraspModule : public GraspModule {
 public:
  explicit NetGraspModule(const nets::ModuleNet<float>& net) : net_(net) {}
  void prepare(const cloudgen::LabeledPointCloud& cloud) override;
  double affordance(int p) override;
  GraspCandidate sample_action(int p, Rng& rng) override;

 private:
  const nets::ModuleNet<float>& net_;
  const cloudgen::LabeledPointCloud* cloud_ = nullptr;
  nets::MatX<float> fs_;
};

class NetPreGraspModule : public PreGraspModule {
 public:
  NetPreGraspModule(const nets::ModuleNet<float>& net, double push_max)
      : net_(net), push_max_(push_max) {}
  void prepare(const cloudgen::LabeledPointCloud& cloud) override;
  double affordance(int p) override;
  PreGraspCandidate sample_action(int p, Rng& rng) override;

 private:
  const nets::ModuleNet<float>& net_;
  double push_max_;
  const cloudgen::LabeledPointCloud* cloud_ = nullptr;
  nets::MatX<float> fs_;
};

struct NecessityResult {
  bool skip = false;
  double c2 = 0;
};

// skip = (c2 > theta_g), strict; c2 is the top-n2 x m2 critic mean.
NecessityResult necessity_check(const cloudgen::LabeledPointCloud& canonical,
                                relaytrain::GraspScorer& grasp,
                                const PlannerConfig& cfg, std::uint64_t seed);

// Argmax of the critic over the top-n affordance object points x m latents.
// Ties break toward the lowest point index. Throws NoObjectPoints.
GraspCandidate propose_grasp(const cloudgen::LabeledPointCloud& canonical,
                             GraspModule& module, int n, int m,
                             std::uint64_t seed);
PreGraspCandidate propose_pregrasp(
    const cloudgen::LabeledPointCloud& canonical, PreGraspModule& module,
    int n, int m, std::uint64_t seed);

// Per-point affordance scores aligned with the cloud; environment points 0.
std::vector<double> affordance_map(const cloudgen::LabeledPointCloud& cloud,
                                   relaytrain::GraspScorer& module);

struct PlanStep {
  double c2 = 0;                   // estimate before the decision
  bool push = false;               // decision: push (true) or grasp (false)
  bool forced = false;             // grasp forced by the iteration cap
  scenesim::PreGraspAction push_action;  // valid when push
  scenesim::GraspAction grasp_action;    // valid on the grasp step
  scenesim::SafetyEvent safety = scenesim::SafetyEvent::None;
  std::string error;               // recorded error, if any
};

struct PlanTrace {
  std::vector<PlanStep> steps;
  bool aborted = false;            // safety violation or recorded error
  int r = 0;                       // terminal grasp result
};

nlohmann::json trace_to_json(const PlanTrace& trace);
std::string trace_to_string(const PlanTrace& trace);

// Render -> necessity check -> push or grasp, at most K pushes; the grasp is
// forced once the cap is hit. Errors are recorded in the trace, never thrown.
PlanTrace closed_loop(scenesim::SceneState state, GraspModule& grasp,
                      PreGraspModule& pregrasp, const PlannerConfig& cfg);

}  // namespace pgr::planner
