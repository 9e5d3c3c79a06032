#include "planner/planner.hpp"

#include "core/error.hpp"

namespace pgr::planner {

void NetGraspModule::prepare(const cloudgen::LabeledPointCloud& cloud) {
  cloud_ = &cloud;
  fs_ = net_.encode(cloud);
}

double NetGraspModule::affordance(int p) {
  return double(
      net_.affordance(fs_.col(p), net_.point_embed(cloud_->points[p])));
}

GraspCandidate NetGraspModule::sample_action(int p, Rng& rng) {
  const nets::MatX<float> fp = net_.point_embed(cloud_->points[p]);
  nets::MatX<float> z(nets::kLatentDim, 1);
  for (int r = 0; r < nets::kLatentDim; ++r) z(r, 0) = float(rng.normal());
  GraspCandidate c;
  c.point = p;
  c.euler = net_.propose_orientation(fs_.col(p), fp, z, Vec3(0, 0, 1));
  const nets::MatX<float> fm =
      net_.action_embed(nets::ModuleNet<float>::orientation_input(c.euler));
  c.score = double(net_.critic(fs_.col(p), fp, fm));
  return c;
}

void NetPreGraspModule::prepare(const cloudgen::LabeledPointCloud& cloud) {
  cloud_ = &cloud;
  fs_ = net_.encode(cloud);
}

double NetPreGraspModule::affordance(int p) {
  return double(
      net_.affordance(fs_.col(p), net_.point_embed(cloud_->points[p])));
}

PreGraspCandidate NetPreGraspModule::sample_action(int p, Rng& rng) {
  const nets::MatX<float> fp = net_.point_embed(cloud_->points[p]);
  nets::MatX<float> z(nets::kLatentDim, 1);
  for (int r = 0; r < nets::kLatentDim; ++r) z(r, 0) = float(rng.normal());
  PreGraspCandidate c;
  c.point = p;
  c.displacement = net_.propose_push(fs_.col(p), fp, z, push_max_);
  const nets::MatX<float> fm = net_.action_embed(
      nets::ModuleNet<float>::displacement_input(c.displacement));
  c.score = double(net_.critic(fs_.col(p), fp, fm));
  return c;
}

NecessityResult necessity_check(const cloudgen::LabeledPointCloud& canonical,
                                relaytrain::GraspScorer& grasp,
                                const PlannerConfig& cfg, std::uint64_t seed) {
  NecessityResult res;
  res.c2 = relaytrain::estimate_c2(canonical, grasp, cfg.n2, cfg.m2, seed);
  res.skip = res.c2 > cfg.theta_g;
  return res;
}

namespace {

// Shared argmax over the materialized candidate set: the top-n affordance
// object points, m latent draws each, critic ties toward the lowest index.
template <typename Module, typename Candidate>
Candidate propose(const cloudgen::LabeledPointCloud& cloud, Module& module,
                  int n, int m, std::uint64_t seed) {
  module.prepare(cloud);
  const std::vector<int> ranked =
      relaytrain::ranked_object_points(cloud, module);
  if (ranked.empty()) throw Error(Err::NoObjectPoints, "no object points");
  const int take = std::min<int>(n, int(ranked.size()));
  Rng rng(mix_seed(seed, 0x9e1e));
  Candidate best;
  for (int u = 0; u < take; ++u) {
    for (int k = 0; k < m; ++k) {
      const Candidate c = module.sample_action(ranked[u], rng);
      if (best.point < 0 || c.score > best.score ||
          (c.score == best.score && c.point < best.point))
        best = c;
    }
  }
  return best;
}

}  // namespace

GraspCandidate propose_grasp(const cloudgen::LabeledPointCloud& canonical,
                             GraspModule& module, int n, int m,
                             std::uint64_t seed) {
  return propose<GraspModule, GraspCandidate>(canonical, module, n, m, seed);
}

PreGraspCandidate propose_pregrasp(
    const cloudgen::LabeledPointCloud& canonical, PreGraspModule& module,
    int n, int m, std::uint64_t seed) {
  return propose<PreGraspModule, PreGraspCandidate>(canonical, module, n, m,
                                                    seed);
}

std::vector<double> affordance_map(const cloudgen::LabeledPointCloud& cloud,
                                   relaytrain::GraspScorer& module) {
  module.prepare(cloud);
  std::vector<double> scores(cloud.points.size(), 0.0);
  for (int i = 0; i < int(cloud.points.size()); ++i)
    if (cloud.labels[i] == cloudgen::kLabelObject)
      scores[i] = module.affordance(i);
  return scores;
}

namespace {

const char* safety_name(scenesim::SafetyEvent s) {
  switch (s) {
    case scenesim::SafetyEvent::None: return "none";
    case scenesim::SafetyEvent::ObjectFell: return "object_fell";
    case scenesim::SafetyEvent::GripperWallCollision: return "wall_collision";
    case scenesim::SafetyEvent::GripperSlopeCollision:
      return "slope_collision";
  }
  return "unknown";
}

}  // namespace

nlohmann::json trace_to_json(const PlanTrace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (const PlanStep& s : trace.steps) {
    nlohmann::json j{{"c2", s.c2},
                     {"decision", s.push ? "push" : "grasp"},
                     {"forced", s.forced},
                     {"safety", safety_name(s.safety)}};
    if (!s.error.empty()) j["error"] = s.error;
    if (s.push)
      j["action"] = {{"contact",
                      {s.push_action.contact.x(), s.push_action.contact.y(),
                       s.push_action.contact.z()}},
                     {"displacement",
                      {s.push_action.displacement.x(),
                       s.push_action.displacement.y()}}};
    else if (s.error.empty())
      j["action"] = {{"contact",
                      {s.grasp_action.contact.x(), s.grasp_action.contact.y(),
                       s.grasp_action.contact.z()}},
                     {"euler",
                      {s.grasp_action.euler.x(), s.grasp_action.euler.y(),
                       s.grasp_action.euler.z()}}};
    steps.push_back(std::move(j));
  }
  return nlohmann::json{{"trace_schema_version", 1},
                        {"steps", std::move(steps)},
                        {"aborted", trace.aborted},
                        {"r", trace.r}};
}

std::string trace_to_string(const PlanTrace& trace) {
  return trace_to_json(trace).dump(2);
}

PlanTrace closed_loop(scenesim::SceneState state, GraspModule& grasp,
                      PreGraspModule& pregrasp, const PlannerConfig& cfg) {
  PlanTrace trace;
  for (int iter = 0; iter <= cfg.max_iterations; ++iter) {
    const std::uint64_t it_seed = mix_seed(cfg.seed, 0x100 + iter);
    PlanStep step;
    cloudgen::LabeledPointCloud canonical;
    Vec3 centroid{0, 0, 0};
    try {
      const auto camera =
          cloudgen::sample_camera(state, mix_seed(it_seed, 1));
      const auto cloud = cloudgen::render_cloud(state, camera, cfg.cloud_n,
                                                mix_seed(it_seed, 2));
      centroid = cloudgen::object_centroid(cloud);
      canonical = cloudgen::canonicalize(cloud);
    } catch (const Error& e) {
      step.error = e.what();
      trace.steps.push_back(std::move(step));
      trace.aborted = true;
      return trace;
    }

    grasp.set_frame_origin(centroid);
    pregrasp.set_frame_origin(centroid);
    const NecessityResult nc =
        necessity_check(canonical, grasp, cfg, mix_seed(it_seed, 3));
    step.c2 = nc.c2;
    const bool cap = iter == cfg.max_iterations;

    try {
      if (nc.skip || cap) {
        const GraspCandidate c = propose_grasp(canonical, grasp, cfg.n2,
                                               cfg.m2, mix_seed(it_seed, 4));
        step.forced = !nc.skip;
        step.grasp_action.contact = canonical.points[c.point] + centroid;
        step.grasp_action.euler = c.euler;
        const auto [r, safety] = scenesim::grasp_outcome(
            state, step.grasp_action, cfg.oracle, cfg.sim);
        step.safety = safety;
        trace.r = r;
        trace.steps.push_back(std::move(step));
        return trace;
      }
      const PreGraspCandidate c = propose_pregrasp(
          canonical, pregrasp, cfg.n1, cfg.m1, mix_seed(it_seed, 4));
      step.push = true;
      step.push_action.contact = canonical.points[c.point] + centroid;
      step.push_action.displacement = c.displacement;
      const auto outcome = scenesim::apply_push(state, step.push_action,
                                                cfg.push_steps, cfg.sim);
      step.safety = outcome.safety;
      trace.steps.push_back(std::move(step));
      if (outcome.safety != scenesim::SafetyEvent::None) {
        trace.aborted = true;
        return trace;
      }
      state.pose = outcome.new_pose;
    } catch (const Error& e) {
      step.error = e.what();
      trace.steps.push_back(std::move(step));
      trace.aborted = true;
      return trace;
    }
  }
  return trace;  // unreachable: the cap branch always returns
}

}  // namespace pgr::planner
