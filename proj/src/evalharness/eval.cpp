#include "evalharness/eval.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "core/error.hpp"

namespace pgr::evalharness {

Baseline baseline_from_string(const std::string& s) {
  if (s == "no_pregrasp") return Baseline::NoPregrasp;
  if (s == "random_direction") return Baseline::RandomDirection;
  if (s == "center_point") return Baseline::CenterPoint;
  if (s == "ours_no_closed_loop") return Baseline::OursNoClosedLoop;
  if (s == "ours") return Baseline::Ours;
  throw Error(Err::Usage, "unknown baseline: " + s);
}

std::string to_string(Baseline b) {
  switch (b) {
    case Baseline::NoPregrasp: return "no_pregrasp";
    case Baseline::RandomDirection: return "random_direction";
    case Baseline::CenterPoint: return "center_point";
    case Baseline::OursNoClosedLoop: return "ours_no_closed_loop";
    case Baseline::Ours: return "ours";
  }
  throw Error(Err::Usage, "unknown baseline enum value");
}

const std::vector<Baseline>& all_baselines() {
  static const std::vector<Baseline> all{
      Baseline::NoPregrasp, Baseline::RandomDirection, Baseline::CenterPoint,
      Baseline::OursNoClosedLoop, Baseline::Ours};
  return all;
}

double EvalCell::half_width() const {
  if (trials == 0) return 0;
  const double p = success_rate();
  return 1.96 * std::sqrt(p * (1 - p) / trials);
}

double EvalReport::average_success(Baseline b) const {
  double sum = 0;
  int n = 0;
  for (const EvalCell& c : cells)
    if (c.baseline == b) {
      sum += c.success_rate();
      ++n;
    }
  return n ? sum / n : 0;
}

PushDecision baseline_push(Baseline kind, const scenesim::SceneState& state,
                           const cloudgen::LabeledPointCloud& world_cloud,
                           planner::PreGraspModule& module,
                           const planner::PlannerConfig& cfg,
                           std::uint64_t seed) {
  PushDecision out;
  if (kind == Baseline::NoPregrasp) return out;
  const Vec3 centroid = cloudgen::object_centroid(world_cloud);
  const auto canonical = cloudgen::canonicalize(world_cloud);
  module.set_frame_origin(centroid);

  switch (kind) {
    case Baseline::RandomDirection: {
      // Contact from the affordance selection; direction re-randomized
      // uniformly, magnitude kept from the proposal.
      const auto c = planner::propose_pregrasp(canonical, module, cfg.n1,
                                               cfg.m1, mix_seed(seed, 1));
      Rng rng(mix_seed(seed, 0xd12));
      const double angle = rng.uniform(0, 2 * M_PI);
      out.push = true;
      out.action.contact = canonical.points[c.point] + centroid;
      out.action.displacement =
          c.displacement.norm() * Vec2(std::cos(angle), std::sin(angle));
      return out;
    }
    case Baseline::CenterPoint: {
      // Contact forced to the object point nearest the footprint centroid;
      // displacement is the module's best proposal at that point.
      const Vec2 fc =
          state.pose.planar_footprint(state.object).centroid();
      int best = -1;
      double bd = 1e18;
      for (int i = 0; i < int(world_cloud.points.size()); ++i) {
        if (world_cloud.labels[i] != cloudgen::kLabelObject) continue;
        const double d = (world_cloud.points[i].head<2>() - fc).squaredNorm();
        if (d < bd) {
          bd = d;
          best = i;
        }
      }
      if (best < 0) throw Error(Err::NoObjectPoints, "no object points");
      module.prepare(canonical);
      Rng rng(mix_seed(seed, 2));
      planner::PreGraspCandidate c;
      for (int k = 0; k < cfg.m1; ++k) {
        const auto cand = module.sample_action(best, rng);
        if (c.point < 0 || cand.score > c.score) c = cand;
      }
      out.push = true;
      out.action.contact = world_cloud.points[best];
      out.action.displacement = c.displacement;
      return out;
    }
    case Baseline::OursNoClosedLoop: {
      const auto c = planner::propose_pregrasp(canonical, module, cfg.n1,
                                               cfg.m1, mix_seed(seed, 1));
      out.push = true;
      out.action.contact = canonical.points[c.point] + centroid;
      out.action.displacement = c.displacement;
      return out;
    }
    default:
      throw Error(Err::Usage, "baseline_push: ours runs the closed loop");
  }
}

TrialResult run_trial(Baseline kind, const scenesim::SceneState& state,
                      ModuleFactory& factory,
                      const planner::PlannerConfig& cfg, std::uint64_t seed) {
  TrialResult res;
  const auto grasp = factory.grasp(state);
  if (kind == Baseline::Ours) {
    const auto pregrasp = factory.pregrasp(state);
    planner::PlannerConfig c = cfg;
    c.seed = seed;
    const auto trace = planner::closed_loop(state, *grasp, *pregrasp, c);
    for (const auto& s : trace.steps) res.pushed = res.pushed || s.push;
    res.success = trace.r == 1 && !trace.aborted;
    return res;
  }
  try {
    scenesim::SceneState cur = state;
    auto cam = cloudgen::sample_camera(cur, mix_seed(seed, 1));
    auto cloud = cloudgen::render_cloud(cur, cam, cfg.cloud_n,
                                        mix_seed(seed, 2));
    if (kind != Baseline::NoPregrasp) {
      const auto pregrasp = factory.pregrasp(state);
      const auto decision = baseline_push(kind, cur, cloud, *pregrasp, cfg,
                                          mix_seed(seed, 3));
      if (decision.push) {
        res.pushed = true;
        const auto outcome = scenesim::apply_push(cur, decision.action,
                                                  cfg.push_steps, cfg.sim);
        if (outcome.safety != scenesim::SafetyEvent::None) return res;
        cur.pose = outcome.new_pose;
        cam = cloudgen::sample_camera(cur, mix_seed(seed, 4));
        cloud = cloudgen::render_cloud(cur, cam, cfg.cloud_n,
                                       mix_seed(seed, 5));
      }
    }
    const Vec3 centroid = cloudgen::object_centroid(cloud);
    const auto canonical = cloudgen::canonicalize(cloud);
    grasp->set_frame_origin(centroid);
    const auto c = planner::propose_grasp(canonical, *grasp, cfg.n2, cfg.m2,
                                          mix_seed(seed, 6));
    const scenesim::GraspAction ga{canonical.points[c.point] + centroid,
                                   c.euler};
    const auto [r, safety] =
        scenesim::grasp_outcome(cur, ga, cfg.oracle, cfg.sim);
    res.success = r == 1 && safety == scenesim::SafetyEvent::None;
  } catch (const Error&) {
    // Render/selection failures count as failed trials.
  }
  return res;
}

namespace {

std::uint64_t fnv64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// State seed shared across baselines so every policy sees the same states.
std::uint64_t state_seed(std::uint64_t base, scenesim::SceneKind scene,
                         const std::string& category, int trial) {
  return mix_seed(mix_seed(base, (std::uint64_t(scene) << 32) ^
                                     fnv64(category)),
                  std::uint64_t(trial));
}

}  // namespace

EvalReport run_eval(const EvalSpec& spec, ModuleFactory& factory,
                    const planner::PlannerConfig& cfg) {
  if (spec.trials < 1) throw Error(Err::InvalidConfig, "trials must be >= 1");
  EvalReport report;
  for (const auto scene : spec.scenes) {
    for (const auto& set : spec.category_sets) {
      const auto categories = scenesim::category_set(set);
      for (const Baseline b : spec.baselines) {
        EvalCell cell{scene, set, b, spec.trials, 0, 0};
        for (int t = 0; t < spec.trials; ++t) {
          const auto& category = categories[t % categories.size()];
          const std::uint64_t ss = state_seed(spec.seed, scene, category, t);
          const auto state = scenesim::sample_scene_state(
              scene, category, ss, /*allow_on_feature=*/false);
          const auto res = run_trial(b, state, factory, cfg,
                                     mix_seed(ss, 1 + std::uint64_t(b)));
          cell.successes += res.success;
          cell.pushed += res.pushed;
        }
        report.cells.push_back(cell);
      }
    }
  }
  return report;
}

std::vector<SweepRow> compatibility_sweep(
    ModuleFactory& factory, const std::vector<std::string>& graspable,
    const std::vector<std::string>& ungraspable,
    const std::vector<double>& theta_grid, scenesim::SceneKind scene,
    int trials, const planner::PlannerConfig& cfg, std::uint64_t seed) {
  const auto measure = [&](const std::vector<std::string>& categories,
                           double theta, double& pregrasp_rate,
                           double& success_rate) {
    planner::PlannerConfig c = cfg;
    c.theta_g = theta;
    int pushed = 0, succ = 0;
    for (int t = 0; t < trials; ++t) {
      const auto& category = categories[t % categories.size()];
      const std::uint64_t ss = state_seed(seed, scene, category, t);
      const auto state = scenesim::sample_scene_state(
          scene, category, ss, /*allow_on_feature=*/false);
      const auto res =
          run_trial(Baseline::Ours, state, factory, c, mix_seed(ss, 6));
      pushed += res.pushed;
      succ += res.success;
    }
    pregrasp_rate = double(pushed) / trials;
    success_rate = double(succ) / trials;
  };

  std::vector<SweepRow> rows;
  for (const double theta : theta_grid) {
    SweepRow row;
    row.theta_g = theta;
    measure(graspable, theta, row.graspable_pregrasp_rate,
            row.graspable_success_rate);
    measure(ungraspable, theta, row.ungraspable_pregrasp_rate,
            row.ungraspable_success_rate);
    rows.push_back(row);
  }
  return rows;
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "scene,category_set,baseline,trials,successes,pushed,"
         "success_rate,pregrasp_rate,half_width\n";
  for (const EvalCell& c : report.cells)
    out << scenesim::to_string(c.scene) << ',' << c.category_set << ','
        << to_string(c.baseline) << ',' << c.trials << ',' << c.successes
        << ',' << c.pushed << ',' << c.success_rate() << ','
        << c.pregrasp_rate() << ',' << c.half_width() << '\n';
  return out.str();
}

nlohmann::json report_json(const EvalReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const EvalCell& c : report.cells)
    cells.push_back({{"scene", scenesim::to_string(c.scene)},
                     {"category_set", c.category_set},
                     {"baseline", to_string(c.baseline)},
                     {"trials", c.trials},
                     {"successes", c.successes},
                     {"pushed", c.pushed},
                     {"success_rate", c.success_rate()},
                     {"pregrasp_rate", c.pregrasp_rate()},
                     {"half_width", c.half_width()}});
  nlohmann::json averages = nlohmann::json::object();
  for (const Baseline b : all_baselines()) {
    bool present = false;
    for (const EvalCell& c : report.cells)
      present = present || c.baseline == b;
    if (present) averages[to_string(b)] = report.average_success(b);
  }
  return nlohmann::json{{"report_schema_version", 1},
                        {"cells", std::move(cells)},
                        {"average_success", std::move(averages)}};
}

std::string report_table(const EvalReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(8) << "scene" << std::setw(12) << "set"
      << std::setw(22) << "baseline" << std::right << std::setw(8) << "trials"
      << std::setw(10) << "success" << std::setw(10) << "pregrasp"
      << std::setw(10) << "+/-" << '\n';
  out << std::string(80, '-') << '\n';
  for (const EvalCell& c : report.cells) {
    out << std::left << std::setw(8) << scenesim::to_string(c.scene)
        << std::setw(12) << c.category_set << std::setw(22)
        << to_string(c.baseline) << std::right << std::setw(8) << c.trials
        << std::fixed << std::setprecision(3) << std::setw(10)
        << c.success_rate() << std::setw(10) << c.pregrasp_rate()
        << std::setw(10) << c.half_width() << '\n';
  }
  return out.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "theta_g,graspable_pregrasp_rate,graspable_success_rate,"
         "ungraspable_pregrasp_rate,ungraspable_success_rate\n";
  for (const SweepRow& r : rows)
    out << r.theta_g << ',' << r.graspable_pregrasp_rate << ','
        << r.graspable_success_rate << ',' << r.ungraspable_pregrasp_rate
        << ',' << r.ungraspable_success_rate << '\n';
  return out.str();
}

}  // namespace pgr::evalharness
