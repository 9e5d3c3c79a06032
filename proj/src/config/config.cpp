#include "config/config.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "core/binio.hpp"
#include "core/error.hpp"

namespace pgr::config {

namespace {

std::vector<scenesim::SceneKind> all_scenes() {
  return {scenesim::SceneKind::Edge, scenesim::SceneKind::Wall,
          scenesim::SceneKind::Slope, scenesim::SceneKind::Slot,
          scenesim::SceneKind::Multi};
}

std::vector<std::string> train_all_categories() {
  auto out = scenesim::category_set("train-hard");
  const auto easy = scenesim::category_set("train-easy");
  out.insert(out.end(), easy.begin(), easy.end());
  return out;
}

nlohmann::json scenes_to_json(const std::vector<scenesim::SceneKind>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto s : v) a.push_back(scenesim::to_string(s));
  return a;
}

std::vector<scenesim::SceneKind> scenes_from_json(const nlohmann::json& a) {
  std::vector<scenesim::SceneKind> out;
  for (const auto& s : a)
    out.push_back(scenesim::scene_kind_from_string(s.get<std::string>()));
  return out;
}

// Strict group reader: every key in the document must be consumed.
class Group {
 public:
  Group(const nlohmann::json& j, std::string where)
      : j_(j), where_(std::move(where)) {
    if (!j_.is_object())
      throw Error(Err::InvalidConfig, where_ + " must be an object");
  }
  ~Group() = default;

  template <typename T>
  void get(const char* key, T& out) {
    seen_.push_back(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(Err::InvalidConfig,
                  where_ + "." + key + ": " + e.what());
    }
  }

  const nlohmann::json* sub(const char* key) {
    seen_.push_back(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      bool known = false;
      for (const auto& s : seen_) known = known || s == key;
      if (!known)
        throw Error(Err::InvalidConfig,
                    "unknown key " + where_ + "." + key);
    }
  }

 private:
  const nlohmann::json& j_;
  std::string where_;
  std::vector<std::string> seen_;
};

void check(bool ok, const std::string& what) {
  if (!ok) throw Error(Err::InvalidConfig, what);
}

void validate(const RunConfig& c) {
  check(c.cloud_n >= 256, "cloud_n must be >= 256");
  check(c.sim.push_max > 0, "sim.push_max must be positive");
  check(c.planner.theta_g > 0 && c.planner.theta_g < 1,
        "planner.theta_g must lie in (0, 1)");
  check(c.planner.max_iterations >= 1, "planner.max_iterations must be >= 1");
  check(c.planner.n1 >= 1 && c.planner.m1 >= 1 && c.planner.n2 >= 1 &&
            c.planner.m2 >= 1,
        "planner candidate counts must be >= 1");
  check(c.train.lr > 0, "train.lr must be positive");
  check(c.train.batch_size >= 1, "train.batch_size must be >= 1");
  check(c.train.epochs_main >= 1 && c.train.epochs_affordance >= 0,
        "train epoch counts invalid");
  check(c.train.holdout_fraction >= 0 && c.train.holdout_fraction < 1,
        "train.holdout_fraction must lie in [0, 1)");
  check(c.eval.trials >= 1, "eval.trials must be >= 1");
  check(c.sweep_trials >= 1, "sweep.trials must be >= 1");
  check(c.grasp_success >= 1 && c.grasp_failure >= 1,
        "grasp quotas must be >= 1");
  check(c.pregrasp_success >= 1 && c.pregrasp_failure >= 1,
        "pregrasp quotas must be >= 1");
}

// Shared parameters flow into the stage configs exactly once, here.
void sync(RunConfig& c) {
  c.grasp_collect.cloud_n = std::uint32_t(c.cloud_n);
  c.grasp_collect.placement = c.placement;
  c.grasp_collect.sim = c.sim;
  c.grasp_collect.oracle = c.oracle;
  c.pregrasp_collect.cloud_n = std::uint32_t(c.cloud_n);
  c.pregrasp_collect.placement = c.placement;
  c.pregrasp_collect.sim = c.sim;
  c.planner.cloud_n = c.cloud_n;
  c.planner.sim = c.sim;
  c.planner.oracle = c.oracle;
  c.train.seed = c.seed;
  c.planner.seed = c.seed;
  c.eval.seed = c.seed;
}

}  // namespace

RunConfig default_config() {
  RunConfig c;
  c.grasp_scenes = all_scenes();
  c.grasp_categories = train_all_categories();
  c.pregrasp_scenes = all_scenes();
  c.pregrasp_categories = scenesim::category_set("train-hard");
  c.eval.scenes = all_scenes();
  c.eval.category_sets = {"test-hard"};
  c.eval.baselines = evalharness::all_baselines();
  c.eval.trials = 200;
  c.sweep_graspable = scenesim::category_set("test-easy");
  c.sweep_ungraspable = scenesim::category_set("test-hard");
  sync(c);
  return c;
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c = default_config();
  Group root(j, "config");
  root.get("seed", c.seed);
  root.get("out_dir", c.out_dir);
  root.get("cloud_n", c.cloud_n);

  if (const auto* js = root.sub("sim")) {
    Group g(*js, "sim");
    g.get("eps_contact", c.sim.eps_contact);
    g.get("eps_disp", c.sim.eps_disp);
    g.get("default_steps", c.sim.default_steps);
    g.get("k_rot", c.sim.k_rot);
    g.get("k_wall", c.sim.k_wall);
    g.get("tilt_max", c.sim.tilt_max);
    g.get("push_max", c.sim.push_max);
    g.finish();
  }
  if (const auto* js = root.sub("placement")) {
    Group g(*js, "placement");
    g.get("dist_min", c.placement.dist_min);
    g.get("dist_max", c.placement.dist_max);
    g.get("on_feature_prob", c.placement.on_feature_prob);
    g.finish();
  }
  if (const auto* js = root.sub("oracle")) {
    Group g(*js, "oracle");
    g.get("clearance_min", c.oracle.clearance_min);
    g.get("overhang_min", c.oracle.overhang_min);
    g.get("gripper_opening", c.oracle.gripper_opening);
    g.get("finger_length", c.oracle.finger_length);
    g.get("close_descent", c.oracle.close_descent);
    g.get("hold_duration", c.oracle.hold_duration);
    g.get("lift_min", c.oracle.lift_min);
    g.get("rotation_max", c.oracle.rotation_max);
    g.finish();
  }
  if (const auto* js = root.sub("datagen")) {
    Group d(*js, "datagen");
    if (const auto* jg = d.sub("grasp")) {
      Group g(*jg, "datagen.grasp");
      g.get("success", c.grasp_success);
      g.get("failure", c.grasp_failure);
      g.get("attempts_per_state", c.grasp_collect.attempts_per_state);
      g.get("max_states", c.grasp_collect.max_states);
      g.get("embed_clouds", c.grasp_collect.embed_clouds);
      if (const auto* s = g.sub("scenes")) c.grasp_scenes = scenes_from_json(*s);
      g.get("categories", c.grasp_categories);
      g.finish();
    }
    if (const auto* jp = d.sub("pregrasp")) {
      Group g(*jp, "datagen.pregrasp");
      g.get("success", c.pregrasp_success);
      g.get("failure", c.pregrasp_failure);
      g.get("attempts_per_state", c.pregrasp_collect.attempts_per_state);
      g.get("max_states", c.pregrasp_collect.max_states);
      g.get("embed_clouds", c.pregrasp_collect.embed_clouds);
      g.get("directed_fraction", c.pregrasp_collect.directed_fraction);
      g.get("angle_sigma", c.pregrasp_collect.angle_sigma);
      g.get("mag_mean", c.pregrasp_collect.mag_mean);
      g.get("mag_sigma", c.pregrasp_collect.mag_sigma);
      g.get("push_steps", c.pregrasp_collect.push_steps);
      g.get("n2", c.pregrasp_collect.n2);
      g.get("m2", c.pregrasp_collect.m2);
      g.get("gain_threshold", c.pregrasp_collect.gain_threshold);
      if (const auto* s = g.sub("scenes"))
        c.pregrasp_scenes = scenes_from_json(*s);
      g.get("categories", c.pregrasp_categories);
      g.finish();
    }
    d.finish();
  }
  if (const auto* js = root.sub("train")) {
    Group g(*js, "train");
    g.get("lr", c.train.lr);
    g.get("batch_size", c.train.batch_size);
    g.get("epochs_main", c.train.epochs_main);
    g.get("epochs_affordance", c.train.epochs_affordance);
    g.get("n2", c.train.n2);
    g.get("m2", c.train.m2);
    g.get("n_label", c.train.n_label);
    g.get("affordance_points", c.train.affordance_points);
    g.get("gain_threshold", c.train.gain_threshold);
    g.get("holdout_fraction", c.train.holdout_fraction);
    g.get("checkpoint_every", c.train.checkpoint_every);
    g.finish();
  }
  if (const auto* js = root.sub("planner")) {
    Group g(*js, "planner");
    g.get("theta_g", c.planner.theta_g);
    g.get("n1", c.planner.n1);
    g.get("m1", c.planner.m1);
    g.get("n2", c.planner.n2);
    g.get("m2", c.planner.m2);
    g.get("max_iterations", c.planner.max_iterations);
    g.get("push_steps", c.planner.push_steps);
    g.finish();
  }
  if (const auto* js = root.sub("eval")) {
    Group g(*js, "eval");
    g.get("trials", c.eval.trials);
    if (const auto* s = g.sub("scenes")) c.eval.scenes = scenes_from_json(*s);
    g.get("category_sets", c.eval.category_sets);
    if (const auto* s = g.sub("baselines")) {
      c.eval.baselines.clear();
      for (const auto& b : *s)
        c.eval.baselines.push_back(
            evalharness::baseline_from_string(b.get<std::string>()));
    }
    g.finish();
  }
  if (const auto* js = root.sub("sweep")) {
    Group g(*js, "sweep");
    g.get("theta_grid", c.theta_grid);
    g.get("graspable", c.sweep_graspable);
    g.get("ungraspable", c.sweep_ungraspable);
    g.get("trials", c.sweep_trials);
    if (g.sub("scene") && js->contains("scene"))
      c.sweep_scene =
          scenesim::scene_kind_from_string(js->at("scene").get<std::string>());
    g.finish();
  }
  root.finish();

  sync(c);
  validate(c);
  return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json baselines = nlohmann::json::array();
  for (const auto b : c.eval.baselines)
    baselines.push_back(evalharness::to_string(b));
  return nlohmann::json{
      {"seed", c.seed},
      {"out_dir", c.out_dir},
      {"cloud_n", c.cloud_n},
      {"sim",
       {{"eps_contact", c.sim.eps_contact},
        {"eps_disp", c.sim.eps_disp},
        {"default_steps", c.sim.default_steps},
        {"k_rot", c.sim.k_rot},
        {"k_wall", c.sim.k_wall},
        {"tilt_max", c.sim.tilt_max},
        {"push_max", c.sim.push_max}}},
      {"placement",
       {{"dist_min", c.placement.dist_min},
        {"dist_max", c.placement.dist_max},
        {"on_feature_prob", c.placement.on_feature_prob}}},
      {"oracle",
       {{"clearance_min", c.oracle.clearance_min},
        {"overhang_min", c.oracle.overhang_min},
        {"gripper_opening", c.oracle.gripper_opening},
        {"finger_length", c.oracle.finger_length},
        {"close_descent", c.oracle.close_descent},
        {"hold_duration", c.oracle.hold_duration},
        {"lift_min", c.oracle.lift_min},
        {"rotation_max", c.oracle.rotation_max}}},
      {"datagen",
       {{"grasp",
         {{"success", c.grasp_success},
          {"failure", c.grasp_failure},
          {"attempts_per_state", c.grasp_collect.attempts_per_state},
          {"max_states", c.grasp_collect.max_states},
          {"embed_clouds", c.grasp_collect.embed_clouds},
          {"scenes", scenes_to_json(c.grasp_scenes)},
          {"categories", c.grasp_categories}}},
        {"pregrasp",
         {{"success", c.pregrasp_success},
          {"failure", c.pregrasp_failure},
          {"attempts_per_state", c.pregrasp_collect.attempts_per_state},
          {"max_states", c.pregrasp_collect.max_states},
          {"embed_clouds", c.pregrasp_collect.embed_clouds},
          {"directed_fraction", c.pregrasp_collect.directed_fraction},
          {"angle_sigma", c.pregrasp_collect.angle_sigma},
          {"mag_mean", c.pregrasp_collect.mag_mean},
          {"mag_sigma", c.pregrasp_collect.mag_sigma},
          {"push_steps", c.pregrasp_collect.push_steps},
          {"n2", c.pregrasp_collect.n2},
          {"m2", c.pregrasp_collect.m2},
          {"gain_threshold", c.pregrasp_collect.gain_threshold},
          {"scenes", scenes_to_json(c.pregrasp_scenes)},
          {"categories", c.pregrasp_categories}}}}},
      {"train",
       {{"lr", c.train.lr},
        {"batch_size", c.train.batch_size},
        {"epochs_main", c.train.epochs_main},
        {"epochs_affordance", c.train.epochs_affordance},
        {"n2", c.train.n2},
        {"m2", c.train.m2},
        {"n_label", c.train.n_label},
        {"affordance_points", c.train.affordance_points},
        {"gain_threshold", c.train.gain_threshold},
        {"holdout_fraction", c.train.holdout_fraction},
        {"checkpoint_every", c.train.checkpoint_every}}},
      {"planner",
       {{"theta_g", c.planner.theta_g},
        {"n1", c.planner.n1},
        {"m1", c.planner.m1},
        {"n2", c.planner.n2},
        {"m2", c.planner.m2},
        {"max_iterations", c.planner.max_iterations},
        {"push_steps", c.planner.push_steps}}},
      {"eval",
       {{"trials", c.eval.trials},
        {"scenes", scenes_to_json(c.eval.scenes)},
        {"category_sets", c.eval.category_sets},
        {"baselines", std::move(baselines)}}},
      {"sweep",
       {{"theta_grid", c.theta_grid},
        {"graspable", c.sweep_graspable},
        {"ungraspable", c.sweep_ungraspable},
        {"scene", scenesim::to_string(c.sweep_scene)},
        {"trials", c.sweep_trials}}}};
}

RunConfig load_config(const std::string& path) {
  RunConfig c;
  if (path.empty()) {
    c = default_config();
  } else {
    std::ifstream f(path);
    if (!f) throw Error(Err::Io, "cannot open config file: " + path);
    nlohmann::json j;
    try {
      f >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(Err::InvalidConfig,
                  "config parse error in " + path + ": " + e.what());
    }
    c = config_from_json(j);
  }
  if (const char* env = std::getenv("PGR_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
      throw Error(Err::InvalidConfig,
                  std::string("PGR_SEED is not an integer: ") + env);
    c.seed = v;
    sync(c);
  }
  return c;
}

std::string config_hash(const RunConfig& cfg) {
  const std::string dump = config_to_json(cfg).dump();
  std::ostringstream out;
  out << std::hex << std::setw(8) << std::setfill('0')
      << crc32_of(dump.data(), dump.size());
  return out.str();
}

}  // namespace pgr::config
