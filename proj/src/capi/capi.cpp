#include "pregrasp/pregrasp.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "config/config.hpp"
#include "core/error.hpp"
#include "datagen/collect.hpp"
#include "evalharness/eval.hpp"
#include "nets/weights.hpp"
#include "planner/planner.hpp"
#include "relaytrain/train.hpp"
#include "render/heatmap.hpp"

using namespace pgr;

struct pg_config {
  config::RunConfig cfg;
};

namespace {

thread_local std::string t_error = "no error";

pg_status status_of(Err e) {
  switch (e) {
    case Err::Usage:
    case Err::InvalidConfig:
      return PG_USAGE;
    case Err::MissingDependency:
      return PG_MISSING_DEPENDENCY;
    case Err::SchemaMismatch:
    case Err::CorruptFile:
    case Err::CorruptShard:
    case Err::MissingManifest:
      return PG_CORRUPT_DATA;
    default:
      return PG_ERROR;
  }
}

pg_status fail(pg_status s, const std::string& msg) {
  t_error = msg;
  return s;
}

template <typename Fn>
pg_status guarded(Fn&& fn) {
  try {
    fn();
    return PG_OK;
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(PG_ERROR, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const config::RunConfig& conf(const pg_config* cfg) {
  if (!cfg) throw Error(Err::Usage, "config handle is NULL");
  return cfg->cfg;
}

config::RunConfig& mut(pg_config* cfg) {
  if (!cfg) throw Error(Err::Usage, "config handle is NULL");
  return cfg->cfg;
}

std::string required(const char* value, const char* what) {
  if (!value || !*value)
    throw Error(Err::Usage, std::string(what) + " is required");
  return value;
}

nets::ModuleNet<float> load_net(int module, const char* path,
                                const char* what) {
  if (!path || !*path)
    throw Error(Err::MissingDependency, std::string(what) + " is required");
  if (!std::filesystem::is_regular_file(path))
    throw Error(Err::MissingDependency,
                std::string(what) + " not found: " + path);
  nets::ModuleNet<float> net;
  net.init(module, 0);
  nets::load_weights(path, net);
  return net;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Err::Io, "cannot write " + path);
  f << text;
}

}  // namespace

extern "C" {

const char* pg_last_error(void) { return t_error.c_str(); }

pg_status pg_config_load(const char* path, pg_config** out) {
  return guarded([&] {
    if (!out) throw Error(Err::Usage, "out is NULL");
    auto* handle = new pg_config{config::load_config(path ? path : "")};
    *out = handle;
  });
}

pg_status pg_config_from_json(const char* json_text, pg_config** out) {
  return guarded([&] {
    if (!out) throw Error(Err::Usage, "out is NULL");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(required(json_text, "json_text"));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Err::InvalidConfig, std::string("config parse: ") + e.what());
    }
    *out = new pg_config{config::config_from_json(j)};
  });
}

void pg_config_free(pg_config* cfg) { delete cfg; }

pg_status pg_config_dump(const pg_config* cfg, char** out_text) {
  return guarded([&] {
    if (!out_text) throw Error(Err::Usage, "out_text is NULL");
    *out_text = dup_string(config::config_to_json(conf(cfg)).dump(2));
  });
}

pg_status pg_config_hash(const pg_config* cfg, char* buf, size_t buflen) {
  return guarded([&] {
    const std::string h = config::config_hash(conf(cfg));
    if (!buf || buflen < h.size() + 1)
      throw Error(Err::Usage, "hash buffer too small");
    std::memcpy(buf, h.c_str(), h.size() + 1);
  });
}

void pg_string_free(char* s) { std::free(s); }

pg_status pg_config_set_seed(pg_config* cfg, uint64_t seed) {
  return guarded([&] {
    // Round-trip through the normalized document so the dependent
    // sub-config seeds are re-derived consistently.
    nlohmann::json j = config::config_to_json(mut(cfg));
    j["seed"] = seed;
    cfg->cfg = config::config_from_json(j);
  });
}

pg_status pg_config_set_out_dir(pg_config* cfg, const char* dir) {
  return guarded([&] { mut(cfg).out_dir = required(dir, "out_dir"); });
}

pg_status pg_config_set_quota(pg_config* cfg, const char* kind,
                              uint64_t n_success, uint64_t n_failure) {
  return guarded([&] {
    auto& c = mut(cfg);
    const std::string k = required(kind, "kind");
    if (n_success < 1 || n_failure < 1)
      throw Error(Err::Usage, "quotas must be >= 1");
    if (k == "grasp") {
      c.grasp_success = n_success;
      c.grasp_failure = n_failure;
    } else if (k == "pregrasp") {
      c.pregrasp_success = n_success;
      c.pregrasp_failure = n_failure;
    } else {
      throw Error(Err::Usage, "unknown dataset kind: " + k);
    }
  });
}

pg_status pg_config_set_theta(pg_config* cfg, double theta_g) {
  return guarded([&] {
    if (theta_g <= 0 || theta_g >= 1)
      throw Error(Err::Usage, "theta_g must lie in (0, 1)");
    mut(cfg).planner.theta_g = theta_g;
  });
}

pg_status pg_config_set_trials(pg_config* cfg, int trials) {
  return guarded([&] {
    if (trials < 1) throw Error(Err::Usage, "trials must be >= 1");
    auto& c = mut(cfg);
    c.eval.trials = trials;
    c.sweep_trials = trials;
  });
}

pg_status pg_config_set_baselines(pg_config* cfg, const char* list) {
  return guarded([&] {
    auto& c = mut(cfg);
    const std::string s = required(list, "baselines");
    std::vector<evalharness::Baseline> out;
    if (s == "all") {
      out = evalharness::all_baselines();
    } else {
      std::size_t pos = 0;
      while (pos <= s.size()) {
        const std::size_t comma = s.find(',', pos);
        const std::string name =
            s.substr(pos, comma == std::string::npos ? comma : comma - pos);
        out.push_back(evalharness::baseline_from_string(name));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
    c.eval.baselines = std::move(out);
  });
}

pg_status pg_collect(const pg_config* cfg, const char* kind,
                     const char* out_dir, const char* grasp_weights) {
  return guarded([&] {
    const auto& c = conf(cfg);
    const std::string k = required(kind, "kind");
    const std::string dir = required(out_dir, "out_dir");
    if (k != "grasp" && k != "pregrasp")
      throw Error(Err::Usage, "unknown dataset kind: " + k);
    const std::string hash = config::config_hash(c);
    if (k == "grasp") {
      std::filesystem::create_directories(dir);
      const auto records = datagen::collect_grasp(
          c.grasp_success, c.grasp_failure, c.grasp_scenes,
          c.grasp_categories, c.seed, c.grasp_collect);
      datagen::write_shards(dir, records, "grasp", hash);
    } else {
      auto net = load_net(2, grasp_weights, "grasp weights");
      relaytrain::NetGraspScorer scorer(net);
      std::filesystem::create_directories(dir);
      const auto records = datagen::collect_pregrasp(
          c.pregrasp_success, c.pregrasp_failure, c.pregrasp_scenes,
          c.pregrasp_categories, c.seed, scorer, c.pregrasp_collect);
      datagen::write_shards(dir, records, "pregrasp", hash);
    }
  });
}

pg_status pg_train(const pg_config* cfg, const char* kind,
                   const char* dataset_dir, const char* grasp_weights,
                   const char* out_weights, const char* metrics_csv,
                   double* holdout) {
  return guarded([&] {
    const auto& c = conf(cfg);
    const std::string k = required(kind, "kind");
    const std::string dir = required(dataset_dir, "dataset_dir");
    const std::string weights_path = required(out_weights, "out_weights");

    datagen::DatasetManifest manifest;
    const auto data = datagen::read_shards(dir, &manifest);
    if (manifest.kind != k)
      throw Error(Err::InvalidConfig, "dataset kind is '" + manifest.kind +
                                          "', expected '" + k + "'");
    relaytrain::TrainConfig tc = c.train;
    tc.dataset_hash = datagen::dataset_hash(dir);

    relaytrain::TrainResult res;
    if (k == "grasp") {
      res = relaytrain::train_grasp_module(data, tc);
    } else if (k == "pregrasp") {
      auto gnet = load_net(2, grasp_weights, "grasp weights");
      relaytrain::NetGraspScorer scorer(gnet);
      res = relaytrain::train_pregrasp_module(data, scorer, tc);
    } else {
      throw Error(Err::Usage, "unknown dataset kind: " + k);
    }

    const nets::WeightsMeta meta{
        c.seed, std::uint32_t(tc.epochs_main + tc.epochs_affordance),
        tc.dataset_hash};
    nets::save_weights(weights_path, res.net, meta);
    if (metrics_csv && *metrics_csv)
      relaytrain::write_metrics_csv(metrics_csv, res.metrics);
    if (holdout) *holdout = res.holdout_metric;
  });
}

pg_status pg_plan(const pg_config* cfg, const char* grasp_weights,
                  const char* pregrasp_weights, const char* scene,
                  const char* category, char** out_json) {
  return guarded([&] {
    const auto& c = conf(cfg);
    if (!out_json) throw Error(Err::Usage, "out_json is NULL");
    auto gnet = load_net(2, grasp_weights, "grasp weights");
    auto pnet = load_net(1, pregrasp_weights, "pregrasp weights");
    const auto state = scenesim::sample_scene_state(
        scenesim::scene_kind_from_string(required(scene, "scene")),
        required(category, "category"), c.seed, /*allow_on_feature=*/false,
        c.placement, c.sim);
    planner::NetGraspModule grasp(gnet);
    planner::NetPreGraspModule pregrasp(pnet, c.sim.push_max);
    const auto trace = planner::closed_loop(state, grasp, pregrasp, c.planner);
    nlohmann::json j = planner::trace_to_json(trace);
    j["config_hash"] = config::config_hash(c);
    *out_json = dup_string(j.dump(2));
  });
}

pg_status pg_eval(const pg_config* cfg, const char* grasp_weights,
                  const char* pregrasp_weights, const char* out_dir) {
  return guarded([&] {
    const auto& c = conf(cfg);
    const std::string dir = required(out_dir, "out_dir");
    auto gnet = load_net(2, grasp_weights, "grasp weights");
    auto pnet = load_net(1, pregrasp_weights, "pregrasp weights");
    evalharness::NetModuleFactory factory(gnet, pnet, c.sim.push_max);
    const auto report = evalharness::run_eval(c.eval, factory, c.planner);
    std::filesystem::create_directories(dir);
    write_text(dir + "/report.csv", evalharness::report_csv(report));
    write_text(dir + "/report.txt", evalharness::report_table(report));
    nlohmann::json j = evalharness::report_json(report);
    j["config_hash"] = config::config_hash(c);
    write_text(dir + "/report.json", j.dump(2));
  });
}

pg_status pg_sweep(const pg_config* cfg, const char* grasp_weights,
                   const char* pregrasp_weights, const char* out_dir) {
  return guarded([&] {
    const auto& c = conf(cfg);
    const std::string dir = required(out_dir, "out_dir");
    auto gnet = load_net(2, grasp_weights, "grasp weights");
    auto pnet = load_net(1, pregrasp_weights, "pregrasp weights");
    evalharness::NetModuleFactory factory(gnet, pnet, c.sim.push_max);
    const auto rows = evalharness::compatibility_sweep(
        factory, c.sweep_graspable, c.sweep_ungraspable, c.theta_grid,
        c.sweep_scene, c.sweep_trials, c.planner, c.seed);
    std::filesystem::create_directories(dir);
    write_text(dir + "/sweep.csv", evalharness::sweep_csv(rows));
    nlohmann::json jrows = nlohmann::json::array();
    for (const auto& r : rows)
      jrows.push_back({{"theta_g", r.theta_g},
                       {"graspable_pregrasp_rate", r.graspable_pregrasp_rate},
                       {"graspable_success_rate", r.graspable_success_rate},
                       {"ungraspable_pregrasp_rate",
                        r.ungraspable_pregrasp_rate},
                       {"ungraspable_success_rate",
                        r.ungraspable_success_rate}});
    write_text(dir + "/sweep.json",
               nlohmann::json{{"config_hash", config::config_hash(c)},
                              {"rows", std::move(jrows)}}
                   .dump(2));
  });
}

pg_status pg_render(const pg_config* cfg, const char* weights,
                    int module_index, const char* scene, const char* category,
                    const char* out_png, int width, int height,
                    int camera_view) {
  return guarded([&] {
    const auto& c = conf(cfg);
    if (module_index != 1 && module_index != 2)
      throw Error(Err::Usage, "module_index must be 1 or 2");
    auto net = load_net(module_index, weights, "module weights");
    const auto state = scenesim::sample_scene_state(
        scenesim::scene_kind_from_string(required(scene, "scene")),
        required(category, "category"), c.seed, /*allow_on_feature=*/false,
        c.placement, c.sim);
    const auto camera = cloudgen::sample_camera(state, mix_seed(c.seed, 1));
    const auto cloud =
        cloudgen::render_cloud(state, camera, c.cloud_n, mix_seed(c.seed, 2));
    const auto canonical = cloudgen::canonicalize(cloud);
    std::vector<double> scores;
    if (module_index == 2) {
      planner::NetGraspModule module(net);
      scores = planner::affordance_map(canonical, module);
    } else {
      planner::NetPreGraspModule module(net, c.sim.push_max);
      scores = planner::affordance_map(canonical, module);
    }
    const auto img = render::render_heatmap(canonical, scores, width, height,
                                            camera_view != 0);
    render::write_png(required(out_png, "out_png"), img);
  });
}

}  // extern "C"
