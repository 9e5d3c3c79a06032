// pgr: command-line front end. Talks to the core exclusively through the
// C API in pregrasp/pregrasp.h; exit codes are pg_status values.
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "pregrasp/pregrasp.h"

namespace {

int report(pg_status s) {
  if (s != PG_OK) std::fprintf(stderr, "pgr: error: %s\n", pg_last_error());
  return int(s);
}

struct ConfigHandle {
  pg_config* cfg = nullptr;
  ~ConfigHandle() { pg_config_free(cfg); }
};

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Pre-grasp planning toolkit: collect datasets, train the two modules "
      "(grasp first, then the pre-grasp module it supervises), run the "
      "closed-loop planner, and evaluate against baselines."};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "override the config seed")
      ->each([&](const std::string&) { seed_set = true; });

  // collect
  auto* collect = app.add_subcommand("collect", "collect a labeled dataset");
  std::string kind, grasp_weights, pregrasp_weights;
  std::uint64_t n_success = 0, n_failure = 0;
  collect->add_option("--kind", kind, "grasp | pregrasp")->required();
  collect->add_option("--out", out_dir, "dataset directory");
  collect->add_option("--success", n_success, "success quota");
  collect->add_option("--failure", n_failure, "failure quota");
  collect->add_option("--grasp-weights", grasp_weights,
                      "trained grasp module (required for --kind pregrasp)");

  // train
  auto* train = app.add_subcommand("train", "train one module");
  std::string data_dir, weights_out, metrics_csv;
  train->add_option("--kind", kind, "grasp | pregrasp")->required();
  train->add_option("--data", data_dir, "collected dataset directory")
      ->required();
  train->add_option("--weights", weights_out, "output weight file")
      ->required();
  train->add_option("--grasp-weights", grasp_weights,
                    "trained grasp module (required for --kind pregrasp)");
  train->add_option("--metrics", metrics_csv, "per-epoch metrics CSV");

  // plan
  auto* plan = app.add_subcommand("plan", "closed-loop plan on one scene");
  std::string scene = "edge", category = "phone";
  plan->add_option("--grasp-weights", grasp_weights)->required();
  plan->add_option("--pregrasp-weights", pregrasp_weights)->required();
  plan->add_option("--scene", scene, "edge | wall | slope | slot | multi");
  plan->add_option("--category", category, "object category");

  // eval
  auto* eval = app.add_subcommand("eval", "baseline grid evaluation");
  std::string baselines = "all";
  int trials = 0;
  double theta_g = 0;
  eval->add_option("--grasp-weights", grasp_weights)->required();
  eval->add_option("--pregrasp-weights", pregrasp_weights)->required();
  eval->add_option("--out", out_dir, "report directory");
  eval->add_option("--baseline", baselines,
                   "comma-separated baseline names, or 'all'");
  eval->add_option("--trials", trials, "trials per cell");
  eval->add_option("--theta", theta_g, "necessity threshold in (0,1)");

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep", "pre-grasp rate vs. threshold compatibility sweep");
  sweep->add_option("--grasp-weights", grasp_weights)->required();
  sweep->add_option("--pregrasp-weights", pregrasp_weights)->required();
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--trials", trials, "trials per grid point");

  // render
  auto* render = app.add_subcommand("render", "affordance heatmap PNG");
  std::string weights, out_png = "heatmap.png";
  int module_index = 2, width = 512, height = 512;
  bool camera_view = false;
  render->add_option("--weights", weights, "trained module weights")
      ->required();
  render->add_option("--module", module_index, "1: pre-grasp, 2: grasp");
  render->add_option("--scene", scene);
  render->add_option("--category", category);
  render->add_option("--out", out_png, "output PNG path");
  render->add_option("--width", width);
  render->add_option("--height", height);
  render->add_flag("--camera-view", camera_view,
                   "project along the sampled camera instead of top-down");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // help text, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return int(PG_USAGE);
  }

  ConfigHandle h;
  if (pg_status s = pg_config_load(opt(config_path), &h.cfg); s != PG_OK)
    return report(s);
  if (seed_set)
    if (pg_status s = pg_config_set_seed(h.cfg, seed); s != PG_OK)
      return report(s);

  if (*collect) {
    if (n_success || n_failure) {
      if (pg_status s = pg_config_set_quota(h.cfg, kind.c_str(),
                                            n_success ? n_success : 1,
                                            n_failure ? n_failure : 1);
          s != PG_OK)
        return report(s);
    }
    return report(
        pg_collect(h.cfg, kind.c_str(), out_dir.c_str(), opt(grasp_weights)));
  }

  if (*train) {
    double holdout = 0;
    pg_status s =
        pg_train(h.cfg, kind.c_str(), data_dir.c_str(), opt(grasp_weights),
                 weights_out.c_str(), opt(metrics_csv), &holdout);
    if (s == PG_OK)
      std::printf("holdout %s: %.4f\n",
                  kind == "grasp" ? "auc" : "mae", holdout);
    return report(s);
  }

  if (*plan) {
    char* json = nullptr;
    pg_status s = pg_plan(h.cfg, grasp_weights.c_str(),
                          pregrasp_weights.c_str(), scene.c_str(),
                          category.c_str(), &json);
    if (s == PG_OK) {
      std::printf("%s\n", json);
      pg_string_free(json);
    }
    return report(s);
  }

  if (*eval) {
    if (trials)
      if (pg_status s = pg_config_set_trials(h.cfg, trials); s != PG_OK)
        return report(s);
    if (theta_g != 0)
      if (pg_status s = pg_config_set_theta(h.cfg, theta_g); s != PG_OK)
        return report(s);
    if (pg_status s = pg_config_set_baselines(h.cfg, baselines.c_str());
        s != PG_OK)
      return report(s);
    return report(pg_eval(h.cfg, grasp_weights.c_str(),
                          pregrasp_weights.c_str(), out_dir.c_str()));
  }

  if (*sweep) {
    if (trials)
      if (pg_status s = pg_config_set_trials(h.cfg, trials); s != PG_OK)
        return report(s);
    return report(pg_sweep(h.cfg, grasp_weights.c_str(),
                           pregrasp_weights.c_str(), out_dir.c_str()));
  }

  if (*render)
    return report(pg_render(h.cfg, weights.c_str(), module_index,
                            scene.c_str(), category.c_str(), out_png.c_str(),
                            width, height, camera_view ? 1 : 0));

  return int(PG_USAGE);
}
