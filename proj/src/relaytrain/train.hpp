#pragma once

#include <string>
#include <vector>

#include "datagen/records.hpp"
#include "relaytrain/scorer.hpp"

namespace pgr::relaytrain {

struct TrainConfig {
  double lr = 1e-3;
  int batch_size = 32;
  int epochs_main = 50;        // proposal + critic phase
  int epochs_affordance = 50;  // affordance phase (frozen backbone)
  int n2 = 10, m2 = 10;        // grasp-score estimate counts
  int n_label = 10;            // proposals per affordance label
  int affordance_points = 16;  // labeled object points per cloud
  double gain_threshold = 0.4;
  double holdout_fraction = 0.1;
  std::uint64_t seed = 0;
  int checkpoint_every = 0;        // 0: no checkpoints
  std::string checkpoint_dir;
  std::string metrics_path;        // CSV; empty: in-memory only
  std::string dataset_hash;        // stamped into saved weights
};

struct MetricsRow {
  int epoch = 0;
  int phase = 0;       // 1: proposal+critic, 2: affordance
  double loss = 0;     // mean critic loss (phase 1) or affordance loss
  double proposal = 0; // mean proposal loss over positives (phase 1)
  double holdout = 0;  // AUC (grasp critic) or MAE (pre-grasp critic)
};

struct TrainResult {
  nets::ModuleNet<float> net;
  double holdout_metric = 0;  // final AUC / MAE
  std::vector<MetricsRow> metrics;
};

// Phase 1 trains the grasp proposal (successful samples) and critic (all
// samples) jointly through the encoder; phase 2 freezes them and fits the
// affordance head to averaged critic scores over fresh proposals.
TrainResult train_grasp_module(const std::vector<datagen::EpisodeRecord>& data,
                               const TrainConfig& cfg);

// Same schedule for the pre-grasp module. Targets are penalty-weighted
// grasp-score gains computed with the given (frozen) grasp scorer.
TrainResult train_pregrasp_module(
    const std::vector<datagen::EpisodeRecord>& data, GraspScorer& grasp,
    const TrainConfig& cfg);

// Area under the ROC curve via the rank statistic.
double auc_score(const std::vector<std::pair<double, int>>& scored);

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRow>& rows);

}  // namespace pgr::relaytrain
