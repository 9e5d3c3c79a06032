#include "relaytrain/train.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>

#include "core/error.hpp"
#include "nets/weights.hpp"
#include "relaytrain/losses.hpp"
#include "relaytrain/steps.hpp"

namespace pgr::relaytrain {

namespace {

struct Sample {
  int point_index = 0;          // column into the canonical cloud
  Vec3 point;                   // canonical coordinates of that point
  nets::MatX<float> action;     // embedded action input
  double target = 0;            // critic target (r or p * gain)
  bool positive = false;        // used for proposal training
};

struct CloudGroup {
  cloudgen::LabeledPointCloud cloud;  // canonicalized
  Vec3 centroid{0, 0, 0};            // world-frame shift removed by canonicalize
  std::vector<Sample> samples;
};

// Module-1 label scorer: proposals and raw critic scores from the net
// being trained (used once the backbone is frozen).
class PushScorer : public GraspScorer {
 public:
  explicit PushScorer(const nets::ModuleNet<float>& net, double push_max)
      : net_(net), push_max_(push_max) {}
  void prepare(const cloudgen::LabeledPointCloud& cloud) override {
    cloud_ = &cloud;
    fs_ = net_.encode(cloud);
  }
  double affordance(int p) override {
    return double(net_.affordance(fs_.col(p), net_.point_embed(cloud_->points[p])));
  }
  double sample_and_score(int p, Rng& rng) override {
    const auto fp = net_.point_embed(cloud_->points[p]);
    nets::MatX<float> z(nets::kLatentDim, 1);
    for (int r = 0; r < nets::kLatentDim; ++r) z(r, 0) = float(rng.normal());
    const Vec2 d = net_.propose_push(fs_.col(p), fp, z, push_max_);
    const auto fm =
        net_.action_embed(nets::ModuleNet<float>::displacement_input(d));
    return double(net_.critic(fs_.col(p), fp, fm));
  }

 private:
  const nets::ModuleNet<float>& net_;
  double push_max_;
  const cloudgen::LabeledPointCloud* cloud_ = nullptr;
  nets::MatX<float> fs_;
};

std::vector<int> object_indices(const cloudgen::LabeledPointCloud& cloud) {
  std::vector<int> idx;
  for (int i = 0; i < int(cloud.points.size()); ++i)
    if (cloud.labels[i] == cloudgen::kLabelObject) idx.push_back(i);
  return idx;
}

void shuffle(std::vector<int>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.uniform_int(i)]);
}

double critic_prediction(const nets::ModuleNet<float>& net,
                         const nets::MatX<float>& fs, const Sample& s) {
  return double(net.critic(fs.col(s.point_index), net.point_embed(s.point),
                           net.action_embed(s.action)));
}

// Phase 1 + phase 2 schedule shared by both modules.
TrainResult train_module(int module, std::vector<CloudGroup>& groups,
                         const TrainConfig& cfg) {
  TrainResult res;
  res.net.init(module, cfg.seed);
  nets::ModuleNet<float>& net = res.net;

  std::vector<int> order(groups.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  Rng split_rng(mix_seed(cfg.seed, 0x5b11));
  shuffle(order, split_rng);
  const int n_holdout =
      std::min<int>(int(groups.size()) - 1,
                    int(std::round(cfg.holdout_fraction * groups.size())));
  const std::vector<int> holdout(order.begin(), order.begin() + n_holdout);
  std::vector<int> train(order.begin() + n_holdout, order.end());

  nets::Adam<float> opt(cfg.lr);
  auto params = net.params();

  const auto flush = [&](int& pending) {
    if (!pending) return;
    for (auto& [p, g] : params) *g /= float(pending);
    opt.step(params);
    net.zero_grad();
    pending = 0;
  };

  // ---- phase 1: proposal (positives) + critic (all) through the encoder ----
  for (int epoch = 0; epoch < cfg.epochs_main; ++epoch) {
    Rng erng(mix_seed(cfg.seed, 0xe000 + epoch));
    shuffle(train, erng);
    net.zero_grad();
    double critic_sum = 0, prop_sum = 0;
    int critic_count = 0, prop_count = 0, pending = 0;
    for (int gi : train) {
      CloudGroup& g = groups[gi];
      typename nets::Encoder<float>::Cache cache;
      const auto fs = net.enc.forward(g.cloud, net.enc_cfg, &cache);
      nets::MatX<float> dfs =
          nets::MatX<float>::Zero(nets::kFeatureDim, fs.cols());
      for (const Sample& s : g.samples) {
        critic_sum += critic_step(net, fs, dfs, s.point_index, s.point,
                                  s.action, s.target, module == 2);
        ++critic_count;
        ++pending;
        if (s.positive) {
          nets::MatX<float> eps(nets::kLatentDim, 1);
          for (int r = 0; r < nets::kLatentDim; ++r)
            eps(r, 0) = float(erng.normal());
          prop_sum += proposal_step(net, fs, dfs, s.point_index, s.point,
                                    s.action, eps);
          ++prop_count;
        }
      }
      net.enc.backward(cache, dfs);
      if (pending >= cfg.batch_size) flush(pending);
    }
    flush(pending);

    // Held-out critic quality: AUC for the grasp module, MAE otherwise.
    double metric = 0;
    if (!holdout.empty()) {
      std::vector<std::pair<double, int>> scored;
      double abs_err = 0;
      int n = 0;
      for (int gi : holdout) {
        const CloudGroup& g = groups[gi];
        const auto fs = net.encode(g.cloud);
        for (const Sample& s : g.samples) {
          const double pred = critic_prediction(net, fs, s);
          scored.emplace_back(pred, s.target > 0.5 ? 1 : 0);
          abs_err += std::abs(pred - s.target);
          ++n;
        }
      }
      metric = module == 2 ? auc_score(scored) : abs_err / std::max(n, 1);
    }
    res.metrics.push_back({epoch, 1, critic_sum / std::max(critic_count, 1),
                           prop_sum / std::max(prop_count, 1), metric});
    res.holdout_metric = metric;

    if (cfg.checkpoint_every > 0 && !cfg.checkpoint_dir.empty() &&
        (epoch + 1) % cfg.checkpoint_every == 0) {
      std::filesystem::create_directories(cfg.checkpoint_dir);
      nets::WeightsMeta meta{cfg.seed, std::uint32_t(epoch + 1),
                             cfg.dataset_hash};
      nets::save_weights(cfg.checkpoint_dir + "/module" +
                             std::to_string(module) + "_epoch" +
                             std::to_string(epoch + 1) + ".pgwt",
                         net, meta);
    }
  }

  // ---- phase 2: affordance head on frozen backbone ----
  // Labels average fresh critic scores over proposals (clamped to [0,1] for
  // the unbounded pre-grasp critic). Only the affordance layers move so the
  // frozen critic stays exact.
  std::unique_ptr<GraspScorer> scorer;
  if (module == 2)
    scorer = std::make_unique<NetGraspScorer>(net);
  else
    scorer = std::make_unique<PushScorer>(net, scenesim::SimParams{}.push_max);

  struct LabeledPoint {
    int index;
    double label;
  };
  std::vector<nets::MatX<float>> frozen_fs(groups.size());
  std::vector<std::vector<LabeledPoint>> labels(groups.size());
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    frozen_fs[gi] = net.encode(g.cloud);
    scorer->prepare(g.cloud);
    auto obj = object_indices(g.cloud);
    Rng prng(mix_seed(cfg.seed, 0xa9e0 + gi));
    shuffle(obj, prng);
    const int take = std::min<int>(cfg.affordance_points, int(obj.size()));
    for (int u = 0; u < take; ++u) {
      const double raw = affordance_label(*scorer, obj[u], cfg.n_label,
                                          mix_seed(cfg.seed, 0x1abe + gi));
      labels[gi].push_back({obj[u], std::clamp(raw, 0.0, 1.0)});
    }
  }

  std::vector<std::pair<nets::MatX<float>*, nets::MatX<float>*>> aff_params = {
      {&net.aff_a.W, &net.aff_a.gW},
      {&net.aff_a.b, &net.aff_a.gb},
      {&net.aff_b.W, &net.aff_b.gW},
      {&net.aff_b.b, &net.aff_b.gb}};
  nets::Adam<float> aff_opt(cfg.lr);
  const auto aff_flush = [&](int& pending) {
    if (!pending) return;
    for (auto& [p, g] : aff_params) *g /= float(pending);
    aff_opt.step(aff_params);
    net.zero_grad();
    pending = 0;
  };

  for (int epoch = 0; epoch < cfg.epochs_affordance; ++epoch) {
    Rng erng(mix_seed(cfg.seed, 0xf000 + epoch));
    shuffle(train, erng);
    net.zero_grad();
    double loss_sum = 0;
    int loss_count = 0, pending = 0;
    nets::MatX<float> dfs_sink;
    for (int gi : train) {
      const CloudGroup& g = groups[gi];
      const auto& fs = frozen_fs[gi];
      dfs_sink = nets::MatX<float>::Zero(nets::kFeatureDim, fs.cols());
      for (const auto& lp : labels[gi]) {
        loss_sum += affordance_step(net, fs, dfs_sink, lp.index,
                                    g.cloud.points[lp.index], lp.label);
        ++loss_count;
        ++pending;
      }
      if (pending >= cfg.batch_size) aff_flush(pending);
    }
    aff_flush(pending);

    double mae = 0;
    int n = 0;
    for (int gi : holdout) {
      const CloudGroup& g = groups[gi];
      for (const auto& lp : labels[gi]) {
        mae += std::abs(double(net.affordance(
                   frozen_fs[gi].col(lp.index),
                   net.point_embed(g.cloud.points[lp.index]))) -
               lp.label);
        ++n;
      }
    }
    res.metrics.push_back({epoch, 2, loss_sum / std::max(loss_count, 1), 0.0,
                           n ? mae / n : 0.0});
  }

  if (!cfg.metrics_path.empty()) write_metrics_csv(cfg.metrics_path, res.metrics);
  return res;
}

}  // namespace

double auc_score(const std::vector<std::pair<double, int>>& scored) {
  // Rank-sum (ties share average rank).
  std::vector<std::pair<double, int>> s = scored;
  std::sort(s.begin(), s.end());
  double pos_rank_sum = 0;
  std::size_t n_pos = 0, n_neg = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    while (j < s.size() && s[j].first == s[i].first) ++j;
    const double avg_rank = 0.5 * double(i + j - 1) + 1.0;  // 1-based
    for (std::size_t k = i; k < j; ++k)
      if (s[k].second) pos_rank_sum += avg_rank;
    i = j;
  }
  for (const auto& [score, label] : s) (label ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0) return 0.5;
  return (pos_rank_sum - 0.5 * double(n_pos) * double(n_pos + 1)) /
         (double(n_pos) * double(n_neg));
}

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRow>& rows) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) fail(Err::Io, "cannot write metrics: " + path);
  f << "epoch,phase,loss,proposal,holdout\n";
  for (const auto& r : rows)
    f << r.epoch << ',' << r.phase << ',' << r.loss << ',' << r.proposal
      << ',' << r.holdout << '\n';
}

TrainResult train_grasp_module(const std::vector<datagen::EpisodeRecord>& data,
                               const TrainConfig& cfg) {
  std::vector<CloudGroup> groups;
  std::map<std::pair<std::uint64_t, std::uint64_t>, int> by_cloud;
  bool any_positive = false;
  for (const auto& rec : data) {
    if (rec.kind != datagen::EpisodeRecord::Grasp) continue;
    const auto key = std::make_pair(rec.cloud_before.camera_seed,
                                    rec.cloud_before.render_seed);
    auto it = by_cloud.find(key);
    if (it == by_cloud.end()) {
      CloudGroup g;
      g.cloud = cloudgen::canonicalize(
          datagen::regenerate(rec.state, rec.cloud_before));
      it = by_cloud.emplace(key, int(groups.size())).first;
      groups.push_back(std::move(g));
    }
    Sample s;
    s.point_index = int(rec.point_index);
    s.point = groups[it->second].cloud.points[s.point_index];
    s.action = nets::ModuleNet<float>::orientation_input(rec.grasp.euler);
    s.target = rec.r;
    s.positive = rec.r != 0;
    any_positive |= s.positive;
    groups[it->second].samples.push_back(std::move(s));
  }
  if (groups.empty()) fail(Err::EmptyDataset, "no grasp records");
  if (!any_positive)
    fail(Err::NoPositiveSamples, "grasp proposal needs successful grasps");
  return train_module(2, groups, cfg);
}

TrainResult train_pregrasp_module(
    const std::vector<datagen::EpisodeRecord>& data, GraspScorer& grasp,
    const TrainConfig& cfg) {
  std::vector<CloudGroup> groups;
  std::map<std::pair<std::uint64_t, std::uint64_t>, int> by_cloud;
  std::map<int, double> c2_before_of;  // per group
  bool any_positive = false;
  for (const auto& rec : data) {
    if (rec.kind != datagen::EpisodeRecord::PreGrasp) continue;
    const auto key = std::make_pair(rec.cloud_before.camera_seed,
                                    rec.cloud_before.render_seed);
    auto it = by_cloud.find(key);
    if (it == by_cloud.end()) {
      CloudGroup g;
      const auto raw = datagen::regenerate(rec.state, rec.cloud_before);
      g.centroid = cloudgen::object_centroid(raw);
      g.cloud = cloudgen::canonicalize(raw);
      it = by_cloud.emplace(key, int(groups.size())).first;
      c2_before_of[it->second] =
          estimate_c2(g.cloud, grasp, cfg.n2, cfg.m2,
                      mix_seed(rec.cloud_before.render_seed, 4));
      groups.push_back(std::move(g));
    }
    CloudGroup& g = groups[it->second];
    const double c2_before = c2_before_of[it->second];

    double c2_after = 0.0;
    if (rec.outcome.safety == scenesim::SafetyEvent::None &&
        rec.cloud_after.n > 0) {
      scenesim::SceneState after = rec.state;
      after.pose = rec.outcome.new_pose;
      const auto after_cloud =
          cloudgen::canonicalize(datagen::regenerate(after, rec.cloud_after));
      c2_after = estimate_c2(after_cloud, grasp, cfg.n2, cfg.m2,
                             mix_seed(rec.cloud_after.render_seed, 7));
    }
    const double p = penalty(rec.outcome.slip, rec.outcome.rotation,
                             rec.outcome.safety);

    // Contact snaps to the nearest visible object point (canonical frame).
    const Vec3 contact_canon = rec.push.contact - g.centroid;
    Sample s;
    s.point_index = -1;
    double best = 1e18;
    for (int i = 0; i < int(g.cloud.points.size()); ++i) {
      if (g.cloud.labels[i] != cloudgen::kLabelObject) continue;
      const double d = (g.cloud.points[i] - contact_canon).squaredNorm();
      if (d < best) {
        best = d;
        s.point_index = i;
      }
    }
    if (s.point_index < 0) continue;
    s.point = g.cloud.points[s.point_index];
    s.action = nets::ModuleNet<float>::displacement_input(
        rec.push.displacement);
    s.target = critic1_target(c2_before, c2_after, p);
    s.positive =
        (c2_after - c2_before) > cfg.gain_threshold * std::max(c2_before, 0.1);
    any_positive |= s.positive;
    g.samples.push_back(std::move(s));
  }
  if (groups.empty()) fail(Err::EmptyDataset, "no pre-grasp records");
  if (!any_positive)
    fail(Err::NoPositiveSamples,
         "pre-grasp proposal needs gain-positive pushes");
  return train_module(1, groups, cfg);
}

}  // namespace pgr::relaytrain
