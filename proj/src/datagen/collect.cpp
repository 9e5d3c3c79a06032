#include "datagen/collect.hpp"

#include "core/error.hpp"

namespace pgr::datagen {

namespace {

std::vector<int> object_indices(const cloudgen::LabeledPointCloud& cloud) {
  std::vector<int> idx;
  for (int i = 0; i < int(cloud.points.size()); ++i)
    if (cloud.labels[i] == cloudgen::kLabelObject) idx.push_back(i);
  return idx;
}

}  // namespace

std::vector<EpisodeRecord> collect_grasp(
    std::size_t n_success, std::size_t n_failure,
    const std::vector<scenesim::SceneKind>& scenes,
    const std::vector<std::string>& categories, std::uint64_t seed,
    const GraspCollectConfig& cfg, CollectStats* stats) {
  if (scenes.empty() || categories.empty())
    fail(Err::InvalidConfig, "collect_grasp needs scenes and categories");
  const std::size_t max_states =
      cfg.max_states ? cfg.max_states
                     : std::max<std::size_t>(2000, 50 * (n_success + n_failure));

  std::vector<EpisodeRecord> records;
  std::size_t succ = 0, failc = 0;
  for (std::size_t si = 0; succ < n_success || failc < n_failure; ++si) {
    if (si >= max_states)
      fail(Err::QuotaInfeasible,
           "grasp quota unreached after " + std::to_string(max_states) +
               " states (" + std::to_string(succ) + "/" +
               std::to_string(n_success) + " successes, " +
               std::to_string(failc) + "/" + std::to_string(n_failure) +
               " failures)");
    const std::uint64_t es = mix_seed(seed, si);
    if (stats) stats->states = si + 1;
    Rng rng(es);
    const auto scene = scenes[rng.uniform_int(scenes.size())];
    const auto& category = categories[rng.uniform_int(categories.size())];

    scenesim::SceneState state;
    CloudRef ref;
    ref.camera_seed = mix_seed(es, 2);
    ref.render_seed = mix_seed(es, 3);
    ref.n = cfg.cloud_n;
    cloudgen::LabeledPointCloud cloud;
    try {
      state = scenesim::sample_scene_state(scene, category, mix_seed(es, 1),
                                           /*allow_on_feature=*/true,
                                           cfg.placement, cfg.sim);
      const auto camera = cloudgen::sample_camera(state, ref.camera_seed);
      cloud = cloudgen::render_cloud(state, camera, ref.n, ref.render_seed);
    } catch (const Error&) {
      continue;  // occluded view or infeasible placement; resample
    }
    if (cfg.embed_clouds) ref.payload = cloudgen::cloud_to_bytes(cloud);
    const auto obj_idx = object_indices(cloud);
    if (obj_idx.empty()) continue;

    for (int a = 0; a < cfg.attempts_per_state; ++a) {
      const int idx = obj_idx[rng.uniform_int(obj_idx.size())];
      const Vec3 p = cloud.points[idx];
      const Vec3 n = scenesim::surface_normal(state, p);
      scenesim::GraspAction grasp;
      grasp.contact = p;
      grasp.euler = scenesim::sample_hemisphere_orientation(rng, n);
      int r;
      scenesim::SafetyEvent safety;
      try {
        std::tie(r, safety) =
            scenesim::grasp_outcome(state, grasp, cfg.oracle, cfg.sim);
      } catch (const Error&) {
        continue;
      }
      if (stats) {
        ++stats->attempts;
        (r ? stats->successes_seen : stats->failures_seen) += 1;
      }
      if (r ? succ >= n_success : failc >= n_failure) continue;
      EpisodeRecord rec;
      rec.kind = EpisodeRecord::Grasp;
      rec.scene = std::uint8_t(scene);
      rec.episode_seed = es;
      rec.state = state;
      rec.cloud_before = ref;
      rec.point_index = std::uint32_t(idx);
      rec.grasp = grasp;
      rec.r = std::uint8_t(r);
      rec.safety = std::uint8_t(safety);
      records.push_back(std::move(rec));
      (r ? succ : failc) += 1;
      if (succ >= n_success && failc >= n_failure) break;
    }
  }
  return records;
}

Vec2 sample_push_direction(Rng& rng, const Vec2& from, const Vec2& anchor,
                           double directed_fraction, double angle_sigma) {
  const bool directed = rng.uniform01() < directed_fraction;
  if (!directed) {
    const double ang = rng.uniform(0.0, 2.0 * M_PI);
    rng.normal();  // keep the stream aligned with the directed branch
    return {std::cos(ang), std::sin(ang)};
  }
  Vec2 base = anchor - from;
  if (base.norm() < 1e-12) base = Vec2(1, 0);
  base.normalize();
  const double noise = angle_sigma * rng.normal();
  const double c = std::cos(noise), s = std::sin(noise);
  return {c * base.x() - s * base.y(), s * base.x() + c * base.y()};
}

double sample_push_magnitude(Rng& rng, double mean, double sigma,
                             double push_max) {
  for (;;) {
    const double m = mean + sigma * rng.normal();
    if (m > 0.0 && m <= push_max) return m;
  }
}

std::vector<EpisodeRecord> collect_pregrasp(
    std::size_t n_success, std::size_t n_failure,
    const std::vector<scenesim::SceneKind>& scenes,
    const std::vector<std::string>& categories, std::uint64_t seed,
    relaytrain::GraspScorer& scorer, const PreGraspCollectConfig& cfg,
    CollectStats* stats) {
  if (scenes.empty() || categories.empty())
    fail(Err::InvalidConfig, "collect_pregrasp needs scenes and categories");
  const std::size_t max_states =
      cfg.max_states ? cfg.max_states
                     : std::max<std::size_t>(2000, 50 * (n_success + n_failure));

  std::vector<EpisodeRecord> records;
  std::size_t succ = 0, failc = 0;
  for (std::size_t si = 0; succ < n_success || failc < n_failure; ++si) {
    if (si >= max_states)
      fail(Err::QuotaInfeasible,
           "pre-grasp quota unreached after " + std::to_string(max_states) +
               " states (" + std::to_string(succ) + "/" +
               std::to_string(n_success) + " successes, " +
               std::to_string(failc) + "/" + std::to_string(n_failure) +
               " failures)");
    const std::uint64_t es = mix_seed(seed, si);
    if (stats) stats->states = si + 1;
    Rng rng(es);
    const auto scene = scenes[rng.uniform_int(scenes.size())];
    const auto& category = categories[rng.uniform_int(categories.size())];

    scenesim::SceneState state;
    CloudRef ref;
    ref.camera_seed = mix_seed(es, 2);
    ref.render_seed = mix_seed(es, 3);
    ref.n = cfg.cloud_n;
    cloudgen::LabeledPointCloud cloud;
    try {
      state = scenesim::sample_scene_state(scene, category, mix_seed(es, 1),
                                           /*allow_on_feature=*/false,
                                           cfg.placement, cfg.sim);
      const auto camera = cloudgen::sample_camera(state, ref.camera_seed);
      cloud = cloudgen::render_cloud(state, camera, ref.n, ref.render_seed);
    } catch (const Error&) {
      continue;
    }
    if (cfg.embed_clouds) ref.payload = cloudgen::cloud_to_bytes(cloud);
    const double c2_before = relaytrain::estimate_c2(
        cloudgen::canonicalize(cloud), scorer, cfg.n2, cfg.m2,
        mix_seed(es, 4));

    for (int a = 0; a < cfg.attempts_per_state; ++a) {
      scenesim::PreGraspAction push;
      try {
        push.contact = scenesim::sample_boundary_point(state, rng);
      } catch (const Error&) {
        break;
      }
      const Vec2 com = state.pose.planar_com(state.object);
      const Vec2 anchor = scenesim::feature_anchor(state.env, com);
      const Vec2 dir = sample_push_direction(rng, com, anchor,
                                             cfg.directed_fraction,
                                             cfg.angle_sigma);
      push.displacement = dir * sample_push_magnitude(rng, cfg.mag_mean,
                                                      cfg.mag_sigma,
                                                      cfg.sim.push_max);

      scenesim::PushOutcome outcome;
      try {
        outcome = scenesim::apply_push(state, push, cfg.push_steps, cfg.sim);
      } catch (const Error&) {
        continue;
      }

      EpisodeRecord rec;
      rec.kind = EpisodeRecord::PreGrasp;
      rec.scene = std::uint8_t(scene);
      rec.episode_seed = mix_seed(es, 100 + a);
      rec.state = state;
      rec.cloud_before = ref;
      rec.push = push;
      rec.outcome = outcome;

      double c2_after = 0.0;
      if (outcome.safety == scenesim::SafetyEvent::None) {
        scenesim::SceneState after = state;
        after.pose = outcome.new_pose;
        CloudRef aref;
        aref.camera_seed = mix_seed(rec.episode_seed, 5);
        aref.render_seed = mix_seed(rec.episode_seed, 6);
        aref.n = cfg.cloud_n;
        try {
          const auto camera = cloudgen::sample_camera(after, aref.camera_seed);
          auto after_cloud =
              cloudgen::render_cloud(after, camera, aref.n, aref.render_seed);
          if (cfg.embed_clouds)
            aref.payload = cloudgen::cloud_to_bytes(after_cloud);
          rec.cloud_after = aref;
          c2_after = relaytrain::estimate_c2(
              cloudgen::canonicalize(after_cloud), scorer, cfg.n2, cfg.m2,
              mix_seed(rec.episode_seed, 7));
        } catch (const Error&) {
          rec.cloud_after = CloudRef{};  // unrenderable: scored as 0
        }
      }
      const double gain = c2_after - c2_before;
      rec.success =
          gain > cfg.gain_threshold * std::max(c2_before, 0.1) ? 1 : 0;
      if (stats) {
        ++stats->attempts;
        (rec.success ? stats->successes_seen : stats->failures_seen) += 1;
      }
      if (rec.success ? succ >= n_success : failc >= n_failure) continue;
      (rec.success ? succ : failc) += 1;
      records.push_back(std::move(rec));
      if (succ >= n_success && failc >= n_failure) break;
    }
  }
  return records;
}

}  // namespace pgr::datagen
