#pragma once

#include "datagen/records.hpp"
#include "relaytrain/scorer.hpp"
#include "scenesim/sampling.hpp"

namespace pgr::datagen {

struct GraspCollectConfig {
  std::uint32_t cloud_n = 256;
  int attempts_per_state = 8;  // grasps tried per rendered scene
  std::size_t max_states = 0;  // 0: derived from the quotas
  bool embed_clouds = false;
  scenesim::PlacementConfig placement;
  scenesim::SimParams sim;
  scenesim::GraspOracleConfig oracle;
};

// Attempt bookkeeping, filled incrementally (readable even when collection
// stops early on QuotaInfeasible).
struct CollectStats {
  std::size_t states = 0;
  std::size_t attempts = 0;
  std::size_t successes_seen = 0;  // before quota filtering
  std::size_t failures_seen = 0;
};

// Random scenes and poses (including atop features), grasp points uniform
// over visible object points, orientations uniform on the upper hemisphere;
// rejection-samples until both class quotas are met exactly.
std::vector<EpisodeRecord> collect_grasp(
    std::size_t n_success, std::size_t n_failure,
    const std::vector<scenesim::SceneKind>& scenes,
    const std::vector<std::string>& categories, std::uint64_t seed,
    const GraspCollectConfig& cfg = {}, CollectStats* stats = nullptr);

struct PreGraspCollectConfig {
  std::uint32_t cloud_n = 256;
  int attempts_per_state = 4;  // pushes tried from one initial state
  std::size_t max_states = 0;
  bool embed_clouds = false;
  double directed_fraction = 0.3;  // pushes aimed at the feature
  double angle_sigma = 0.3;        // rad, noise on the aimed direction
  double mag_mean = 0.15;          // m
  double mag_sigma = 0.05;         // m
  int push_steps = 100;
  int n2 = 10, m2 = 10;            // grasp-score estimate sample counts
  double gain_threshold = 0.4;     // success: gain > thr * max(before, 0.1)
  scenesim::PlacementConfig placement;
  scenesim::SimParams sim;
};

// Flat poses at uniform distance from the feature; push contact uniform on
// the object boundary; displacement magnitude truncated-normal and direction
// either uniform or aimed at the feature. The success flag compares the
// grasp-score estimate before and after the push using the given scorer.
std::vector<EpisodeRecord> collect_pregrasp(
    std::size_t n_success, std::size_t n_failure,
    const std::vector<scenesim::SceneKind>& scenes,
    const std::vector<std::string>& categories, std::uint64_t seed,
    relaytrain::GraspScorer& scorer, const PreGraspCollectConfig& cfg = {},
    CollectStats* stats = nullptr);

// Push direction: with probability directed_fraction, the direction to
// `anchor` perturbed by a Gaussian angle; otherwise uniform on [0, 2pi).
Vec2 sample_push_direction(Rng& rng, const Vec2& from, const Vec2& anchor,
                           double directed_fraction, double angle_sigma);

// Normal(mean, sigma) rejection-sampled into (0, push_max].
double sample_push_magnitude(Rng& rng, double mean, double sigma,
                             double push_max);

}  // namespace pgr::datagen
