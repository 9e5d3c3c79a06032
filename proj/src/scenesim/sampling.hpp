#pragma once

#include "core/rng.hpp"
#include "scenesim/objects.hpp"
#include "scenesim/scene.hpp"

namespace pgr::scenesim {

struct PlacementConfig {
  double dist_min = 0.05;  // uniform distance of the footprint to the feature
  double dist_max = 0.50;
  double on_feature_prob = 0.5;  // grasp-datagen poses atop features
};

// Random settled state for one scene/category pair. With
// allow_on_feature, the object may be posed overhanging / riding / pinned
// on the feature (used by the grasp dataset); otherwise it sits flat at a
// uniform distance from the feature.
SceneState sample_scene_state(SceneKind kind, const std::string& category,
                              std::uint64_t seed, bool allow_on_feature,
                              const PlacementConfig& pc = {},
                              const SimParams& sp = {});

// Orientation uniform over the hemisphere above the tangent plane at a
// surface point with outward normal n (roll uniform).
Vec3 sample_hemisphere_orientation(Rng& rng, const Vec3& n);

// Uniform point on the object's side surface (push contacts).
Vec3 sample_boundary_point(const SceneState& state, Rng& rng);

}  // namespace pgr::scenesim
