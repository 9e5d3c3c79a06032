#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "scenesim/scene.hpp"

namespace pgr::cloudgen {

using scenesim::SceneState;

struct CameraPose {
  Vec3 position{0, 0, 4};
  Vec3 look_at{0, 0, 0};
  Vec3 up{0, 0, 1};
};

// Point labels.
inline constexpr std::uint8_t kLabelEnvironment = 0;
inline constexpr std::uint8_t kLabelObject = 1;

struct LabeledPointCloud {
  std::vector<Vec3> points;
  std::vector<std::uint8_t> labels;
  CameraPose camera;
  std::size_t n_points() const { return points.size(); }
};

// Camera position uniform on a spherical shell of radius U[3,5] around the
// object centroid, above the table plane; look_at is the centroid.
CameraPose sample_camera(const SceneState& state, std::uint64_t seed);

// N visible-surface points by ray casting against the analytic scene
// geometry. Throws ObjectOccluded if no ray reaches the object.
LabeledPointCloud render_cloud(const SceneState& state,
                               const CameraPose& camera, std::size_t n,
                               std::uint64_t seed);

// Translate so the object-point centroid is at the origin. Translation only:
// environment-relative directions must stay metric.
LabeledPointCloud canonicalize(const LabeledPointCloud& cloud);
Vec3 object_centroid(const LabeledPointCloud& cloud);

// Flat binary record: magic "PGRC", version u16, N u32, then
// N x (3 x f32 + u8 label), little-endian. Coordinates are rounded to f32 on
// save; load returns exactly the stored values.
std::vector<std::uint8_t> cloud_to_bytes(const LabeledPointCloud& cloud);
LabeledPointCloud cloud_from_bytes(const std::vector<std::uint8_t>& bytes);
void save_cloud(const std::string& path, const LabeledPointCloud& cloud);
LabeledPointCloud load_cloud(const std::string& path);

// Nearest ray hit against the scene; returns false on a miss. Exposed for
// the re-projection tests.
bool raycast_scene(const SceneState& state, const Vec3& origin,
                   const Vec3& dir, double& t_hit, std::uint8_t& label);

}  // namespace pgr::cloudgen
