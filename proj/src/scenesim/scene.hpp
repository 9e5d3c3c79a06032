#pragma once

#include <json.hpp>

#include "scenesim/types.hpp"

namespace pgr::scenesim {

enum class SceneKind : std::uint8_t { Edge = 0, Wall, Slope, Slot, Multi };

SceneKind scene_kind_from_string(const std::string& s);
std::string to_string(SceneKind k);

// Fixed desk-scale layouts for the five scene kinds.
EnvFeatureSpec make_env(SceneKind kind);

// Per-feature contact summary for the ground-projected footprint.
struct FeatureContact {
  double edge_overhang_area = 0;   // footprint area past the feature edge
  double edge_distance = 1e9;      // gap to the feature edge (0 if past it)
  bool wall_contact = false;
  double wall_distance = 1e9;
  double slope_overlap_area = 0;
  double slope_penetration = 0;    // reach past the slope entry line
  double slope_distance = 1e9;
  double slot_overlap_area = 0;
  double slot_penetration = 0;     // reach past the near lip
  double slot_distance = 1e9;
};

FeatureContact feature_contact(const SceneState& state);

// Resolves tilt/elevation for a planar placement. wall_tilt is the
// accumulated pinned tilt carried by an ongoing push against a wall.
ObjectPose settle(const EnvFeatureSpec& env, const ObjectModel& obj, double x,
                  double y, double yaw, double wall_tilt = 0.0);

// Shifts (x, y) so the footprint does not penetrate the wall solid.
Vec2 clamp_out_of_wall(const EnvFeatureSpec& env, const ObjectModel& obj,
                       double x, double y, double yaw);

// Height of the highest support surface beneath a ground point.
double support_height(const EnvFeatureSpec& env, const Vec2& p);

// True iff the COM ground projection lies in the supported region.
bool com_supported(const EnvFeatureSpec& env, const Vec2& com);

// Nearest point on the scene's designated feature line (edge line, wall
// inner face, slope entry edge, slot near lip) to a ground point.
Vec2 feature_anchor(const EnvFeatureSpec& env, const Vec2& from);
// Gap between the footprint and the feature line (0 when touching/overlapping).
double feature_distance(const EnvFeatureSpec& env, const Polygon& footprint);

// ---- object surface queries ----

// Unsigned distance from a world point to the object's surface.
double surface_distance(const SceneState& state, const Vec3& p);
// Outward unit normal of the nearest object face.
Vec3 surface_normal(const SceneState& state, const Vec3& p);
// Point containment in the object solid, inflated by `inflate`.
bool object_contains(const SceneState& state, const Vec3& p,
                     double inflate = 0.0);

// Vertical free gap beneath the object's lower rim at a surface point.
// Throws ContactOffObject if p is farther than eps_contact from the surface.
double clearance_at(const SceneState& state, const Vec3& p,
                    double eps_contact = 0.005);

// ---- operations ----

PushOutcome apply_push(const SceneState& state, const PreGraspAction& action,
                       int steps, const SimParams& sp = {});

std::pair<int, SafetyEvent> grasp_outcome(const SceneState& state,
                                          const GraspAction& grasp,
                                          const GraspOracleConfig& cfg,
                                          const SimParams& sp = {});

// ---- serialization (scene_schema_version 1) ----
nlohmann::json env_to_json(const EnvFeatureSpec& env);
EnvFeatureSpec env_from_json(const nlohmann::json& j);
nlohmann::json object_to_json(const ObjectModel& obj);
ObjectModel object_from_json(const nlohmann::json& j);
nlohmann::json pose_to_json(const ObjectPose& pose);
ObjectPose pose_from_json(const nlohmann::json& j);
nlohmann::json state_to_json(const SceneState& s);
SceneState state_from_json(const nlohmann::json& j);

}  // namespace pgr::scenesim
