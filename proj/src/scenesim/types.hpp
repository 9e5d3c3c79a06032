#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "core/geom.hpp"

namespace pgr::scenesim {

enum class Side : std::uint8_t { PosX = 0, NegX, PosY, NegY };

inline Vec2 side_normal(Side s) {
  switch (s) {
    case Side::PosX: return {1, 0};
    case Side::NegX: return {-1, 0};
    case Side::PosY: return {0, 1};
    default: return {0, -1};
  }
}

struct EdgeFeature {
  Side side = Side::PosX;
};

struct WallFeature {
  Side side = Side::PosX;
  double height = 0.10;
  double thickness = 0.04;
};

struct SlopeFeature {
  Rect footprint;       // on-table footprint of the wedge
  double incline = 0.3;  // radians
  Side rise_side = Side::PosX;  // surface rises toward this side
};

struct SlotFeature {
  Rect footprint;  // opening in the table top
  double depth = 0.05;
};

struct EnvFeatureSpec {
  double table_width = 1.2;
  double table_depth = 0.8;
  double table_height = 0.4;  // drop from table top to floor
  std::optional<EdgeFeature> edge;
  std::optional<WallFeature> wall;
  std::optional<SlopeFeature> slope;
  std::optional<SlotFeature> slot;

  Rect table_rect() const { return {0, 0, table_width, table_depth}; }
  // Boundary value b such that points satisfy side_normal(s).dot(p) <= b.
  double side_bound(Side s) const {
    switch (s) {
      case Side::PosX: return table_width;
      case Side::PosY: return table_depth;
      default: return 0.0;
    }
  }
  Rect wall_strip() const;  // on-table footprint of the wall solid
  void validate() const;    // throws InvalidConfig
};

struct ObjectModel {
  std::string id;
  std::string category;
  Polygon footprint;  // local frame, ccw
  double thickness = 0.01;
  Vec2 com{0, 0};  // area centroid of footprint, local frame
  bool graspable_tag = false;

  // Recomputes com, fixes winding, validates non-degeneracy.
  void finalize();
};

struct ObjectPose {
  double x = 0, y = 0, yaw = 0;
  double tilt = 0;
  Vec2 tilt_axis{1, 0};  // direction of the pivot line (world xy)
  Vec2 pivot{0, 0};      // a point on the pivot line (world xy)
  double elevation = 0;
  bool supported = true;

  // Object local frame -> world. Local frame: footprint at z in [0, t].
  Iso3 transform(double = 0) const {
    Iso3 planar = Iso3::Identity();
    planar.translate(Vec3(x, y, 0));
    planar.rotate(Eigen::AngleAxisd(yaw, Vec3::UnitZ()));
    Iso3 lift = Iso3::Identity();
    lift.translate(Vec3(0, 0, elevation));
    lift.translate(Vec3(pivot.x(), pivot.y(), 0));
    lift.rotate(Eigen::AngleAxisd(tilt, Vec3(tilt_axis.x(), tilt_axis.y(), 0)));
    lift.translate(Vec3(-pivot.x(), -pivot.y(), 0));
    return lift * planar;
  }

  // Ground-projected footprint (planar part only; tilt foreshortening is
  // ignored for overlap metrics).
  Polygon planar_footprint(const ObjectModel& obj) const {
    return obj.footprint.rotated(yaw).translated(Vec2(x, y));
  }
  Vec2 planar_com(const ObjectModel& obj) const {
    const double c = std::cos(yaw), s = std::sin(yaw);
    return Vec2(x + c * obj.com.x() - s * obj.com.y(),
                y + s * obj.com.x() + c * obj.com.y());
  }
};

struct SceneState {
  EnvFeatureSpec env;
  ObjectModel object;
  ObjectPose pose;
  std::uint64_t seed = 0;
};

enum class SafetyEvent : std::uint8_t {
  None = 0,
  ObjectFell,
  GripperWallCollision,
  GripperSlopeCollision,
};

struct PreGraspAction {
  Vec3 contact{0, 0, 0};       // p1, on the object surface
  Vec2 displacement{0, 0};     // horizontal push offset
};

struct GraspAction {
  Vec3 contact{0, 0, 0};  // p2
  Vec3 euler{0, 0, 0};    // (alpha, beta, gamma)
};

struct PushOutcome {
  ObjectPose new_pose;
  double slip = 0;            // |dx_go|
  Vec3 rotation{0, 0, 0};     // (tilt delta, 0, yaw delta)
  SafetyEvent safety = SafetyEvent::None;
};

struct GraspOracleConfig {
  double clearance_min = 0.015;
  double overhang_min = 0.030;
  double gripper_opening = 0.080;
  double finger_length = 0.060;
  double close_descent = 0.025;  // dz2
  double hold_duration = 1.0;    // dt; the analytic oracle needs no dynamics
  double lift_min = 0.05;        // theta_v, satisfied by construction
  double rotation_max = 0.5;     // theta_r2, satisfied by construction
};

struct SimParams {
  double eps_contact = 0.005;
  double eps_disp = 0.001;
  int default_steps = 100;
  double k_rot = 1.0;
  double k_wall = 0.5;   // rad per meter of blocked displacement
  double tilt_max = 0.5;
  double push_max = 0.4;
};

}  // namespace pgr::scenesim
