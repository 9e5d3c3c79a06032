#include <cmath>

#include "core/error.hpp"
#include "scenesim/scene.hpp"

namespace pgr::scenesim {

// Quasi-static dipole push: per sub-step ds along direction d, the COM
// translates by ds*d and yaw changes by k_rot*ds*cross(com - p1, d)/|com - p1|^2.
// Displacement into a wall is clipped and converted to pinned tilt at rate
// k_wall up to tilt_max.
PushOutcome apply_push(const SceneState& state, const PreGraspAction& action,
                       int steps, const SimParams& sp) {
  if (surface_distance(state, action.contact) > sp.eps_contact)
    fail(Err::ContactOffObject, "push contact off the object surface");
  const double total = action.displacement.norm();
  if (total < sp.eps_disp)
    fail(Err::ZeroDisplacement, "push displacement below eps_disp");
  if (steps < 1) steps = sp.default_steps;

  const Vec2 dir = action.displacement / total;
  const double step_len = total / steps;

  const EnvFeatureSpec& env = state.env;
  const ObjectModel& obj = state.object;

  double yaw = state.pose.yaw;
  Vec2 com = state.pose.planar_com(obj);
  Vec2 r_c = Vec2(action.contact.x(), action.contact.y()) - com;

  // Carry an existing pinned tilt if the object starts against the wall.
  double wall_acc = 0.0;
  {
    SceneState probe = state;
    const FeatureContact fc0 = feature_contact(probe);
    if (env.wall && fc0.wall_contact) {
      const ObjectPose base =
          settle(env, obj, state.pose.x, state.pose.y, yaw, 0.0);
      wall_acc = std::max(0.0, state.pose.tilt - base.tilt);
    }
  }

  const double tilt0 = state.pose.tilt;
  double dyaw_total = 0.0;
  double s_exec = 0.0;  // gripper travel
  SafetyEvent safety = SafetyEvent::None;
  ObjectPose pose = state.pose;

  auto origin_from_com = [&](double yw) -> Vec2 {
    const double c = std::cos(yw), s = std::sin(yw);
    return com - Vec2(c * obj.com.x() - s * obj.com.y(),
                      s * obj.com.x() + c * obj.com.y());
  };

  for (int i = 0; i < steps; ++i) {
    s_exec += step_len;
    Vec2 delta = step_len * dir;

    bool touching_wall = false;
    if (env.wall) {
      const Vec2 n = side_normal(env.wall->side);
      const double face = env.side_bound(env.wall->side) - env.wall->thickness;
      const Vec2 o = origin_from_com(yaw);
      const Polygon poly = obj.footprint.rotated(yaw).translated(o);
      double lo, hi;
      poly.extent(n, lo, hi);
      touching_wall = hi >= face - 1e-9;
      const double want = delta.dot(n);
      if (want > 0) {
        const double room = std::max(0.0, face - hi);
        const double blocked = std::max(0.0, want - room);
        if (blocked > 0) {
          delta -= blocked * n;
          wall_acc = std::min(sp.tilt_max, wall_acc + sp.k_wall * blocked);
          touching_wall = true;
        }
      }
    }
    if (env.wall && !touching_wall) wall_acc = 0.0;

    const double exec = delta.norm();
    // Saturated against the wall with tilt at cap: motion stops.
    if (exec < 0.05 * step_len && wall_acc >= sp.tilt_max - 1e-12) break;

    com += delta;
    const double u2 = r_c.squaredNorm();
    if (u2 > 1e-12 && exec > 0) {
      const double dyaw = sp.k_rot * exec * cross2(-r_c, dir) / u2;
      yaw += dyaw;
      dyaw_total += dyaw;
      const double c = std::cos(dyaw), s = std::sin(dyaw);
      r_c = Vec2(c * r_c.x() - s * r_c.y(), s * r_c.x() + c * r_c.y());
    }

    const Vec2 o = origin_from_com(yaw);
    pose = settle(env, obj, o.x(), o.y(), yaw, touching_wall ? wall_acc : 0.0);
    if (!com_supported(env, com)) {
      pose.supported = false;
      safety = SafetyEvent::ObjectFell;
      break;
    }
  }

  PushOutcome out;
  out.new_pose = pose;
  out.safety = safety;
  const Vec2 gripper = Vec2(action.contact.x(), action.contact.y()) +
                       (safety == SafetyEvent::ObjectFell ? s_exec : total) * dir;
  out.slip = (com + r_c - gripper).norm();
  out.rotation = Vec3(pose.tilt - tilt0, 0.0, dyaw_total);
  return out;
}

}  // namespace pgr::scenesim
