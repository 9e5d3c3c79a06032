#include <cmath>

#include "core/error.hpp"
#include "scenesim/scene.hpp"

namespace pgr::scenesim {

namespace {

enum class EnvHit { None, Table, Wall, Slope };

double rect_box_distance(const Rect& r, double z0, double z1, const Vec3& p) {
  const double dx =
      std::max({r.x0 - p.x(), 0.0, p.x() - r.x1});
  const double dy =
      std::max({r.y0 - p.y(), 0.0, p.y() - r.y1});
  const double dz = std::max({z0 - p.z(), 0.0, p.z() - z1});
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

EnvHit env_collision(const EnvFeatureSpec& env, const Vec3& p, double rf) {
  if (env.wall) {
    const Rect w = env.wall_strip();
    if (rect_box_distance(w, 0.0, env.wall->height, p) < rf)
      return EnvHit::Wall;
  }
  if (env.slope) {
    const Rect& r = env.slope->footprint;
    const Vec2 xy(p.x(), p.y());
    const Vec2 cl(std::clamp(p.x(), r.x0 - rf, r.x1 + rf),
                  std::clamp(p.y(), r.y0 - rf, r.y1 + rf));
    if ((xy - Vec2(std::clamp(p.x(), r.x0, r.x1),
                   std::clamp(p.y(), r.y0, r.y1)))
                .norm() < rf &&
        p.z() - rf < support_height(env, cl) && p.z() + rf > 0)
      return EnvHit::Slope;
  }
  const Rect table = env.table_rect();
  const Vec2 xy(p.x(), p.y());
  if (p.z() - rf < 0) {
    if (table.contains(xy)) {
      if (env.slot && env.slot->footprint.contains(xy)) {
        if (p.z() - rf < -env.slot->depth) return EnvHit::Table;  // slot bottom
      } else {
        return EnvHit::Table;
      }
    } else if (p.z() - rf < -env.table_height) {
      return EnvHit::Table;  // floor
    }
  }
  return EnvHit::None;
}

}  // namespace

// Analytic grasp oracle. r = 1 iff:
//   (a) the approach ray enters from the open hemisphere above the local
//       tangent plane,
//   (b) the object section along the closing axis fits the opening,
//   (c) for near-vertical closing, the free gap beneath the contacted rim
//       admits the lower finger (clearance_min),
//   (d) the finger sweep volumes are collision-free against table, wall,
//       slope and slot walls.
// Lift/hold thresholds (theta_v, theta_r2) hold by construction once the
// geometric conditions do.
std::pair<int, SafetyEvent> grasp_outcome(const SceneState& state,
                                          const GraspAction& grasp,
                                          const GraspOracleConfig& cfg,
                                          const SimParams& sp) {
  if (surface_distance(state, grasp.contact) > sp.eps_contact)
    fail(Err::ContactOffObject, "grasp contact off the object surface");

  const Mat3 R = euler_to_matrix(grasp.euler);
  const Vec3 a = approach_dir(R);  // unit, points toward the surface
  const Vec3 c = closing_dir(R);
  const Vec3 n = surface_normal(state, grasp.contact);
  const double rf = cfg.clearance_min / 3.0;  // finger half-thickness

  bool ok = a.dot(n) < -1e-9;  // hemisphere above the tangent plane

  // Object section along the closing axis through the contact point.
  const double probe_step = 5e-4;
  const int half = static_cast<int>(cfg.gripper_opening / probe_step);
  double t_lo = 0, t_hi = 0;
  {
    // Find an in-solid sample near t = 0 and grow the run outward.
    int seed_idx = 0;
    bool found = false;
    for (int k = 0; k <= 4 && !found; ++k) {
      for (const int s : {k, -k}) {
        const Vec3 q = grasp.contact + s * probe_step * c;
        if (object_contains(state, q, probe_step * 0.5)) {
          seed_idx = s;
          found = true;
          break;
        }
      }
    }
    if (!found) {
      ok = false;
    } else {
      int lo = seed_idx, hi = seed_idx;
      while (lo > -half &&
             object_contains(state,
                             grasp.contact + (lo - 1) * probe_step * c,
                             probe_step * 0.5))
        --lo;
      while (hi < half &&
             object_contains(state,
                             grasp.contact + (hi + 1) * probe_step * c,
                             probe_step * 0.5))
        ++hi;
      t_lo = lo * probe_step;
      t_hi = hi * probe_step;
      if (t_hi - t_lo > cfg.gripper_opening) ok = false;
    }
  }

  // Near-vertical closing pinches a horizontal rim: the lower finger needs
  // the free gap beneath it.
  if (std::abs(c.z()) >= 0.5) {
    double gap = 0.0;
    try {
      gap = clearance_at(state, grasp.contact, sp.eps_contact);
    } catch (const Error&) {
      gap = 0.0;
    }
    if (gap < cfg.clearance_min) ok = false;
  }

  // Finger sweep volumes: closed configuration hugging the section, plus
  // approach samples at a slightly wider opening retreating along -a.
  // Near-horizontal closing presses the pads against near-vertical faces;
  // the pads extend clearance_min below the grip line and need that space
  // free, which rules out pinching a rim that sits flush on its support.
  const double pad_drop =
      std::abs(c.z()) < 0.5 ? cfg.clearance_min - rf : 0.0;
  SafetyEvent safety = SafetyEvent::None;
  bool collided = false;
  auto sweep_finger = [&](double offset, double retreat) {
    const Vec3 tip =
        grasp.contact + offset * c + cfg.close_descent * a - retreat * a;
    for (int k = 0; k < 8; ++k) {
      const Vec3 q = tip - (cfg.finger_length * k / 7.0) * a;
      EnvHit h = env_collision(state.env, q, rf);
      if (h == EnvHit::None && pad_drop > 0)
        h = env_collision(state.env, q - Vec3(0, 0, pad_drop), rf);
      if (h == EnvHit::None) continue;
      collided = true;
      if (h == EnvHit::Wall && safety == SafetyEvent::None)
        safety = SafetyEvent::GripperWallCollision;
      if (h == EnvHit::Slope && safety == SafetyEvent::None)
        safety = SafetyEvent::GripperSlopeCollision;
    }
  };
  const double o_lo = t_lo - rf, o_hi = t_hi + rf;
  for (const double retreat : {0.0, 0.04, 0.08}) {
    const double widen = retreat > 0 ? rf : 0.0;  // fingers open on approach
    sweep_finger(o_lo - widen, retreat);
    sweep_finger(o_hi + widen, retreat);
  }
  if (collided) ok = false;

  return {ok ? 1 : 0, safety};
}

}  // namespace pgr::scenesim
