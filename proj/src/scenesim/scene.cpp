#include "scenesim/scene.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace pgr::scenesim {

Rect EnvFeatureSpec::wall_strip() const {
  Rect r = table_rect();
  if (!wall) return {0, 0, 0, 0};
  switch (wall->side) {
    case Side::PosX: r.x0 = table_width - wall->thickness; break;
    case Side::NegX: r.x1 = wall->thickness; break;
    case Side::PosY: r.y0 = table_depth - wall->thickness; break;
    case Side::NegY: r.y1 = wall->thickness; break;
  }
  return r;
}

void EnvFeatureSpec::validate() const {
  if (table_width <= 0 || table_depth <= 0 || table_height <= 0)
    fail(Err::InvalidConfig, "table dimensions must be positive");
  const Rect t = table_rect();
  auto check_inside = [&](const Rect& r, const char* what) {
    if (r.x0 < t.x0 - 1e-9 || r.x1 > t.x1 + 1e-9 || r.y0 < t.y0 - 1e-9 ||
        r.y1 > t.y1 + 1e-9 || r.width() <= 0 || r.height() <= 0)
      fail(Err::InvalidConfig, std::string(what) + " footprint outside table");
  };
  std::vector<Rect> solids;
  if (wall) {
    if (wall->height <= 0 || wall->thickness <= 0)
      fail(Err::InvalidConfig, "wall dimensions must be positive");
    solids.push_back(wall_strip());
  }
  if (slope) {
    check_inside(slope->footprint, "slope");
    if (slope->incline <= 0) fail(Err::InvalidConfig, "slope incline <= 0");
    solids.push_back(slope->footprint);
  }
  if (slot) {
    check_inside(slot->footprint, "slot");
    if (slot->depth <= 0) fail(Err::InvalidConfig, "slot depth <= 0");
    solids.push_back(slot->footprint);
  }
  for (size_t i = 0; i < solids.size(); ++i)
    for (size_t j = i + 1; j < solids.size(); ++j)
      if (solids[i].overlaps(solids[j]))
        fail(Err::InvalidConfig, "environment features overlap");
}

void ObjectModel::finalize() {
  if (footprint.v.size() < 3) fail(Err::InvalidConfig, "degenerate footprint");
  footprint.ensure_ccw();
  if (footprint.area() <= 1e-9) fail(Err::InvalidConfig, "zero-area footprint");
  if (thickness <= 0) fail(Err::InvalidConfig, "thickness must be positive");
  com = footprint.centroid();
}

SceneKind scene_kind_from_string(const std::string& s) {
  if (s == "edge") return SceneKind::Edge;
  if (s == "wall") return SceneKind::Wall;
  if (s == "slope") return SceneKind::Slope;
  if (s == "slot") return SceneKind::Slot;
  if (s == "multi") return SceneKind::Multi;
  fail(Err::Usage, "unknown scene kind: " + s);
}

std::string to_string(SceneKind k) {
  switch (k) {
    case SceneKind::Edge: return "edge";
    case SceneKind::Wall: return "wall";
    case SceneKind::Slope: return "slope";
    case SceneKind::Slot: return "slot";
    default: return "multi";
  }
}

EnvFeatureSpec make_env(SceneKind kind) {
  EnvFeatureSpec env;
  switch (kind) {
    case SceneKind::Edge:
      env.edge = EdgeFeature{Side::PosX};
      break;
    case SceneKind::Wall:
      env.wall = WallFeature{Side::PosX, 0.10, 0.04};
      break;
    case SceneKind::Slope:
      env.slope = SlopeFeature{{0.80, 0.25, 1.10, 0.55}, 0.30, Side::PosX};
      break;
    case SceneKind::Slot:
      env.slot = SlotFeature{{0.75, 0.28, 0.90, 0.52}, 0.05};
      break;
    case SceneKind::Multi:
      env.edge = EdgeFeature{Side::PosX};
      env.wall = WallFeature{Side::NegX, 0.10, 0.04};
      env.slope = SlopeFeature{{0.45, 0.55, 0.75, 0.80}, 0.30, Side::PosY};
      env.slot = SlotFeature{{0.45, 0.05, 0.60, 0.30}, 0.05};
      break;
  }
  env.validate();
  return env;
}

// ---- feature geometry helpers ----

namespace {

double seg_seg_dist(const Vec2& a, const Vec2& b, const Vec2& c,
                    const Vec2& d) {
  auto pt_seg = [](const Vec2& p, const Vec2& s0, const Vec2& s1) {
    const Vec2 e = s1 - s0;
    const double l2 = e.squaredNorm();
    double t = l2 > 0 ? (p - s0).dot(e) / l2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (s0 + t * e)).norm();
  };
  // Segments in this code never intersect when we query distance; a
  // vertex-to-segment minimum is sufficient.
  return std::min(std::min(pt_seg(a, c, d), pt_seg(b, c, d)),
                  std::min(pt_seg(c, a, b), pt_seg(d, a, b)));
}

double poly_rect_distance(const Polygon& poly, const Rect& r) {
  if (clip_to_rect(poly, r).area() > 1e-12) return 0.0;
  const Vec2 c0(r.x0, r.y0), c1(r.x1, r.y0), c2(r.x1, r.y1), c3(r.x0, r.y1);
  const Vec2 rc[4][2] = {{c0, c1}, {c1, c2}, {c2, c3}, {c3, c0}};
  double best = 1e9;
  const size_t n = poly.v.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = poly.v[i];
    const Vec2& b = poly.v[(i + 1) % n];
    for (const auto& e : rc) best = std::min(best, seg_seg_dist(a, b, e[0], e[1]));
  }
  return best;
}

// Entry line of the slope: the side opposite the rise side.
void slope_entry(const SlopeFeature& s, Vec2& axis, double& entry_coord,
                 double& back_coord) {
  axis = side_normal(s.rise_side);
  const Rect& r = s.footprint;
  switch (s.rise_side) {
    case Side::PosX: entry_coord = r.x0; back_coord = r.x1; break;
    case Side::NegX: entry_coord = -r.x1; back_coord = -r.x0; break;
    case Side::PosY: entry_coord = r.y0; back_coord = r.y1; break;
    case Side::NegY: entry_coord = -r.y1; back_coord = -r.y0; break;
  }
}

double slope_height_at(const SlopeFeature& s, const Vec2& p) {
  Vec2 axis;
  double entry, back;
  slope_entry(s, axis, entry, back);
  const double c = std::clamp(p.dot(axis), entry, back);
  return (c - entry) * std::tan(s.incline);
}

}  // namespace

FeatureContact feature_contact(const SceneState& state) {
  FeatureContact fc;
  const EnvFeatureSpec& env = state.env;
  const Polygon poly = state.pose.planar_footprint(state.object);
  if (env.edge) {
    const Vec2 n = side_normal(env.edge->side);
    const double b = env.side_bound(env.edge->side);
    double lo, hi;
    poly.extent(n, lo, hi);
    fc.edge_distance = std::max(0.0, b - hi);
    if (hi > b) {
      // Clip away the on-table part to get the overhang area.
      Rect overhang{-10, -10, 10, 10};
      switch (env.edge->side) {
        case Side::PosX: overhang.x0 = env.table_width; break;
        case Side::NegX: overhang.x1 = 0; break;
        case Side::PosY: overhang.y0 = env.table_depth; break;
        case Side::NegY: overhang.y1 = 0; break;
      }
      fc.edge_overhang_area = clip_to_rect(poly, overhang).area();
    }
  }
  if (env.wall) {
    const Vec2 n = side_normal(env.wall->side);
    const double face = env.side_bound(env.wall->side) - env.wall->thickness;
    double lo, hi;
    poly.extent(n, lo, hi);
    fc.wall_distance = std::max(0.0, face - hi);
    fc.wall_contact = fc.wall_distance <= 1e-9;
  }
  if (env.slope) {
    fc.slope_distance = poly_rect_distance(poly, env.slope->footprint);
    const Polygon ov = clip_to_rect(poly, env.slope->footprint);
    fc.slope_overlap_area = std::max(0.0, ov.area());
    if (fc.slope_overlap_area > 1e-12) {
      Vec2 axis;
      double entry, back;
      slope_entry(*env.slope, axis, entry, back);
      double lo, hi;
      ov.extent(axis, lo, hi);
      fc.slope_penetration = std::max(0.0, hi - entry);
    }
  }
  if (env.slot) {
    fc.slot_distance = poly_rect_distance(poly, env.slot->footprint);
    const Polygon ov = clip_to_rect(poly, env.slot->footprint);
    fc.slot_overlap_area = std::max(0.0, ov.area());
    if (fc.slot_overlap_area > 1e-12) {
      // Entry side: the slot boundary nearest to the object's off-slot mass.
      const Vec2 sc = env.slot->footprint.center();
      const Vec2 pc = poly.centroid();
      Vec2 d = pc - sc;
      Vec2 axis = std::abs(d.x()) >= std::abs(d.y())
                      ? Vec2(d.x() >= 0 ? -1 : 1, 0)
                      : Vec2(0, d.y() >= 0 ? -1 : 1);
      // axis points from the lip into the slot; lip coordinate along axis.
      const Rect& r = env.slot->footprint;
      double lip;
      if (axis.x() > 0.5) lip = r.x0;
      else if (axis.x() < -0.5) lip = -r.x1;
      else if (axis.y() > 0.5) lip = r.y0;
      else lip = -r.y1;
      double lo, hi;
      ov.extent(axis, lo, hi);
      fc.slot_penetration = std::max(0.0, hi - lip);
    }
  }
  return fc;
}

Vec2 clamp_out_of_wall(const EnvFeatureSpec& env, const ObjectModel& obj,
                       double x, double y, double yaw) {
  if (!env.wall) return {x, y};
  const Vec2 n = side_normal(env.wall->side);
  const double face = env.side_bound(env.wall->side) - env.wall->thickness;
  const Polygon poly = obj.footprint.rotated(yaw).translated(Vec2(x, y));
  double lo, hi;
  poly.extent(n, lo, hi);
  if (hi > face) {
    const Vec2 shift = (hi - face) * n;
    return Vec2(x, y) - shift;
  }
  return {x, y};
}

ObjectPose settle(const EnvFeatureSpec& env, const ObjectModel& obj, double x,
                  double y, double yaw, double wall_tilt) {
  ObjectPose pose;
  pose.x = x;
  pose.y = y;
  pose.yaw = yaw;
  SceneState probe{env, obj, pose, 0};
  const FeatureContact fc = feature_contact(probe);
  const Polygon poly = pose.planar_footprint(obj);
  const Vec2 com = pose.planar_com(obj);

  struct TiltCandidate {
    double tilt = 0;
    Vec2 raised{1, 0};  // unit direction from pivot toward the raised side
    Vec2 pivot{0, 0};
    double elevation = 0;
  };
  TiltCandidate best;

  if (env.slope && fc.slope_overlap_area > 1e-9) {
    Vec2 axis;
    double entry, back;
    slope_entry(*env.slope, axis, entry, back);
    double lo, hi;
    poly.extent(axis, lo, hi);
    const double len = hi - lo;
    const double pen = fc.slope_penetration;
    TiltCandidate c;
    c.raised = axis;
    // Trailing support line: the footprint's rear extreme along the axis.
    Vec2 rear = poly.v[0];
    for (const auto& p : poly.v)
      if (p.dot(axis) < rear.dot(axis)) rear = p;
    c.pivot = rear;
    if (pen >= len - 1e-12) {
      c.tilt = env.slope->incline;
      c.elevation = std::max(0.0, (pen - len)) * std::tan(env.slope->incline);
    } else {
      c.tilt = std::min(std::atan2(pen * std::tan(env.slope->incline), len),
                        env.slope->incline);
    }
    if (c.tilt > best.tilt) best = c;
  }

  if (env.slot && fc.slot_overlap_area > 1e-9) {
    const Rect& r = env.slot->footprint;
    const Vec2 sc = r.center();
    const Vec2 pc = poly.centroid();
    Vec2 d = pc - sc;
    Vec2 axis = std::abs(d.x()) >= std::abs(d.y())
                    ? Vec2(d.x() >= 0 ? -1 : 1, 0)
                    : Vec2(0, d.y() >= 0 ? -1 : 1);
    double lip, far_lip;
    if (axis.x() > 0.5) { lip = r.x0; far_lip = r.x1; }
    else if (axis.x() < -0.5) { lip = -r.x1; far_lip = -r.x0; }
    else if (axis.y() > 0.5) { lip = r.y0; far_lip = r.y1; }
    else { lip = -r.y1; far_lip = -r.y0; }

    double lo, hi;
    poly.extent(axis, lo, hi);
    const bool fully_inside = clip_to_rect(poly, r).area() >=
                              poly.area() - 1e-12;
    const bool bridges = hi >= far_lip - 1e-9;
    const bool tips = com.dot(axis) > lip + 1e-9;
    if (!fully_inside && !bridges && tips) {
      TiltCandidate c;
      const double pen = std::max(1e-6, hi - lip);
      c.tilt = std::min(std::atan2(env.slot->depth, pen), 0.5);
      c.raised = -axis;  // the rear rim rises as the front dips in
      // Pivot on the lip line, at the point nearest the COM.
      if (std::abs(axis.x()) > 0.5)
        c.pivot = Vec2(std::abs(lip), std::clamp(com.y(), r.y0, r.y1));
      else
        c.pivot = Vec2(std::clamp(com.x(), r.x0, r.x1), std::abs(lip));
      if (c.tilt > best.tilt) best = c;
    }
    // Small objects fully over the opening rest flush (grate behavior).
  }

  if (env.wall && wall_tilt > 0 && fc.wall_contact && wall_tilt > best.tilt) {
    TiltCandidate c;
    c.tilt = wall_tilt;
    c.raised = side_normal(env.wall->side);
    Vec2 rear = poly.v[0];
    for (const auto& p : poly.v)
      if (p.dot(c.raised) < rear.dot(c.raised)) rear = p;
    c.pivot = rear;
    best = c;
  }

  pose.tilt = best.tilt;
  pose.elevation = best.elevation;
  pose.pivot = best.pivot;
  // Axis oriented so positive tilt raises the `raised` side:
  // cross2(axis, raised) must be positive.
  pose.tilt_axis = Vec2(best.raised.y(), -best.raised.x());
  pose.supported = com_supported(env, com);
  return pose;
}

double support_height(const EnvFeatureSpec& env, const Vec2& p) {
  if (env.wall && env.wall_strip().contains(p)) return env.wall->height;
  if (env.slope && env.slope->footprint.contains(p))
    return slope_height_at(*env.slope, p);
  if (env.slot && env.slot->footprint.contains(p)) return -env.slot->depth;
  if (env.table_rect().contains(p)) return 0.0;
  return -env.table_height;
}

bool com_supported(const EnvFeatureSpec& env, const Vec2& com) {
  return env.table_rect().contains(com);
}

Vec2 feature_anchor(const EnvFeatureSpec& env, const Vec2& from) {
  Vec2 best(env.table_width, from.y());
  double best_d = 1e18;
  auto consider = [&](const Vec2& p) {
    const double d = (p - from).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  };
  const Rect t = env.table_rect();
  if (env.edge) {
    switch (env.edge->side) {
      case Side::PosX: consider({t.x1, std::clamp(from.y(), t.y0, t.y1)}); break;
      case Side::NegX: consider({t.x0, std::clamp(from.y(), t.y0, t.y1)}); break;
      case Side::PosY: consider({std::clamp(from.x(), t.x0, t.x1), t.y1}); break;
      case Side::NegY: consider({std::clamp(from.x(), t.x0, t.x1), t.y0}); break;
    }
  }
  if (env.wall) {
    const Rect w = env.wall_strip();
    switch (env.wall->side) {
      case Side::PosX: consider({w.x0, std::clamp(from.y(), w.y0, w.y1)}); break;
      case Side::NegX: consider({w.x1, std::clamp(from.y(), w.y0, w.y1)}); break;
      case Side::PosY: consider({std::clamp(from.x(), w.x0, w.x1), w.y0}); break;
      case Side::NegY: consider({std::clamp(from.x(), w.x0, w.x1), w.y1}); break;
    }
  }
  if (env.slope) {
    const Rect& r = env.slope->footprint;
    switch (env.slope->rise_side) {
      case Side::PosX: consider({r.x0, std::clamp(from.y(), r.y0, r.y1)}); break;
      case Side::NegX: consider({r.x1, std::clamp(from.y(), r.y0, r.y1)}); break;
      case Side::PosY: consider({std::clamp(from.x(), r.x0, r.x1), r.y0}); break;
      case Side::NegY: consider({std::clamp(from.x(), r.x0, r.x1), r.y1}); break;
    }
  }
  if (env.slot) {
    const Rect& r = env.slot->footprint;
    const Vec2 c(std::clamp(from.x(), r.x0, r.x1),
                 std::clamp(from.y(), r.y0, r.y1));
    if (!r.contains(from)) {
      consider(c);
    } else {
      // Nearest boundary point from inside.
      const double dx = std::min(from.x() - r.x0, r.x1 - from.x());
      const double dy = std::min(from.y() - r.y0, r.y1 - from.y());
      if (dx < dy)
        consider({from.x() - r.x0 < r.x1 - from.x() ? r.x0 : r.x1, from.y()});
      else
        consider({from.x(), from.y() - r.y0 < r.y1 - from.y() ? r.y0 : r.y1});
    }
  }
  return best;
}

double feature_distance(const EnvFeatureSpec& env, const Polygon& footprint) {
  double best = 1e18;
  if (env.edge) {
    const Vec2 n = side_normal(env.edge->side);
    double lo, hi;
    footprint.extent(n, lo, hi);
    best = std::min(best, std::max(0.0, env.side_bound(env.edge->side) - hi));
  }
  if (env.wall) {
    const Vec2 n = side_normal(env.wall->side);
    double lo, hi;
    footprint.extent(n, lo, hi);
    const double face = env.side_bound(env.wall->side) - env.wall->thickness;
    best = std::min(best, std::max(0.0, face - hi));
  }
  if (env.slope)
    best = std::min(best, poly_rect_distance(footprint, env.slope->footprint));
  if (env.slot)
    best = std::min(best, poly_rect_distance(footprint, env.slot->footprint));
  return best;
}

// ---- object surface queries ----

double surface_distance(const SceneState& state, const Vec3& p) {
  const Iso3 inv = state.pose.transform().inverse();
  const Vec3 q = inv * p;
  const Vec2 xy(q.x(), q.y());
  const double t = state.object.thickness;
  const double bd = state.object.footprint.boundary_distance(xy);
  const bool in_xy = state.object.footprint.contains(xy);
  if (in_xy && q.z() >= 0 && q.z() <= t)
    return std::min({bd, q.z(), t - q.z()});
  const double dxy = in_xy ? 0.0 : bd;
  const double dz = q.z() < 0 ? -q.z() : (q.z() > t ? q.z() - t : 0.0);
  return std::hypot(dxy, dz);
}

Vec3 surface_normal(const SceneState& state, const Vec3& p) {
  const Iso3 T = state.pose.transform();
  const Vec3 q = T.inverse() * p;
  const Vec2 xy(q.x(), q.y());
  const double t = state.object.thickness;
  const double bd = state.object.footprint.boundary_distance(xy);
  const double d_top = std::abs(t - q.z());
  const double d_bot = std::abs(q.z());
  Vec3 n_local;
  if (bd <= std::min(d_top, d_bot)) {
    // Nearest side face: outward edge normal near the closest boundary point.
    double best = 1e18;
    double s_best = 0, s_acc = 0;
    const auto& v = state.object.footprint.v;
    const size_t n = v.size();
    for (size_t i = 0; i < n; ++i) {
      const Vec2& a = v[i];
      const Vec2& b = v[(i + 1) % n];
      const Vec2 e = b - a;
      const double l2 = e.squaredNorm();
      double u = l2 > 0 ? (xy - a).dot(e) / l2 : 0.0;
      u = std::clamp(u, 0.0, 1.0);
      const double d = (xy - (a + u * e)).norm();
      if (d < best) {
        best = d;
        s_best = s_acc + u * std::sqrt(l2);
      }
      s_acc += std::sqrt(l2);
    }
    const Vec2 n2 = state.object.footprint.normal_at_arclength(s_best);
    n_local = Vec3(n2.x(), n2.y(), 0);
  } else if (d_top <= d_bot) {
    n_local = Vec3(0, 0, 1);
  } else {
    n_local = Vec3(0, 0, -1);
  }
  return T.linear() * n_local;
}

bool object_contains(const SceneState& state, const Vec3& p, double inflate) {
  if (inflate > 0) return surface_distance(state, p) <= inflate ||
                          object_contains(state, p, 0.0);
  const Vec3 q = state.pose.transform().inverse() * p;
  return q.z() >= 0 && q.z() <= state.object.thickness &&
         state.object.footprint.contains(Vec2(q.x(), q.y()));
}

double clearance_at(const SceneState& state, const Vec3& p,
                    double eps_contact) {
  if (surface_distance(state, p) > eps_contact)
    fail(Err::ContactOffObject, "clearance query off the object surface");
  const Iso3 T = state.pose.transform();
  const Vec3 q = T.inverse() * p;
  const Vec3 bottom = T * Vec3(q.x(), q.y(), 0.0);
  const double support = support_height(state.env, Vec2(bottom.x(), bottom.y()));
  return std::max(0.0, bottom.z() - support);
}

// ---- serialization ----

static nlohmann::json rect_to_json(const Rect& r) {
  return {{"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1}};
}
static Rect rect_from_json(const nlohmann::json& j) {
  return {j.at("x0"), j.at("y0"), j.at("x1"), j.at("y1")};
}
static const char* side_names[] = {"pos_x", "neg_x", "pos_y", "neg_y"};
static Side side_from_json(const nlohmann::json& j) {
  const std::string s = j;
  for (int i = 0; i < 4; ++i)
    if (s == side_names[i]) return static_cast<Side>(i);
  fail(Err::InvalidConfig, "bad side: " + s);
}

nlohmann::json env_to_json(const EnvFeatureSpec& env) {
  nlohmann::json j{{"scene_schema_version", 1},
                   {"table_width", env.table_width},
                   {"table_depth", env.table_depth},
                   {"table_height", env.table_height}};
  if (env.edge) j["edge"] = {{"side", side_names[int(env.edge->side)]}};
  if (env.wall)
    j["wall"] = {{"side", side_names[int(env.wall->side)]},
                 {"height", env.wall->height},
                 {"thickness", env.wall->thickness}};
  if (env.slope)
    j["slope"] = {{"footprint", rect_to_json(env.slope->footprint)},
                  {"incline", env.slope->incline},
                  {"rise_side", side_names[int(env.slope->rise_side)]}};
  if (env.slot)
    j["slot"] = {{"footprint", rect_to_json(env.slot->footprint)},
                 {"depth", env.slot->depth}};
  return j;
}

EnvFeatureSpec env_from_json(const nlohmann::json& j) {
  if (j.value("scene_schema_version", 0) != 1)
    fail(Err::SchemaMismatch, "unsupported scene_schema_version");
  EnvFeatureSpec env;
  env.table_width = j.at("table_width");
  env.table_depth = j.at("table_depth");
  env.table_height = j.at("table_height");
  if (j.contains("edge")) env.edge = EdgeFeature{side_from_json(j["edge"]["side"])};
  if (j.contains("wall"))
    env.wall = WallFeature{side_from_json(j["wall"]["side"]),
                           j["wall"]["height"], j["wall"]["thickness"]};
  if (j.contains("slope"))
    env.slope = SlopeFeature{rect_from_json(j["slope"]["footprint"]),
                             j["slope"]["incline"],
                             side_from_json(j["slope"]["rise_side"])};
  if (j.contains("slot"))
    env.slot = SlotFeature{rect_from_json(j["slot"]["footprint"]),
                           j["slot"]["depth"]};
  env.validate();
  return env;
}

nlohmann::json object_to_json(const ObjectModel& obj) {
  nlohmann::json verts = nlohmann::json::array();
  for (const auto& p : obj.footprint.v) verts.push_back({p.x(), p.y()});
  return {{"id", obj.id},
          {"category", obj.category},
          {"footprint", verts},
          {"thickness", obj.thickness},
          {"graspable", obj.graspable_tag}};
}

ObjectModel object_from_json(const nlohmann::json& j) {
  ObjectModel obj;
  obj.id = j.at("id");
  obj.category = j.at("category");
  for (const auto& p : j.at("footprint"))
    obj.footprint.v.emplace_back(p[0].get<double>(), p[1].get<double>());
  obj.thickness = j.at("thickness");
  obj.graspable_tag = j.at("graspable");
  obj.finalize();
  return obj;
}

nlohmann::json pose_to_json(const ObjectPose& pose) {
  return {{"x", pose.x},
          {"y", pose.y},
          {"yaw", pose.yaw},
          {"tilt", pose.tilt},
          {"tilt_axis", {pose.tilt_axis.x(), pose.tilt_axis.y()}},
          {"pivot", {pose.pivot.x(), pose.pivot.y()}},
          {"elevation", pose.elevation},
          {"supported", pose.supported}};
}

ObjectPose pose_from_json(const nlohmann::json& j) {
  ObjectPose p;
  p.x = j.at("x");
  p.y = j.at("y");
  p.yaw = j.at("yaw");
  p.tilt = j.at("tilt");
  p.tilt_axis = Vec2(j.at("tilt_axis")[0], j.at("tilt_axis")[1]);
  p.pivot = Vec2(j.at("pivot")[0], j.at("pivot")[1]);
  p.elevation = j.at("elevation");
  p.supported = j.at("supported");
  return p;
}

nlohmann::json state_to_json(const SceneState& s) {
  return {{"env", env_to_json(s.env)},
          {"object", object_to_json(s.object)},
          {"pose", pose_to_json(s.pose)},
          {"seed", s.seed}};
}

SceneState state_from_json(const nlohmann::json& j) {
  SceneState s;
  s.env = env_from_json(j.at("env"));
  s.object = object_from_json(j.at("object"));
  s.pose = pose_from_json(j.at("pose"));
  s.seed = j.at("seed");
  return s;
}

}  // namespace pgr::scenesim
