#include "scenesim/sampling.hpp"

#include <cmath>

#include "core/error.hpp"

namespace pgr::scenesim {

namespace {

enum class Feat { Edge, Wall, Slope, Slot };

Feat pick_feature(const EnvFeatureSpec& env, Rng& rng) {
  std::vector<Feat> have;
  if (env.edge) have.push_back(Feat::Edge);
  if (env.wall) have.push_back(Feat::Wall);
  if (env.slope) have.push_back(Feat::Slope);
  if (env.slot) have.push_back(Feat::Slot);
  if (have.empty()) fail(Err::InvalidConfig, "scene has no feature");
  return have[rng.uniform_int(have.size())];
}

// Directed line of a feature: unit normal n pointing from the table interior
// toward the feature, offset b with the line at n.p = b, and the lateral
// interval the footprint must stay in (table) or overlap (slope/slot rect).
struct FeatLine {
  Vec2 n;
  double b = 0;
  double t0 = 0, t1 = 0;  // lateral interval along the tangent
  bool need_overlap = false;
};

FeatLine feat_line(const EnvFeatureSpec& env, Feat f) {
  FeatLine L;
  const Rect t = env.table_rect();
  switch (f) {
    case Feat::Edge: {
      L.n = side_normal(env.edge->side);
      L.b = env.side_bound(env.edge->side);
      break;
    }
    case Feat::Wall: {
      L.n = side_normal(env.wall->side);
      L.b = env.side_bound(env.wall->side) - env.wall->thickness;
      break;
    }
    case Feat::Slope: {
      // Entry edge is the low side of the wedge, opposite the rise.
      const Rect& r = env.slope->footprint;
      switch (env.slope->rise_side) {
        case Side::PosX: L.n = {1, 0}; L.b = r.x0; L.t0 = r.y0; L.t1 = r.y1; break;
        case Side::NegX: L.n = {-1, 0}; L.b = -r.x1; L.t0 = r.y0; L.t1 = r.y1; break;
        case Side::PosY: L.n = {0, 1}; L.b = r.y0; L.t0 = r.x0; L.t1 = r.x1; break;
        case Side::NegY: L.n = {0, -1}; L.b = -r.y1; L.t0 = r.x0; L.t1 = r.x1; break;
      }
      L.need_overlap = true;
      break;
    }
    case Feat::Slot: {
      // Approach from the rect side with the most table room.
      const Rect& r = env.slot->footprint;
      struct Cand { Vec2 n; double b, t0, t1, room; };
      const Cand cands[] = {
          {{1, 0}, r.x0, r.y0, r.y1, r.x0 - t.x0},
          {{-1, 0}, -r.x1, r.y0, r.y1, t.x1 - r.x1},
          {{0, 1}, r.y0, r.x0, r.x1, r.y0 - t.y0},
          {{0, -1}, -r.y1, r.x0, r.x1, t.y1 - r.y1},
      };
      const Cand* best = &cands[0];
      for (const auto& c : cands)
        if (c.room > best->room) best = &c;
      L.n = best->n;
      L.b = best->b;
      L.t0 = best->t0;
      L.t1 = best->t1;
      L.need_overlap = true;
      break;
    }
  }
  if (!L.need_overlap) {
    // Lateral range is the whole table side.
    if (std::abs(L.n.x()) > 0.5) { L.t0 = t.y0; L.t1 = t.y1; }
    else { L.t0 = t.x0; L.t1 = t.x1; }
  }
  return L;
}

bool footprint_on_table(const EnvFeatureSpec& env, const Polygon& fp) {
  const Rect t = env.table_rect();
  double lo, hi;
  fp.extent({1, 0}, lo, hi);
  if (lo < t.x0 || hi > t.x1) return false;
  fp.extent({0, 1}, lo, hi);
  return lo >= t.y0 && hi <= t.y1;
}

}  // namespace

SceneState sample_scene_state(SceneKind kind, const std::string& category,
                              std::uint64_t seed, bool allow_on_feature,
                              const PlacementConfig& pc, const SimParams& sp) {
  Rng rng(mix_seed(seed, 0x5cee5a));
  SceneState s;
  s.env = make_env(kind);
  s.object = make_object(category, rng.next());
  s.seed = seed;

  const bool on_feature =
      allow_on_feature && rng.uniform01() < pc.on_feature_prob;

  for (int attempt = 0; attempt < 400; ++attempt) {
    const Feat feat = pick_feature(s.env, rng);
    const FeatLine L = feat_line(s.env, feat);
    const Vec2 tang(-L.n.y(), L.n.x());

    const double yaw = rng.uniform(-M_PI, M_PI);
    const Polygon fp = s.object.footprint.rotated(yaw);
    double nlo, nhi, tlo, thi;
    fp.extent(L.n, nlo, nhi);
    fp.extent(tang, tlo, thi);
    const double span = nhi - nlo;

    double gap;  // signed gap along n; negative reaches past the line
    double wall_tilt = 0.0;
    if (!on_feature) {
      gap = rng.uniform(pc.dist_min, pc.dist_max);
    } else {
      switch (feat) {
        case Feat::Edge:
          gap = -rng.uniform(0.02, std::min(0.45 * span, 0.10));
          break;
        case Feat::Wall:
          gap = 0.0;
          wall_tilt = rng.uniform(0.05, sp.tilt_max);
          break;
        case Feat::Slope:
          gap = -rng.uniform(0.03, 0.8 * span);
          break;
        case Feat::Slot:
          gap = -rng.uniform(0.02, 0.9 * span);
          break;
      }
    }

    // Origin so the footprint's near extent sits at the line minus gap.
    const double along_n = L.b - gap - nhi;
    double lat_lo = L.t0 - tlo, lat_hi = L.t1 - thi;
    if (L.need_overlap) {
      // Footprint must overlap the lateral interval by at least 2 cm.
      lat_lo = L.t0 - thi + 0.02;
      lat_hi = L.t1 - tlo - 0.02;
    }
    if (lat_hi <= lat_lo) continue;
    const double along_t = rng.uniform(lat_lo, lat_hi);
    const Vec2 o = along_n * L.n + along_t * tang;

    const Polygon placed = fp.translated(o);
    if (!on_feature) {
      if (!footprint_on_table(s.env, placed)) continue;
      const double d = feature_distance(s.env, placed);
      if (d < pc.dist_min || d > pc.dist_max) continue;
    }

    const Vec2 oc = clamp_out_of_wall(s.env, s.object, o.x(), o.y(), yaw);
    ObjectPose pose = settle(s.env, s.object, oc.x(), oc.y(), yaw, wall_tilt);
    if (!pose.supported) continue;
    if (!on_feature && (pose.tilt > 1e-9 || pose.elevation != 0.0)) continue;
    if (on_feature && feat == Feat::Wall && pose.tilt < 0.04) continue;

    s.pose = pose;
    return s;
  }
  fail(Err::InvalidConfig,
       "could not place " + category + " in scene " + to_string(kind));
}

Vec3 sample_hemisphere_orientation(Rng& rng, const Vec3& n) {
  Vec3 v;
  do {
    v = Vec3(rng.normal(), rng.normal(), rng.normal());
  } while (v.norm() < 1e-6 || v.normalized().dot(n) < 0.05);
  v.normalize();
  const Mat3 R = orientation_from_approach(-v, rng.uniform(-M_PI, M_PI));
  return matrix_to_euler(R);
}

Vec3 sample_boundary_point(const SceneState& state, Rng& rng) {
  const Polygon& fp = state.object.footprint;
  const double s = rng.uniform01() * fp.perimeter();
  const Vec2 p = fp.point_at_arclength(s);
  const double z = state.object.thickness * rng.uniform(0.2, 0.8);
  return state.pose.transform() * Vec3(p.x(), p.y(), z);
}

}  // namespace pgr::scenesim
