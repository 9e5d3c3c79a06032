#include "cloudgen/cloudgen.hpp"

#include <cmath>
#include <limits>

#include "core/binio.hpp"
#include "core/error.hpp"

namespace pgr::cloudgen {

using scenesim::EnvFeatureSpec;
using scenesim::Side;

namespace {

constexpr double kRayEps = 1e-9;

// Convex solid as half-spaces n.p <= b; clips the ray parameter interval.
struct ConvexClip {
  double t0 = kRayEps;
  double t1 = std::numeric_limits<double>::infinity();
  bool feasible = true;

  void add(const Vec3& n, double b, const Vec3& o, const Vec3& d) {
    if (!feasible) return;
    const double nd = n.dot(d);
    const double rhs = b - n.dot(o);
    if (std::abs(nd) < 1e-15) {
      if (rhs < 0) feasible = false;
      return;
    }
    const double t = rhs / nd;
    if (nd > 0) t1 = std::min(t1, t);
    else t0 = std::max(t0, t);
    if (t0 > t1) feasible = false;
  }
  bool entry(double& t) const {
    if (!feasible || t0 > t1) return false;
    t = t0;
    return true;
  }
  bool interval(double& a, double& b) const {
    if (!feasible || t0 > t1) return false;
    a = t0;
    b = t1;
    return true;
  }
};

void add_box(ConvexClip& c, const Rect& r, double z0, double z1,
             const Vec3& o, const Vec3& d) {
  c.add({1, 0, 0}, r.x1, o, d);
  c.add({-1, 0, 0}, -r.x0, o, d);
  c.add({0, 1, 0}, r.y1, o, d);
  c.add({0, -1, 0}, -r.y0, o, d);
  c.add({0, 0, 1}, z1, o, d);
  c.add({0, 0, -1}, -z0, o, d);
}

// Table slab with the slot recess carved out of the top.
bool hit_table(const EnvFeatureSpec& env, const Vec3& o, const Vec3& d,
               double& t_hit) {
  ConvexClip slab;
  add_box(slab, env.table_rect(), -env.table_height, 0.0, o, d);
  double a0, a1;
  if (!slab.interval(a0, a1)) return false;
  if (!env.slot) {
    t_hit = a0;
    return true;
  }
  ConvexClip rec;
  add_box(rec, env.slot->footprint, -env.slot->depth, 0.0, o, d);
  double b0 = 1, b1 = 0;
  if (!rec.interval(b0, b1)) {
    t_hit = a0;
    return true;
  }
  // Inside (slab minus recess): entry at a0 unless a0 falls in the recess
  // interval, then at the recess exit if the ray is still in the slab there.
  if (a0 < b0 - 1e-12 || a0 > b1 + 1e-12) {
    t_hit = a0;
    return true;
  }
  if (b1 < a1 - 1e-12) {
    t_hit = b1;
    return true;
  }
  return false;
}

bool hit_wedge(const scenesim::SlopeFeature& sl, const Vec3& o, const Vec3& d,
               double& t_hit) {
  ConvexClip c;
  add_box(c, sl.footprint, 0.0, 10.0, o, d);  // z cap replaced by the face
  const Vec2 axis2 = side_normal(sl.rise_side);
  const Vec3 axis(axis2.x(), axis2.y(), 0);
  double entry_line;
  switch (sl.rise_side) {
    case Side::PosX: entry_line = sl.footprint.x0; break;
    case Side::NegX: entry_line = -sl.footprint.x1; break;
    case Side::PosY: entry_line = sl.footprint.y0; break;
    default: entry_line = -sl.footprint.y1; break;
  }
  // z <= tan(incline) * (axis.p - entry_line)
  const double k = std::tan(sl.incline);
  c.add(Vec3(0, 0, 1) - k * axis, -k * entry_line, o, d);
  return c.entry(t_hit);
}

bool hit_object(const SceneState& state, const Vec3& o, const Vec3& d,
                double& t_hit) {
  const Iso3 inv = state.pose.transform().inverse();
  const Vec3 lo = inv * o;
  const Vec3 ld = inv.linear() * d;
  ConvexClip c;
  c.add({0, 0, 1}, state.object.thickness, lo, ld);
  c.add({0, 0, -1}, 0.0, lo, ld);
  const auto& v = state.object.footprint.v;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 e = v[(i + 1) % v.size()] - v[i];
    const Vec2 n2(e.y(), -e.x());  // outward for ccw winding
    c.add(Vec3(n2.x(), n2.y(), 0), n2.dot(v[i]), lo, ld);
  }
  return c.entry(t_hit);
}

}  // namespace

bool raycast_scene(const SceneState& state, const Vec3& origin,
                   const Vec3& dir, double& t_hit, std::uint8_t& label) {
  const EnvFeatureSpec& env = state.env;
  double best = std::numeric_limits<double>::infinity();
  std::uint8_t best_label = kLabelEnvironment;
  auto consider = [&](double t, std::uint8_t lab) {
    if (t < best) {
      best = t;
      best_label = lab;
    }
  };

  double t;
  if (hit_table(env, origin, dir, t)) consider(t, kLabelEnvironment);
  if (env.wall) {
    ConvexClip c;
    add_box(c, env.wall_strip(), 0.0, env.wall->height, origin, dir);
    if (c.entry(t)) consider(t, kLabelEnvironment);
  }
  if (env.slope && hit_wedge(*env.slope, origin, dir, t))
    consider(t, kLabelEnvironment);
  // Floor plane outside the slab footprint.
  if (std::abs(dir.z()) > 1e-15) {
    const double tf = (-env.table_height - origin.z()) / dir.z();
    if (tf > kRayEps) {
      const Vec3 p = origin + tf * dir;
      if (!env.table_rect().contains(Vec2(p.x(), p.y())))
        consider(tf, kLabelEnvironment);
    }
  }
  if (hit_object(state, origin, dir, t)) consider(t, kLabelObject);

  if (!std::isfinite(best)) return false;
  t_hit = best;
  label = best_label;
  return true;
}

CameraPose sample_camera(const SceneState& state, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0xca3e7a));
  const Vec3 centroid =
      state.pose.transform() * Vec3(state.object.com.x(), state.object.com.y(),
                                    0.5 * state.object.thickness);
  const double r = rng.uniform(3.0, 5.0);
  // Uniform direction on the upper hemisphere (z of a uniform sphere sample
  // is uniform, so condition on z > 0).
  const double z = rng.uniform(1e-3, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * M_PI);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  const Vec3 dir(s * std::cos(phi), s * std::sin(phi), z);
  CameraPose cam;
  cam.look_at = centroid;
  cam.position = centroid + r * dir;
  cam.up = Vec3(0, 0, 1);
  return cam;
}

LabeledPointCloud render_cloud(const SceneState& state,
                               const CameraPose& camera, std::size_t n,
                               std::uint64_t seed) {
  if (n < 256) fail(Err::InvalidConfig, "cloud size must be at least 256");
  Rng rng(mix_seed(seed, 0x3e11de));

  // World AABB of the object solid.
  const Iso3 T = state.pose.transform();
  Vec3 bb_lo = Vec3::Constant(1e18), bb_hi = Vec3::Constant(-1e18);
  for (const auto& v : state.object.footprint.v) {
    for (const double z : {0.0, state.object.thickness}) {
      const Vec3 w = T * Vec3(v.x(), v.y(), z);
      bb_lo = bb_lo.cwiseMin(w);
      bb_hi = bb_hi.cwiseMax(w);
    }
  }

  LabeledPointCloud cloud;
  cloud.camera = camera;
  cloud.points.reserve(n);
  cloud.labels.reserve(n);
  const Rect table = state.env.table_rect();
  std::size_t attempts = 0;
  const std::size_t max_attempts = 400 * n;
  while (cloud.points.size() < n) {
    if (++attempts > max_attempts)
      fail(Err::ObjectOccluded, "ray sampling failed to cover the scene");
    // Half the rays aim at the object's bounding box, half at the table.
    Vec3 target;
    if (rng.uniform01() < 0.5) {
      target = Vec3(rng.uniform(bb_lo.x(), bb_hi.x()),
                    rng.uniform(bb_lo.y(), bb_hi.y()),
                    rng.uniform(bb_lo.z(), bb_hi.z()));
    } else {
      target = Vec3(rng.uniform(table.x0, table.x1),
                    rng.uniform(table.y0, table.y1), 0.0);
    }
    const Vec3 d = (target - camera.position).normalized();
    double t;
    std::uint8_t label;
    if (!raycast_scene(state, camera.position, d, t, label)) continue;
    cloud.points.push_back(camera.position + t * d);
    cloud.labels.push_back(label);
  }

  bool any_object = false;
  for (const std::uint8_t l : cloud.labels) any_object |= l == kLabelObject;
  if (!any_object)
    fail(Err::ObjectOccluded, "object not visible from the camera");
  return cloud;
}

Vec3 object_centroid(const LabeledPointCloud& cloud) {
  Vec3 sum = Vec3::Zero();
  std::size_t count = 0;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    if (cloud.labels[i] == kLabelObject) {
      sum += cloud.points[i];
      ++count;
    }
  }
  if (count == 0) fail(Err::NoObjectPoints, "cloud has no object points");
  return sum / double(count);
}

LabeledPointCloud canonicalize(const LabeledPointCloud& cloud) {
  const Vec3 c = object_centroid(cloud);
  if (c.norm() < 1e-12) return cloud;  // exact idempotence
  LabeledPointCloud out = cloud;
  for (auto& p : out.points) p -= c;
  out.camera.position -= c;
  out.camera.look_at -= c;
  return out;
}

std::vector<std::uint8_t> cloud_to_bytes(const LabeledPointCloud& cloud) {
  ByteWriter w;
  w.bytes("PGRC", 4);
  w.u16(1);  // version
  w.u32(std::uint32_t(cloud.points.size()));
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    w.f32(float(cloud.points[i].x()));
    w.f32(float(cloud.points[i].y()));
    w.f32(float(cloud.points[i].z()));
    w.u8(cloud.labels[i]);
  }
  return w.data();
}

LabeledPointCloud cloud_from_bytes(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  char magic[4];
  r.bytes(magic, 4);
  if (std::string_view(magic, 4) != "PGRC")
    fail(Err::SchemaMismatch, "not a point cloud record");
  const std::uint16_t version = r.u16();
  if (version != 1)
    fail(Err::SchemaMismatch,
         "unsupported cloud version " + std::to_string(version));
  const std::uint32_t n = r.u32();
  LabeledPointCloud cloud;
  cloud.points.reserve(n);
  cloud.labels.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const float x = r.f32(), y = r.f32(), z = r.f32();
    cloud.points.emplace_back(x, y, z);
    cloud.labels.push_back(r.u8());
  }
  return cloud;
}

void save_cloud(const std::string& path, const LabeledPointCloud& cloud) {
  write_file(path, cloud_to_bytes(cloud));
}

LabeledPointCloud load_cloud(const std::string& path) {
  return cloud_from_bytes(read_file(path));
}

}  // namespace pgr::cloudgen
