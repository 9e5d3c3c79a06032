#include "scenesim/objects.hpp"

#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace pgr::scenesim {

namespace {

struct Proto {
  CategorySpec spec;
  enum class Shape { Box, Ngon, Hex } shape;
  double dim_a;      // length / diameter
  double dim_b;      // width (boxes, hexes)
  double thickness;  // extrusion height
  int ngon = 0;
};

// 5 hard + 5 easy training categories, 4 + 4 held-out, thin plates vs
// tall narrow solids. Easy widths stay under the gripper opening.
const std::vector<Proto>& protos() {
  static const std::vector<Proto> p = {
      {{"phone", true, true}, Proto::Shape::Box, 0.16, 0.080, 0.010},
      {{"keyboard", true, true}, Proto::Shape::Box, 0.36, 0.130, 0.020},
      {{"tablet", true, true}, Proto::Shape::Box, 0.24, 0.170, 0.008},
      {{"dish", true, true}, Proto::Shape::Ngon, 0.22, 0, 0.012, 12},
      {{"scissors", true, true}, Proto::Shape::Hex, 0.20, 0.060, 0.010},
      {{"book", true, false}, Proto::Shape::Box, 0.21, 0.150, 0.022},
      {{"cd", true, false}, Proto::Shape::Ngon, 0.12, 0, 0.004, 12},
      {{"tray", true, false}, Proto::Shape::Box, 0.30, 0.200, 0.015},
      {{"clipboard", true, false}, Proto::Shape::Box, 0.23, 0.160, 0.006},
      {{"block", false, true}, Proto::Shape::Box, 0.050, 0.050, 0.060},
      {{"cup", false, true}, Proto::Shape::Ngon, 0.070, 0, 0.090, 10},
      {{"bottle", false, true}, Proto::Shape::Ngon, 0.055, 0, 0.150, 8},
      {{"can", false, true}, Proto::Shape::Ngon, 0.066, 0, 0.100, 10},
      {{"box", false, true}, Proto::Shape::Box, 0.070, 0.045, 0.080},
      {{"mug", false, false}, Proto::Shape::Ngon, 0.070, 0, 0.085, 10},
      {{"jar", false, false}, Proto::Shape::Ngon, 0.070, 0, 0.120, 8},
      {{"carton", false, false}, Proto::Shape::Box, 0.060, 0.060, 0.140},
      {{"tin", false, false}, Proto::Shape::Ngon, 0.070, 0, 0.060, 12},
  };
  return p;
}

Polygon box_poly(double a, double b) {
  Polygon p;
  p.v = {{-a / 2, -b / 2}, {a / 2, -b / 2}, {a / 2, b / 2}, {-a / 2, b / 2}};
  return p;
}

Polygon ngon_poly(double diameter, int n, Rng& rng, double radial_jitter) {
  Polygon p;
  for (int i = 0; i < n; ++i) {
    const double ang = 2.0 * M_PI * i / n;
    const double r =
        0.5 * diameter * (1.0 + radial_jitter * (rng.uniform01() - 0.5));
    p.v.emplace_back(r * std::cos(ang), r * std::sin(ang));
  }
  return p;
}

Polygon hex_poly(double a, double b) {
  // Elongated hexagon with pointed ends.
  Polygon p;
  p.v = {{-a / 2, 0},       {-a / 2 + b / 2, -b / 2}, {a / 2 - b / 2, -b / 2},
         {a / 2, 0},        {a / 2 - b / 2, b / 2},   {-a / 2 + b / 2, b / 2}};
  return p;
}

}  // namespace

const std::vector<CategorySpec>& category_table() {
  static std::vector<CategorySpec> t = [] {
    std::vector<CategorySpec> v;
    for (const auto& p : protos()) v.push_back(p.spec);
    return v;
  }();
  return t;
}

std::vector<std::string> category_set(const std::string& set) {
  bool hard, train;
  if (set == "train-hard") { hard = true; train = true; }
  else if (set == "test-hard") { hard = true; train = false; }
  else if (set == "train-easy") { hard = false; train = true; }
  else if (set == "test-easy") { hard = false; train = false; }
  else fail(Err::Usage, "unknown category set: " + set);
  std::vector<std::string> out;
  for (const auto& c : category_table())
    if (c.hard == hard && c.train == train) out.push_back(c.name);
  return out;
}

ObjectModel make_object(const std::string& category, std::uint64_t seed) {
  const Proto* proto = nullptr;
  for (const auto& p : protos())
    if (p.spec.name == category) proto = &p;
  if (!proto) fail(Err::Usage, "unknown object category: " + category);

  Rng rng(mix_seed(seed, 0x0b1ec7));
  // Easy objects stay strictly under the gripper opening.
  const double s_hi = proto->spec.hard ? 1.08 : 1.05;
  const double sx = rng.uniform(0.92, s_hi);
  const double sy = rng.uniform(0.92, s_hi);

  ObjectModel obj;
  obj.category = category;
  obj.id = category + "#" + std::to_string(seed);
  obj.graspable_tag = !proto->spec.hard;
  obj.thickness = proto->thickness * rng.uniform(0.95, 1.05);
  switch (proto->shape) {
    case Proto::Shape::Box:
      obj.footprint = box_poly(proto->dim_a * sx, proto->dim_b * sy);
      break;
    case Proto::Shape::Ngon:
      obj.footprint = ngon_poly(proto->dim_a * sx, proto->ngon, rng,
                                proto->spec.hard ? 0.06 : 0.0);
      break;
    case Proto::Shape::Hex:
      obj.footprint = hex_poly(proto->dim_a * sx, proto->dim_b * sy);
      break;
  }
  obj.finalize();
  return obj;
}

}  // namespace pgr::scenesim
