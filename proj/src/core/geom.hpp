#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <vector>

namespace pgr {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Iso3 = Eigen::Isometry3d;

inline double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Axis-aligned rectangle on the table plane.
struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool contains(const Vec2& p) const {
    return p.x() >= x0 && p.x() <= x1 && p.y() >= y0 && p.y() <= y1;
  }
  Vec2 center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool overlaps(const Rect& o) const {
    return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
  }
};

// Simple polygon, counter-clockwise winding.
struct Polygon {
  std::vector<Vec2> v;

  double area() const;
  Vec2 centroid() const;
  bool contains(const Vec2& p) const;  // boundary counts as inside
  double perimeter() const;
  Vec2 point_at_arclength(double s) const;  // s in [0, perimeter)
  // Outward edge normal of the edge containing arclength s.
  Vec2 normal_at_arclength(double s) const;
  // Distance from p to the polygon boundary (0 if on it).
  double boundary_distance(const Vec2& p) const;
  // Signed extent [lo, hi] of the vertices along unit direction d.
  void extent(const Vec2& d, double& lo, double& hi) const;
  bool is_convex() const;
  void ensure_ccw();

  Polygon translated(const Vec2& t) const;
  Polygon rotated(double yaw) const;  // about origin
};

// Sutherland-Hodgman clip of a polygon against an axis-aligned rect.
Polygon clip_to_rect(const Polygon& poly, const Rect& r);

// ---- rotations ----
// Euler convention used throughout: R = Rz(gamma) * Ry(beta) * Rx(alpha).
Mat3 euler_to_matrix(const Vec3& euler);
Vec3 matrix_to_euler(const Mat3& R);

// Continuous 6-value rotation representation: first two columns of R,
// recovered by Gram-Schmidt.
Eigen::Matrix<double, 6, 1> matrix_to_rot6(const Mat3& R);
Mat3 rot6_to_matrix(const Eigen::Matrix<double, 6, 1>& r6);

// Gripper frame conventions derived from a grasp orientation.
inline Vec3 approach_dir(const Mat3& R) { return R * Vec3(0, 0, -1); }
inline Vec3 closing_dir(const Mat3& R) { return R * Vec3(1, 0, 0); }

// Rotation whose approach axis is aligned with `a` (unit) with a roll angle
// about it; used by samplers.
Mat3 orientation_from_approach(const Vec3& a, double roll);

}  // namespace pgr
