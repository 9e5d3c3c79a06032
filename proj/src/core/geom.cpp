#include "core/geom.hpp"

#include <algorithm>
#include <cmath>

namespace pgr {

double Polygon::area() const {
  double a = 0;
  const size_t n = v.size();
  for (size_t i = 0; i < n; ++i) a += cross2(v[i], v[(i + 1) % n]);
  return 0.5 * a;
}

Vec2 Polygon::centroid() const {
  Vec2 c(0, 0);
  double a = 0;
  const size_t n = v.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % n];
    const double w = cross2(p, q);
    a += w;
    c += w * (p + q);
  }
  if (std::abs(a) < 1e-300) return v.empty() ? Vec2(0, 0) : v[0];
  return c / (3.0 * a);
}

bool Polygon::contains(const Vec2& p) const {
  // Crossing count with boundary tolerance.
  if (boundary_distance(p) < 1e-12) return true;
  bool inside = false;
  const size_t n = v.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = v[i];
    const Vec2& b = v[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double t = (p.y() - a.y()) / (b.y() - a.y());
      if (p.x() < a.x() + t * (b.x() - a.x())) inside = !inside;
    }
  }
  return inside;
}

double Polygon::perimeter() const {
  double s = 0;
  const size_t n = v.size();
  for (size_t i = 0; i < n; ++i) s += (v[(i + 1) % n] - v[i]).norm();
  return s;
}

Vec2 Polygon::point_at_arclength(double s) const {
  const size_t n = v.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    const double len = (b - a).norm();
    if (s <= len || i + 1 == n) {
      const double t = len > 0 ? std::min(1.0, s / len) : 0.0;
      return a + t * (b - a);
    }
    s -= len;
  }
  return v.empty() ? Vec2(0, 0) : v[0];
}

Vec2 Polygon::normal_at_arclength(double s) const {
  const size_t n = v.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    const double len = (b - a).norm();
    if (s <= len || i + 1 == n) {
      Vec2 e = (b - a).normalized();
      return {e.y(), -e.x()};  // outward for ccw winding
    }
    s -= len;
  }
  return {1, 0};
}

static double point_segment_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double l2 = ab.squaredNorm();
  double t = l2 > 0 ? (p - a).dot(ab) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double Polygon::boundary_distance(const Vec2& p) const {
  double d = std::numeric_limits<double>::infinity();
  const size_t n = v.size();
  for (size_t i = 0; i < n; ++i)
    d = std::min(d, point_segment_dist(p, v[i], v[(i + 1) % n]));
  return d;
}

void Polygon::extent(const Vec2& d, double& lo, double& hi) const {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (const auto& p : v) {
    const double t = p.dot(d);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
}

bool Polygon::is_convex() const {
  const size_t n = v.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    const Vec2 e1 = v[(i + 1) % n] - v[i];
    const Vec2 e2 = v[(i + 2) % n] - v[(i + 1) % n];
    if (cross2(e1, e2) < -1e-12) return false;
  }
  return true;
}

void Polygon::ensure_ccw() {
  if (area() < 0) std::reverse(v.begin(), v.end());
}

Polygon Polygon::translated(const Vec2& t) const {
  Polygon out = *this;
  for (auto& p : out.v) p += t;
  return out;
}

Polygon Polygon::rotated(double yaw) const {
  Polygon out = *this;
  const double c = std::cos(yaw), s = std::sin(yaw);
  for (auto& p : out.v)
    p = Vec2(c * p.x() - s * p.y(), s * p.x() + c * p.y());
  return out;
}

static Polygon clip_halfplane(const Polygon& poly, const Vec2& n, double off) {
  // Keep points with n.dot(p) <= off.
  Polygon out;
  const size_t cnt = poly.v.size();
  for (size_t i = 0; i < cnt; ++i) {
    const Vec2& a = poly.v[i];
    const Vec2& b = poly.v[(i + 1) % cnt];
    const double da = n.dot(a) - off;
    const double db = n.dot(b) - off;
    if (da <= 0) out.v.push_back(a);
    if ((da < 0 && db > 0) || (da > 0 && db < 0)) {
      const double t = da / (da - db);
      out.v.push_back(a + t * (b - a));
    }
  }
  return out;
}

Polygon clip_to_rect(const Polygon& poly, const Rect& r) {
  Polygon p = poly;
  p = clip_halfplane(p, Vec2(1, 0), r.x1);
  p = clip_halfplane(p, Vec2(-1, 0), -r.x0);
  p = clip_halfplane(p, Vec2(0, 1), r.y1);
  p = clip_halfplane(p, Vec2(0, -1), -r.y0);
  return p;
}

Mat3 euler_to_matrix(const Vec3& e) {
  return (Eigen::AngleAxisd(e.z(), Vec3::UnitZ()) *
          Eigen::AngleAxisd(e.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(e.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

Vec3 matrix_to_euler(const Mat3& R) {
  // Inverse of Rz(g)*Ry(b)*Rx(a).
  const double beta = std::asin(std::clamp(-R(2, 0), -1.0, 1.0));
  double alpha, gamma;
  if (std::abs(R(2, 0)) < 1.0 - 1e-12) {
    alpha = std::atan2(R(2, 1), R(2, 2));
    gamma = std::atan2(R(1, 0), R(0, 0));
  } else {  // gimbal lock
    alpha = std::atan2(-R(1, 2), R(1, 1));
    gamma = 0.0;
  }
  return {alpha, beta, gamma};
}

Eigen::Matrix<double, 6, 1> matrix_to_rot6(const Mat3& R) {
  Eigen::Matrix<double, 6, 1> r;
  r << R(0, 0), R(1, 0), R(2, 0), R(0, 1), R(1, 1), R(2, 1);
  return r;
}

Mat3 rot6_to_matrix(const Eigen::Matrix<double, 6, 1>& r6) {
  Vec3 a = r6.head<3>();
  Vec3 b = r6.tail<3>();
  if (a.norm() < 1e-12) a = Vec3(1, 0, 0);
  a.normalize();
  b -= a.dot(b) * a;
  if (b.norm() < 1e-12) b = a.unitOrthogonal();
  b.normalize();
  Mat3 R;
  R.col(0) = a;
  R.col(1) = b;
  R.col(2) = a.cross(b);
  return R;
}

Mat3 orientation_from_approach(const Vec3& a_in, double roll) {
  Vec3 z = -a_in.normalized();  // gripper z maps to -approach
  Vec3 x = z.unitOrthogonal();
  Vec3 y = z.cross(x);
  Mat3 R;
  R.col(0) = x;
  R.col(1) = y;
  R.col(2) = z;
  return R * Eigen::AngleAxisd(roll, Vec3::UnitZ()).toRotationMatrix();
}

}  // namespace pgr
