#pragma once

#include <algorithm>
#include <cmath>

#include "core/geom.hpp"
#include "scenesim/types.hpp"

namespace pgr::relaytrain {

struct PenaltyCoeffs {
  double a = 0.1;  // meters, displacement scale
  double b = 0.5;  // radians, rotation scale
};

// p = p_d * p_r * p_s: exponential falloff in slip and rotation magnitude,
// zero on any safety violation.
inline double penalty(double slip, const Vec3& rotation,
                      scenesim::SafetyEvent safety,
                      const PenaltyCoeffs& c = {}) {
  if (safety != scenesim::SafetyEvent::None) return 0.0;
  return std::exp(-slip / c.a) * std::exp(-rotation.norm() / c.b);
}

// L1 against the penalized critic gain.
inline double critic1_target(double c2_before, double c2_after, double p) {
  return p * (c2_after - c2_before);
}

inline double critic1_loss(double pred, double c2_before, double c2_after,
                           double p) {
  return std::abs(pred - critic1_target(c2_before, c2_after, p));
}

inline constexpr double kProbEps = 1e-7;

// Binary cross-entropy with clamped prediction.
inline double critic2_loss(double pred, int r) {
  const double q = std::clamp(pred, kProbEps, 1.0 - kProbEps);
  return -(r * std::log(q) + (1 - r) * std::log(1.0 - q));
}

inline double affordance_loss(double pred, double label) {
  return std::abs(pred - label);
}

// KL(N(mean, exp(logvar)) || N(0, 1)), summed over dimensions.
template <class Derived>
double kl_to_unit(const Eigen::MatrixBase<Derived>& mean,
                  const Eigen::MatrixBase<Derived>& logvar) {
  double kl = 0;
  for (int i = 0; i < mean.size(); ++i) {
    const double m = double(mean(i)), lv = double(logvar(i));
    kl += 0.5 * (std::exp(lv) + m * m - 1.0 - lv);
  }
  return kl;
}

// Rotation reconstruction distance: squared Frobenius norm between the
// matrices, 8 sin^2(theta/2) in terms of the geodesic angle, so it is
// monotone in the angle and smooth at zero.
inline double rotation_recon_loss(const Mat3& pred, const Mat3& truth) {
  return (pred - truth).squaredNorm();
}

// Gradient of rot6_to_matrix (Gram-Schmidt): maps dL/dR to dL/d(6 raw values).
inline Eigen::Matrix<double, 6, 1> rot6_backward(
    const Eigen::Matrix<double, 6, 1>& r6, const Mat3& dR) {
  Vec3 u = r6.head<3>();
  Vec3 v = r6.tail<3>();
  if (u.norm() < 1e-12) u = Vec3(1, 0, 0);
  const double un = u.norm();
  const Vec3 a = u / un;
  Vec3 w = v - a.dot(v) * a;
  const bool w_degenerate = w.norm() < 1e-12;
  if (w_degenerate) w = a.unitOrthogonal();
  const double wn = w.norm();
  const Vec3 b = w / wn;

  Vec3 da = dR.col(0);
  Vec3 db = dR.col(1);
  const Vec3 dc = dR.col(2);
  // c = a x b
  da += b.cross(dc);
  db += dc.cross(a);
  // b = w / |w|
  const Vec3 dw = (db - b * b.dot(db)) / wn;
  Vec3 dv = Vec3::Zero();
  if (!w_degenerate) {
    // w = v - (a.v) a
    dv = dw - a * a.dot(dw);
    da += -(a.dot(v)) * dw - v * a.dot(dw);
  }
  // a = u / |u|
  const Vec3 du = (da - a * a.dot(da)) / un;
  Eigen::Matrix<double, 6, 1> out;
  out.head<3>() = du;
  out.tail<3>() = dv;
  return out;
}

}  // namespace pgr::relaytrain
