#pragma once

#include <cmath>

#include "nets/encoder.hpp"

namespace pgr::nets {

inline constexpr int kEmbedDim = 32;
inline constexpr int kLatentDim = 32;

// Action parameter width: planar displacement for the pre-grasp module,
// 6-value rotation representation for the grasp module.
inline int action_dim(int module) { return module == 1 ? 2 : 6; }

// Keeps the approach ray in the open hemisphere above the tangent plane with
// outward normal n, preserving the roll as closely as possible.
inline Mat3 clamp_to_hemisphere(const Mat3& R, const Vec3& n) {
  const double c_min = 0.05;
  const Vec3 a = approach_dir(R);
  if (a.dot(n) <= -c_min) return R;
  Vec3 a_t = a - a.dot(n) * n;
  if (a_t.norm() < 1e-9) a_t = n.unitOrthogonal();
  a_t.normalize();
  const Vec3 a2 = std::sqrt(1.0 - c_min * c_min) * a_t - c_min * n;
  const Mat3 R0 = orientation_from_approach(a2, 0.0);
  const Vec3 c = closing_dir(R);
  const double roll = std::atan2(c.dot(R0.col(1)), c.dot(R0.col(0)));
  return orientation_from_approach(a2, roll);
}

// One learnable module (pre-grasp i=1 or grasp i=2): shared encoder plus
// affordance, critic, and conditional-VAE proposal heads.
template <class S>
struct ModuleNet {
  int module = 2;
  EncoderConfig enc_cfg;
  Encoder<S> enc;
  Dense<S> pe;            // point embed 3 -> 32, tanh
  Dense<S> ae;            // action embed adim -> 32, tanh
  Dense<S> aff_a, aff_b;  // 192 -> 32 -> 1, sigmoid
  Dense<S> cr_a, cr_b;    // 224 -> 32 -> 1 (sigmoid for the grasp module)
  Dense<S> ve_a, ve_b;    // 224 -> 32 -> 64 (mean, logvar)
  Dense<S> vd_a, vd_b;    // 224 -> 32 -> adim

  void init(int module_index, std::uint64_t seed) {
    module = module_index;
    Rng rng(mix_seed(seed, 0x4e75 + module_index));
    const int adim = action_dim(module);
    enc.init(rng);
    pe.init(rng, kEmbedDim, 3);
    ae.init(rng, kEmbedDim, adim);
    aff_a.init(rng, 32, kFeatureDim + kEmbedDim);
    aff_b.init(rng, 1, 32);
    cr_a.init(rng, 32, kFeatureDim + 2 * kEmbedDim);
    cr_b.init(rng, 1, 32);
    ve_a.init(rng, 32, kFeatureDim + 2 * kEmbedDim);
    ve_b.init(rng, 2 * kLatentDim, 32);
    vd_a.init(rng, 32, kFeatureDim + kEmbedDim + kLatentDim);
    vd_b.init(rng, adim, 32);
  }

  void zero_grad() {
    enc.zero_grad();
    for (Dense<S>* d : {&pe, &ae, &aff_a, &aff_b, &cr_a, &cr_b, &ve_a, &ve_b,
                        &vd_a, &vd_b})
      d->zero_grad();
  }

  // Stable iteration order; used by the optimizer, the weight file, and the
  // gradient checker.
  template <class F>
  void visit(F&& f) {
    f("enc.l0", enc.l0);
    f("enc.lg1", enc.lg1);
    f("enc.lg2", enc.lg2);
    f("enc.lg", enc.lg);
    f("enc.proj", enc.proj);
    f("pe", pe);
    f("ae", ae);
    f("aff_a", aff_a);
    f("aff_b", aff_b);
    f("cr_a", cr_a);
    f("cr_b", cr_b);
    f("ve_a", ve_a);
    f("ve_b", ve_b);
    f("vd_a", vd_a);
    f("vd_b", vd_b);
  }

  std::vector<std::pair<MatX<S>*, MatX<S>*>> params() {
    std::vector<std::pair<MatX<S>*, MatX<S>*>> out;
    visit([&](const char*, Dense<S>& d) {
      out.emplace_back(&d.W, &d.gW);
      out.emplace_back(&d.b, &d.gb);
    });
    return out;
  }

  // ---- inference (const; no caches touch the weights) ----

  MatX<S> encode(const cloudgen::LabeledPointCloud& cloud) const {
    return enc.forward(cloud, enc_cfg);
  }

  MatX<S> point_embed(const Vec3& p) const {
    MatX<S> x(3, 1);
    x << S(p.x()), S(p.y()), S(p.z());
    return tanh_of<S>(pe.forward(x));
  }

  MatX<S> action_embed(const MatX<S>& a) const {
    return tanh_of<S>(ae.forward(a));
  }

  S affordance(const MatX<S>& fs_col, const MatX<S>& fp) const {
    MatX<S> x(kFeatureDim + kEmbedDim, 1);
    x << fs_col, fp;
    return sigmoid(mlp2_forward(aff_a, aff_b, x)(0, 0));
  }

  S critic(const MatX<S>& fs_col, const MatX<S>& fp, const MatX<S>& fm) const {
    MatX<S> x(kFeatureDim + 2 * kEmbedDim, 1);
    x << fs_col, fp, fm;
    const S raw = mlp2_forward(cr_a, cr_b, x)(0, 0);
    return module == 2 ? sigmoid(raw) : raw;
  }

  // Posterior parameters over the latent given (scene, point, action).
  void encode_action(const MatX<S>& fs_col, const MatX<S>& fp,
                     const MatX<S>& fm, MatX<S>& mean, MatX<S>& logvar) const {
    MatX<S> x(kFeatureDim + 2 * kEmbedDim, 1);
    x << fs_col, fp, fm;
    const MatX<S> out = mlp2_forward(ve_a, ve_b, x);
    mean = out.topRows(kLatentDim);
    logvar = out.bottomRows(kLatentDim);
  }

  // Raw decoder output (displacement or 6-value rotation).
  MatX<S> decode(const MatX<S>& fs_col, const MatX<S>& fp,
                 const MatX<S>& z) const {
    MatX<S> x(kFeatureDim + kEmbedDim + kLatentDim, 1);
    x << fs_col, fp, z;
    return mlp2_forward(vd_a, vd_b, x);
  }

  // Pre-grasp proposal: horizontal displacement with norm capped.
  Vec2 propose_push(const MatX<S>& fs_col, const MatX<S>& fp, const MatX<S>& z,
                    double push_max) const {
    const MatX<S> out = decode(fs_col, fp, z);
    Vec2 d(double(out(0, 0)), double(out(1, 0)));
    const double norm = d.norm();
    if (norm > push_max) d *= push_max / norm;
    return d;
  }

  // Grasp proposal: Euler orientation with the approach ray clamped to the
  // hemisphere above the tangent plane (normal n).
  Vec3 propose_orientation(const MatX<S>& fs_col, const MatX<S>& fp,
                           const MatX<S>& z, const Vec3& n) const {
    const MatX<S> out = decode(fs_col, fp, z);
    Eigen::Matrix<double, 6, 1> r6;
    for (int r = 0; r < 6; ++r) r6(r) = double(out(r, 0));
    const Mat3 R = clamp_to_hemisphere(rot6_to_matrix(r6), n);
    return matrix_to_euler(R);
  }

  static MatX<S> displacement_input(const Vec2& d) {
    MatX<S> a(2, 1);
    a << S(d.x()), S(d.y());
    return a;
  }

  static MatX<S> orientation_input(const Vec3& euler) {
    const auto r6 = matrix_to_rot6(euler_to_matrix(euler));
    MatX<S> a(6, 1);
    for (int r = 0; r < 6; ++r) a(r, 0) = S(r6(r));
    return a;
  }
};

}  // namespace pgr::nets
