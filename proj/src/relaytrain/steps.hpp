#pragma once

#include "nets/module_net.hpp"
#include "relaytrain/losses.hpp"

namespace pgr::relaytrain {

using nets::MatX;

// Per-sample training steps. Each computes the loss, accumulates parameter
// grads inside the net's layers, and adds the feature grad into dfs so the
// caller can run one encoder backward pass per cloud.

namespace detail {

template <class S>
MatX<S> point_input(const Vec3& p) {
  MatX<S> x(3, 1);
  x << S(p.x()), S(p.y()), S(p.z());
  return x;
}

template <class S>
S sign_of(S x) {
  return x > S(0) ? S(1) : (x < S(0) ? S(-1) : S(0));
}

}  // namespace detail

// Critic step. bce: cross-entropy on a sigmoid output (grasp critic) with
// target r in {0,1}; otherwise L1 on the raw output (pre-grasp critic).
template <class S>
double critic_step(nets::ModuleNet<S>& net, const MatX<S>& fs, MatX<S>& dfs,
                   int p_idx, const Vec3& point, const MatX<S>& act_in,
                   double target, bool bce) {
  const MatX<S> fp_in = detail::point_input<S>(point);
  const MatX<S> fp = nets::tanh_of<S>(net.pe.forward(fp_in));
  const MatX<S> fm = nets::tanh_of<S>(net.ae.forward(act_in));
  MatX<S> x(nets::kFeatureDim + 2 * nets::kEmbedDim, 1);
  x << fs.col(p_idx), fp, fm;
  nets::Mlp2Cache<S> cc;
  const S raw = nets::mlp2_forward(net.cr_a, net.cr_b, x, &cc)(0, 0);

  double loss;
  S draw;
  if (bce) {
    const S pred = nets::sigmoid(raw);
    loss = critic2_loss(double(pred), int(target));
    draw = pred - S(target);  // d(BCE o sigmoid)/draw
  } else {
    loss = std::abs(double(raw) - target);
    draw = detail::sign_of(raw - S(target));
  }

  MatX<S> dy(1, 1);
  dy(0, 0) = draw;
  const MatX<S> dx = nets::mlp2_backward(net.cr_a, net.cr_b, cc, dy);
  dfs.col(p_idx) += dx.topRows(nets::kFeatureDim);
  net.pe.backward(fp_in,
                  nets::tanh_backward<S>(
                      fp, dx.middleRows(nets::kFeatureDim, nets::kEmbedDim)));
  net.ae.backward(act_in,
                  nets::tanh_backward<S>(fm, dx.bottomRows(nets::kEmbedDim)));
  return loss;
}

// Affordance step: L1 between the sigmoid output and the Eq. 9 label.
template <class S>
double affordance_step(nets::ModuleNet<S>& net, const MatX<S>& fs,
                       MatX<S>& dfs, int p_idx, const Vec3& point,
                       double label) {
  const MatX<S> fp_in = detail::point_input<S>(point);
  const MatX<S> fp = nets::tanh_of<S>(net.pe.forward(fp_in));
  MatX<S> x(nets::kFeatureDim + nets::kEmbedDim, 1);
  x << fs.col(p_idx), fp;
  nets::Mlp2Cache<S> cc;
  const S raw = nets::mlp2_forward(net.aff_a, net.aff_b, x, &cc)(0, 0);
  const S pred = nets::sigmoid(raw);
  const double loss = affordance_loss(double(pred), label);

  MatX<S> dy(1, 1);
  dy(0, 0) = detail::sign_of(pred - S(label)) * pred * (S(1) - pred);
  const MatX<S> dx = nets::mlp2_backward(net.aff_a, net.aff_b, cc, dy);
  dfs.col(p_idx) += dx.topRows(nets::kFeatureDim);
  net.pe.backward(fp_in,
                  nets::tanh_backward<S>(fp, dx.bottomRows(nets::kEmbedDim)));
  return loss;
}

// Conditional-VAE proposal step on one successful sample: reconstruction
// loss (Euclidean for displacements, squared Frobenius between rotation
// matrices for orientations) plus KL to the unit Gaussian. eps is the
// reparameterization draw, supplied by the caller for determinism.
template <class S>
double proposal_step(nets::ModuleNet<S>& net, const MatX<S>& fs, MatX<S>& dfs,
                     int p_idx, const Vec3& point, const MatX<S>& act_in,
                     const MatX<S>& eps) {
  const int adim = nets::action_dim(net.module);
  const MatX<S> fp_in = detail::point_input<S>(point);
  const MatX<S> fp = nets::tanh_of<S>(net.pe.forward(fp_in));
  const MatX<S> fm = nets::tanh_of<S>(net.ae.forward(act_in));

  MatX<S> xv(nets::kFeatureDim + 2 * nets::kEmbedDim, 1);
  xv << fs.col(p_idx), fp, fm;
  nets::Mlp2Cache<S> cv;
  const MatX<S> moments = nets::mlp2_forward(net.ve_a, net.ve_b, xv, &cv);
  const MatX<S> mean = moments.topRows(nets::kLatentDim);
  const MatX<S> logvar = moments.bottomRows(nets::kLatentDim);
  const MatX<S> sd = (logvar.array() * S(0.5)).exp().matrix();
  const MatX<S> z = mean + sd.cwiseProduct(eps);

  MatX<S> xd(nets::kFeatureDim + nets::kEmbedDim + nets::kLatentDim, 1);
  xd << fs.col(p_idx), fp, z;
  nets::Mlp2Cache<S> cd;
  const MatX<S> out = nets::mlp2_forward(net.vd_a, net.vd_b, xd, &cd);

  double recon;
  MatX<S> dout(adim, 1);
  if (net.module == 1) {
    const MatX<S> diff = out - act_in;
    const double norm = std::sqrt(double(diff.squaredNorm()));
    recon = norm;
    dout = norm > 1e-12 ? MatX<S>(diff / S(norm)) : MatX<S>::Zero(adim, 1);
  } else {
    Eigen::Matrix<double, 6, 1> r6p, r6t;
    for (int r = 0; r < 6; ++r) {
      r6p(r) = double(out(r, 0));
      r6t(r) = double(act_in(r, 0));
    }
    const Mat3 Rp = rot6_to_matrix(r6p);
    const Mat3 Rt = rot6_to_matrix(r6t);
    recon = rotation_recon_loss(Rp, Rt);
    const Mat3 dR = 2.0 * (Rp - Rt);
    const auto d6 = rot6_backward(r6p, dR);
    for (int r = 0; r < 6; ++r) dout(r, 0) = S(d6(r));
  }
  const double kl = kl_to_unit(mean, logvar);

  const MatX<S> dxd = nets::mlp2_backward(net.vd_a, net.vd_b, cd, dout);
  dfs.col(p_idx) += dxd.topRows(nets::kFeatureDim);
  MatX<S> dfp = dxd.middleRows(nets::kFeatureDim, nets::kEmbedDim);
  const MatX<S> dz = dxd.bottomRows(nets::kLatentDim);

  MatX<S> dmoments(2 * nets::kLatentDim, 1);
  dmoments.topRows(nets::kLatentDim) = dz + mean;  // + KL term
  dmoments.bottomRows(nets::kLatentDim) =
      dz.cwiseProduct(eps).cwiseProduct(sd) * S(0.5) +
      ((logvar.array().exp() - S(1)) * S(0.5)).matrix();
  const MatX<S> dxv = nets::mlp2_backward(net.ve_a, net.ve_b, cv, dmoments);
  dfs.col(p_idx) += dxv.topRows(nets::kFeatureDim);
  dfp += dxv.middleRows(nets::kFeatureDim, nets::kEmbedDim);
  const MatX<S> dfm = dxv.bottomRows(nets::kEmbedDim);

  net.pe.backward(fp_in, nets::tanh_backward<S>(fp, dfp));
  net.ae.backward(act_in, nets::tanh_backward<S>(fm, dfm));
  return recon + kl;
}

}  // namespace pgr::relaytrain
