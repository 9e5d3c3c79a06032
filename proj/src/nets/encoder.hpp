#pragma once

#include <algorithm>
#include <vector>

#include "cloudgen/cloudgen.hpp"
#include "nets/linalg.hpp"

namespace pgr::nets {

// Hierarchical per-point encoder: label-aware point MLP, two ball-grouping
// levels (radii r1 < r2, up to k neighbors), a global max-pool branch, and a
// linear projection to the 160-d per-point feature.
struct EncoderConfig {
  double r1 = 0.1;
  double r2 = 0.4;
  int k = 8;
};

inline constexpr int kFeatureDim = 160;

// Neighbor lists per point: the k nearest within the radius, self included,
// ties broken by index so grouping is deterministic.
inline std::vector<std::vector<int>> build_groups(
    const std::vector<Vec3>& pts, double radius, int k) {
  const int n = int(pts.size());
  std::vector<std::vector<int>> groups(n);
  const double r2 = radius * radius;
  std::vector<std::pair<double, int>> cand;
  for (int i = 0; i < n; ++i) {
    cand.clear();
    for (int j = 0; j < n; ++j) {
      const double d2 = (pts[j] - pts[i]).squaredNorm();
      if (d2 <= r2) cand.emplace_back(d2, j);
    }
    std::sort(cand.begin(), cand.end());
    const int take = std::min<int>(k, int(cand.size()));
    groups[i].reserve(take);
    for (int m = 0; m < take; ++m) groups[i].push_back(cand[m].second);
  }
  return groups;
}

template <class S>
struct Encoder {
  Dense<S> l0;    // 5 -> 32 (xyz + one-hot label)
  Dense<S> lg1;   // 35 -> 48
  Dense<S> lg2;   // 51 -> 48
  Dense<S> lg;    // 48 -> 64 (global branch)
  Dense<S> proj;  // 192 -> 160, linear

  void init(Rng& rng) {
    l0.init(rng, 32, 5);
    lg1.init(rng, 48, 35);
    lg2.init(rng, 48, 51);
    lg.init(rng, 64, 48);
    proj.init(rng, kFeatureDim, 192);
  }

  void zero_grad() {
    l0.zero_grad();
    lg1.zero_grad();
    lg2.zero_grad();
    lg.zero_grad();
    proj.zero_grad();
  }

  struct Cache {
    std::vector<Vec3> pts;
    MatX<S> in0, t0;                    // 5 x N, 32 x N
    std::vector<std::vector<int>> g1, g2;
    std::vector<int> col1, col2;        // first column of each group
    MatX<S> G1, t1, h1;                 // 35 x M1, 48 x M1, 48 x N
    MatX<S> G2, t2, h2;                 // 51 x M2, 48 x M2, 48 x N
    Eigen::MatrixXi arg1, arg2;         // 48 x N: winning column per row
    MatX<S> t3;                         // 64 x N
    Eigen::VectorXi arg3;               // 64: winning column per row
    MatX<S> F;                          // 192 x N
  };

  // Expects a canonicalized cloud (object centroid at the origin).
  MatX<S> forward(const cloudgen::LabeledPointCloud& cloud,
                  const EncoderConfig& cfg, Cache* cache = nullptr) const {
    const int n = int(cloud.points.size());
    MatX<S> in0(5, n);
    for (int i = 0; i < n; ++i) {
      in0(0, i) = S(cloud.points[i].x());
      in0(1, i) = S(cloud.points[i].y());
      in0(2, i) = S(cloud.points[i].z());
      in0(3, i) = cloud.labels[i] == cloudgen::kLabelObject ? S(1) : S(0);
      in0(4, i) = cloud.labels[i] == cloudgen::kLabelObject ? S(0) : S(1);
    }
    MatX<S> t0 = tanh_of<S>(l0.forward(in0));

    const auto g1 = build_groups(cloud.points, cfg.r1, cfg.k);
    std::vector<int> col1;
    Eigen::MatrixXi arg1;
    MatX<S> G1 = gather(cloud.points, t0, g1, col1);
    MatX<S> t1 = tanh_of<S>(lg1.forward(G1));
    MatX<S> h1 = pool(t1, g1, col1, arg1);

    const auto g2 = build_groups(cloud.points, cfg.r2, cfg.k);
    std::vector<int> col2;
    Eigen::MatrixXi arg2;
    MatX<S> G2 = gather(cloud.points, h1, g2, col2);
    MatX<S> t2 = tanh_of<S>(lg2.forward(G2));
    MatX<S> h2 = pool(t2, g2, col2, arg2);

    MatX<S> t3 = tanh_of<S>(lg.forward(h2));
    Eigen::VectorXi arg3(t3.rows());
    MatX<S> F(192, n);
    F.topRows(32) = t0;
    F.middleRows(32, 48) = h1;
    F.middleRows(80, 48) = h2;
    for (int r = 0; r < t3.rows(); ++r) {
      int best = 0;
      for (int c = 1; c < n; ++c)
        if (t3(r, c) > t3(r, best)) best = c;
      arg3(r) = best;
      F.row(128 + r).setConstant(t3(r, best));
    }
    MatX<S> fs = proj.forward(F);
    if (cache) {
      cache->pts = cloud.points;
      cache->in0 = std::move(in0);
      cache->t0 = std::move(t0);
      cache->g1 = g1;
      cache->g2 = g2;
      cache->col1 = std::move(col1);
      cache->col2 = std::move(col2);
      cache->G1 = std::move(G1);
      cache->t1 = std::move(t1);
      cache->h1 = std::move(h1);
      cache->G2 = std::move(G2);
      cache->t2 = std::move(t2);
      cache->h2 = std::move(h2);
      cache->arg1 = std::move(arg1);
      cache->arg2 = std::move(arg2);
      cache->t3 = std::move(t3);
      cache->arg3 = std::move(arg3);
      cache->F = std::move(F);
    }
    return fs;
  }

  // Accumulates parameter grads for dL/d(per-point features).
  void backward(const Cache& c, const MatX<S>& dfs) {
    const int n = int(c.pts.size());
    const MatX<S> dF = proj.backward(c.F, dfs);
    MatX<S> dt0 = dF.topRows(32);
    MatX<S> dh1 = dF.middleRows(32, 48);
    MatX<S> dh2 = dF.middleRows(80, 48);
    // Global branch: the replicated row sums into the winning column.
    MatX<S> dt3 = MatX<S>::Zero(64, n);
    for (int r = 0; r < 64; ++r)
      dt3(r, c.arg3(r)) = dF.row(128 + r).sum();
    dh2 += lg.backward(c.h2, tanh_backward<S>(c.t3, dt3));

    MatX<S> dG2 = unpool(lg2, c.G2, c.t2, c.g2, c.col2, c.arg2, dh2);
    scatter(dG2, c.g2, c.col2, 48, dh1);
    MatX<S> dG1 = unpool(lg1, c.G1, c.t1, c.g1, c.col1, c.arg1, dh1);
    scatter(dG1, c.g1, c.col1, 32, dt0);
    l0.backward(c.in0, tanh_backward<S>(c.t0, dt0));
  }

 private:
  // Group feature matrix: column per (center i, neighbor j) pair holding
  // [h_j; x_j - x_i]. col[i] is the first column of group i.
  static MatX<S> gather(const std::vector<Vec3>& pts, const MatX<S>& h,
                        const std::vector<std::vector<int>>& groups,
                        std::vector<int>& col) {
    int m = 0;
    col.resize(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
      col[i] = m;
      m += int(groups[i].size());
    }
    MatX<S> G(h.rows() + 3, m);
    for (std::size_t i = 0; i < groups.size(); ++i) {
      for (std::size_t u = 0; u < groups[i].size(); ++u) {
        const int j = groups[i][u];
        const int c = col[i] + int(u);
        G.col(c).head(h.rows()) = h.col(j);
        const Vec3 d = pts[j] - pts[i];
        G(h.rows() + 0, c) = S(d.x());
        G(h.rows() + 1, c) = S(d.y());
        G(h.rows() + 2, c) = S(d.z());
      }
    }
    return G;
  }

  static MatX<S> pool(const MatX<S>& t, const std::vector<std::vector<int>>& g,
                      const std::vector<int>& col, Eigen::MatrixXi& arg) {
    const int n = int(g.size());
    MatX<S> h(t.rows(), n);
    arg.resize(t.rows(), n);
    for (int i = 0; i < n; ++i) {
      const int sz = int(g[i].size());
      for (int r = 0; r < t.rows(); ++r) {
        int best = col[i];
        for (int u = 1; u < sz; ++u)
          if (t(r, col[i] + u) > t(r, best)) best = col[i] + u;
        arg(r, i) = best;
        h(r, i) = t(r, best);
      }
    }
    return h;
  }

  // Reverse of pool + tanh + dense for one grouping level.
  static MatX<S> unpool(Dense<S>& layer, const MatX<S>& G, const MatX<S>& t,
                        const std::vector<std::vector<int>>& g,
                        const std::vector<int>& /*col*/,
                        const Eigen::MatrixXi& arg, const MatX<S>& dh) {
    MatX<S> dt = MatX<S>::Zero(t.rows(), t.cols());
    for (int i = 0; i < int(g.size()); ++i)
      for (int r = 0; r < t.rows(); ++r)
        dt(r, arg(r, i)) += dh(r, i);
    return layer.backward(G, tanh_backward<S>(t, dt));
  }

  // Routes group-column grads back to the per-point features they came from.
  static void scatter(const MatX<S>& dG, const std::vector<std::vector<int>>& g,
                      const std::vector<int>& col, int rows, MatX<S>& dh_prev) {
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t u = 0; u < g[i].size(); ++u)
        dh_prev.col(g[i][u]) += dG.col(col[i] + int(u)).head(rows);
  }
};

}  // namespace pgr::nets
