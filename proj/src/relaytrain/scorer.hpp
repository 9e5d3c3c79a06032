#pragma once

#include <algorithm>
#include <memory>
#include <numeric>
#include <vector>

#include "cloudgen/cloudgen.hpp"
#include "nets/module_net.hpp"
#include "nets/weights.hpp"

namespace pgr::relaytrain {

// What Eq. 3 / Eq. 9 style estimators need from a grasp module; tests
// substitute stubs with known analytic behavior.
class GraspScorer {
 public:
  virtual ~GraspScorer() = default;
  // Encode a (canonicalized) cloud; must be called before the queries below.
  virtual void prepare(const cloudgen::LabeledPointCloud& cloud) = 0;
  // World position of the canonical frame's origin (the object centroid).
  // Net-backed scorers ignore it; simulator-backed test oracles need it to
  // map canonical points back to world coordinates.
  virtual void set_frame_origin(const Vec3&) {}
  virtual double affordance(int point_index) = 0;
  // Draw one latent from rng, propose at the point, return the critic score.
  virtual double sample_and_score(int point_index, Rng& rng) = 0;
};

// Grasp-module-backed scorer.
class NetGraspScorer : public GraspScorer {
 public:
  explicit NetGraspScorer(const nets::ModuleNet<float>& net) : net_(net) {}

  void prepare(const cloudgen::LabeledPointCloud& cloud) override {
    cloud_ = &cloud;
    fs_ = net_.encode(cloud);
  }
  double affordance(int p) override {
    const nets::MatX<float> fp = net_.point_embed(cloud_->points[p]);
    return double(net_.affordance(fs_.col(p), fp));
  }
  double sample_and_score(int p, Rng& rng) override {
    const nets::MatX<float> fp = net_.point_embed(cloud_->points[p]);
    nets::MatX<float> z(nets::kLatentDim, 1);
    for (int r = 0; r < nets::kLatentDim; ++r) z(r, 0) = float(rng.normal());
    const Vec3 euler =
        net_.propose_orientation(fs_.col(p), fp, z, Vec3(0, 0, 1));
    const nets::MatX<float> fm =
        net_.action_embed(nets::ModuleNet<float>::orientation_input(euler));
    return double(net_.critic(fs_.col(p), fp, fm));
  }
  const nets::MatX<float>& features() const { return fs_; }

 private:
  const nets::ModuleNet<float>& net_;
  const cloudgen::LabeledPointCloud* cloud_ = nullptr;
  nets::MatX<float> fs_;
};

// Object-point indices ranked by affordance, descending, index tiebreak.
inline std::vector<int> ranked_object_points(
    const cloudgen::LabeledPointCloud& cloud, GraspScorer& scorer) {
  std::vector<std::pair<double, int>> scored;
  for (int i = 0; i < int(cloud.points.size()); ++i)
    if (cloud.labels[i] == cloudgen::kLabelObject)
      scored.emplace_back(-scorer.affordance(i), i);
  std::sort(scored.begin(), scored.end());
  std::vector<int> out;
  out.reserve(scored.size());
  for (const auto& [neg, i] : scored) out.push_back(i);
  return out;
}

// Eq. 3: mean critic score over the top-n2 affordance points with m2
// proposals each. Deterministic in seed.
inline double estimate_c2(const cloudgen::LabeledPointCloud& cloud,
                          GraspScorer& scorer, int n2, int m2,
                          std::uint64_t seed) {
  scorer.prepare(cloud);
  const std::vector<int> ranked = ranked_object_points(cloud, scorer);
  const int take = std::min<int>(n2, int(ranked.size()));
  if (take == 0) return 0.0;
  Rng rng(mix_seed(seed, 0xc2e5));
  double sum = 0;
  int count = 0;
  for (int u = 0; u < take; ++u) {
    for (int j = 0; j < m2; ++j) {
      sum += scorer.sample_and_score(ranked[u], rng);
      ++count;
    }
  }
  return sum / count;
}

// Eq. 9: mean critic score over n proposals at one point. The scorer must
// already be prepared with the cloud.
inline double affordance_label(GraspScorer& scorer, int point_index, int n,
                               std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0xaff0 + std::uint64_t(point_index)));
  double sum = 0;
  for (int j = 0; j < n; ++j) sum += scorer.sample_and_score(point_index, rng);
  return sum / n;
}

}  // namespace pgr::relaytrain
