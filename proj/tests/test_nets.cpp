#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "core/binio.hpp"
#include "core/error.hpp"
#include "nets/module_net.hpp"
#include "nets/weights.hpp"
#include "relaytrain/steps.hpp"

using namespace pgr;

namespace {

// Small scattered cloud with both labels; scale matches the grouping radii.
cloudgen::LabeledPointCloud toy_cloud(int n, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x70c1));
  cloudgen::LabeledPointCloud c;
  for (int i = 0; i < n; ++i) {
    c.points.emplace_back(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                          rng.uniform(0.0, 0.2));
    c.labels.push_back(i % 2 == 0 ? cloudgen::kLabelObject
                                  : cloudgen::kLabelEnvironment);
  }
  return c;
}

// Composite loss over one critic, affordance, and proposal sample; exercises
// every head and the encoder backward path at once.
template <class S>
double sample_losses(nets::ModuleNet<S>& net,
                     const cloudgen::LabeledPointCloud& cloud,
                     bool backprop) {
  typename nets::Encoder<S>::Cache cache;
  const nets::MatX<S> fs = net.enc.forward(cloud, net.enc_cfg, &cache);
  nets::MatX<S> dfs = nets::MatX<S>::Zero(nets::kFeatureDim, fs.cols());

  const int adim = nets::action_dim(net.module);
  nets::MatX<S> act(adim, 1);
  if (net.module == 1) {
    act << S(0.12), S(-0.07);
  } else {
    const auto r6 = matrix_to_rot6(euler_to_matrix(Vec3(0.3, -0.4, 1.1)));
    for (int r = 0; r < 6; ++r) act(r, 0) = S(r6(r));
  }
  nets::MatX<S> eps(nets::kLatentDim, 1);
  Rng erng(77);
  for (int r = 0; r < nets::kLatentDim; ++r) eps(r, 0) = S(erng.normal());

  double loss = 0;
  loss += relaytrain::critic_step(net, fs, dfs, 2, cloud.points[2], act,
                                  net.module == 2 ? 1.0 : 0.37,
                                  net.module == 2);
  loss += relaytrain::affordance_step(net, fs, dfs, 5, cloud.points[5], 0.8);
  loss += relaytrain::proposal_step(net, fs, dfs, 9, cloud.points[9], act, eps);
  if (backprop) net.enc.backward(cache, dfs);
  return loss;
}

struct GradStats {
  double worst_rel = 0;
  std::string worst_name;
  int checked = 0;
};

// Central finite differences on a strided subset of each tensor, plus a
// full directional-derivative check covering every parameter.
GradStats gradient_check(int module) {
  const auto cloud = toy_cloud(16, 11 + module);
  nets::ModuleNet<double> net;
  net.init(module, 99);

  net.zero_grad();
  sample_losses(net, cloud, true);

  // Snapshot analytic grads: visit order is stable.
  std::vector<nets::MatX<double>> gW, gb;
  net.visit([&](const char*, nets::Dense<double>& d) {
    gW.push_back(d.gW);
    gb.push_back(d.gb);
  });

  GradStats st;
  const double h = 1e-5;
  Rng dir_rng(5);
  double dir_dot = 0, dir_fd_plus = 0, dir_fd_minus = 0;
  std::vector<nets::MatX<double>> dirs;

  int li = 0;
  net.visit([&](const char* name, nets::Dense<double>& d) {
    for (const auto& [m, g] : {std::pair<nets::MatX<double>*,
                                         const nets::MatX<double>*>{&d.W,
                                                                    &gW[li]},
                               {&d.b, &gb[li]}}) {
      const int total = int(m->size());
      const int samples = std::min(total, 24);
      const int stride = std::max(1, total / samples);
      for (int idx = 0; idx < total; idx += stride) {
        double* p = m->data() + idx;
        const double orig = *p;
        *p = orig + h;
        const double lp = sample_losses(net, cloud, false);
        *p = orig - h;
        const double lm = sample_losses(net, cloud, false);
        *p = orig;
        const double fd = (lp - lm) / (2 * h);
        const double an = g->data()[idx];
        const double denom = std::max(std::abs(fd) + std::abs(an), 1e-6);
        const double rel = std::abs(fd - an) / denom;
        ++st.checked;
        if (rel > st.worst_rel) {
          st.worst_rel = rel;
          st.worst_name = name;
        }
      }
    }
    ++li;
  });

  // One random direction over the whole parameter vector.
  li = 0;
  net.visit([&](const char*, nets::Dense<double>& d) {
    nets::MatX<double> dW(d.W.rows(), d.W.cols()), db(d.b.rows(), 1);
    for (int i = 0; i < dW.size(); ++i) dW.data()[i] = dir_rng.normal();
    for (int i = 0; i < db.size(); ++i) db.data()[i] = dir_rng.normal();
    dir_dot += (gW[li].array() * dW.array()).sum() +
               (gb[li].array() * db.array()).sum();
    dirs.push_back(dW);
    dirs.push_back(db);
    ++li;
  });
  const double hd = 1e-6;
  for (int sgn : {+1, -1}) {
    int k = 0;
    net.visit([&](const char*, nets::Dense<double>& d) {
      d.W += sgn * hd * dirs[k];
      d.b += sgn * hd * dirs[k + 1];
      k += 2;
    });
    (sgn > 0 ? dir_fd_plus : dir_fd_minus) = sample_losses(net, cloud, false);
    k = 0;
    net.visit([&](const char*, nets::Dense<double>& d) {
      d.W -= sgn * hd * dirs[k];
      d.b -= sgn * hd * dirs[k + 1];
      k += 2;
    });
  }
  const double dir_fd = (dir_fd_plus - dir_fd_minus) / (2 * hd);
  const double rel = std::abs(dir_fd - dir_dot) /
                     std::max(std::abs(dir_fd) + std::abs(dir_dot), 1e-6);
  CHECK(rel < 1e-4);
  return st;
}

}  // namespace

TEST_CASE("encoder output shape and determinism") {
  const auto cloud = toy_cloud(24, 3);
  nets::ModuleNet<float> net;
  net.init(2, 42);
  const auto fs = net.encode(cloud);
  CHECK(fs.rows() == nets::kFeatureDim);
  CHECK(fs.cols() == 24);
  CHECK(fs.allFinite());
  const auto fs2 = net.encode(cloud);
  CHECK(fs == fs2);
  // Not a constant map: per-point features vary across points.
  double var = 0;
  const auto mean = fs.rowwise().mean().eval();
  for (int c = 0; c < fs.cols(); ++c)
    var += (fs.col(c) - mean).squaredNorm();
  CHECK(var > 1e-6);
}

TEST_CASE("encoder permutation equivariance") {
  const auto cloud = toy_cloud(20, 4);
  nets::ModuleNet<float> net;
  net.init(2, 42);
  const auto fs = net.encode(cloud);

  std::vector<int> perm(cloud.points.size());
  Rng rng(8);
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = int(i);
  for (std::size_t i = perm.size(); i > 1; --i)
    std::swap(perm[i - 1], perm[rng.uniform_int(i)]);

  cloudgen::LabeledPointCloud shuffled;
  shuffled.camera = cloud.camera;
  for (int src : perm) {
    shuffled.points.push_back(cloud.points[src]);
    shuffled.labels.push_back(cloud.labels[src]);
  }
  const auto fs_p = net.encode(shuffled);
  for (std::size_t i = 0; i < perm.size(); ++i)
    CHECK(fs_p.col(int(i)) == fs.col(perm[i]));
}

TEST_CASE("distant point change perturbs features") {
  const auto cloud = toy_cloud(20, 5);
  auto moved = cloud;
  moved.points[19] += Vec3(0.2, -0.1, 0.05);
  nets::ModuleNet<float> net;
  net.init(2, 42);
  CHECK(net.encode(cloud) != net.encode(moved));
}

TEST_CASE("head output ranges and determinism") {
  const auto cloud = toy_cloud(16, 6);
  for (int module : {1, 2}) {
    nets::ModuleNet<float> net;
    net.init(module, 7);
    const auto fs = net.encode(cloud);
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
      const int p = int(rng.uniform_int(cloud.points.size()));
      const auto fp = net.point_embed(cloud.points[p]);
      const float a = net.affordance(fs.col(p), fp);
      CHECK(a >= 0.0f);
      CHECK(a <= 1.0f);

      nets::MatX<float> z(nets::kLatentDim, 1);
      for (int r = 0; r < nets::kLatentDim; ++r) z(r, 0) = float(rng.normal());
      if (module == 1) {
        const Vec2 d = net.propose_push(fs.col(p), fp, z, 0.4);
        CHECK(d.norm() <= 0.4 + 1e-12);
        const auto fm = net.action_embed(
            nets::ModuleNet<float>::displacement_input(d));
        CHECK(std::isfinite(net.critic(fs.col(p), fp, fm)));
      } else {
        const Vec3 n(0, 0, 1);
        const Vec3 euler = net.propose_orientation(fs.col(p), fp, z, n);
        const Vec3 approach = approach_dir(euler_to_matrix(euler));
        CHECK(approach.dot(n) <= -0.05 + 1e-9);
        const auto fm = net.action_embed(
            nets::ModuleNet<float>::orientation_input(euler));
        const float c = net.critic(fs.col(p), fp, fm);
        CHECK(c >= 0.0f);
        CHECK(c <= 1.0f);
        // Same (p, z) twice: identical proposal.
        CHECK(net.propose_orientation(fs.col(p), fp, z, n) == euler);
      }

      nets::MatX<float> mean, logvar;
      const auto act = module == 1
                           ? nets::ModuleNet<float>::displacement_input(
                                 Vec2(0.1, 0.0))
                           : nets::ModuleNet<float>::orientation_input(
                                 Vec3(0.1, 0.2, 0.3));
      net.encode_action(fs.col(p), net.point_embed(cloud.points[p]),
                        net.action_embed(act), mean, logvar);
      CHECK(mean.rows() == nets::kLatentDim);
      CHECK(logvar.rows() == nets::kLatentDim);
      CHECK(mean.allFinite());
      CHECK(logvar.allFinite());
    }
  }
}

TEST_CASE("gradients match finite differences (pre-grasp module)") {
  const GradStats st = gradient_check(1);
  CHECK(st.checked > 500);
  INFO("worst tensor: " << st.worst_name);
  CHECK(st.worst_rel < 1e-4);
}

TEST_CASE("gradients match finite differences (grasp module)") {
  const GradStats st = gradient_check(2);
  CHECK(st.checked > 500);
  INFO("worst tensor: " << st.worst_name);
  CHECK(st.worst_rel < 1e-4);
}

TEST_CASE("weight files round-trip bit-exactly") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = (dir / "pgr_weights_test.pgwt").string();

  nets::ModuleNet<float> net;
  net.init(2, 1234);
  nets::WeightsMeta meta;
  meta.seed = 1234;
  meta.epochs = 17;
  meta.dataset_hash = "abc123";
  nets::save_weights(path, net, meta);

  nets::ModuleNet<float> other;
  other.init(2, 999);
  const auto got = nets::load_weights(path, other);
  CHECK(got.seed == meta.seed);
  CHECK(got.epochs == meta.epochs);
  CHECK(got.dataset_hash == meta.dataset_hash);
  bool equal = true;
  net.visit([&](const char* name, nets::Dense<float>& d) {
    nets::Dense<float>* od = nullptr;
    other.visit([&](const char* oname, nets::Dense<float>& cand) {
      if (std::string(name) == oname) od = &cand;
    });
    REQUIRE(od != nullptr);
    if (d.W != od->W || d.b != od->b) equal = false;
  });
  CHECK(equal);

  SUBCASE("module mismatch rejected") {
    nets::ModuleNet<float> m1;
    m1.init(1, 5);
    try {
      nets::load_weights(path, m1);
    } catch (const Error& e) {
      CHECK(e.code() == Err::SchemaMismatch);
    }
  }
  SUBCASE("truncation detected") {
    auto bytes = read_file(path);
    bytes.resize(bytes.size() / 2);
    write_file(path, bytes);
    nets::ModuleNet<float> m2;
    m2.init(2, 5);
    try {
      nets::load_weights(path, m2);
      FAIL("expected CorruptFile");
    } catch (const Error& e) {
      CHECK(e.code() == Err::CorruptFile);
    }
  }
  SUBCASE("bit flip detected") {
    auto bytes = read_file(path);
    bytes[bytes.size() / 3] ^= 0x40;
    write_file(path, bytes);
    nets::ModuleNet<float> m2;
    m2.init(2, 5);
    try {
      nets::load_weights(path, m2);
      FAIL("expected CorruptFile");
    } catch (const Error& e) {
      CHECK(e.code() == Err::CorruptFile);
    }
  }
  SUBCASE("wrong magic rejected") {
    auto bytes = read_file(path);
    bytes[0] = 'X';
    // Re-stamp the checksum so only the magic is wrong.
    const std::uint32_t crc = crc32_of(bytes.data(), bytes.size() - 4);
    bytes[bytes.size() - 4] = std::uint8_t(crc);
    bytes[bytes.size() - 3] = std::uint8_t(crc >> 8);
    bytes[bytes.size() - 2] = std::uint8_t(crc >> 16);
    bytes[bytes.size() - 1] = std::uint8_t(crc >> 24);
    write_file(path, bytes);
    nets::ModuleNet<float> m2;
    m2.init(2, 5);
    try {
      nets::load_weights(path, m2);
      FAIL("expected SchemaMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == Err::SchemaMismatch);
    }
  }
  std::remove(path.c_str());
}

TEST_CASE("adam drives a tiny overfit loss down") {
  // One affordance sample on one cloud: loss should approach 0.
  const auto cloud = toy_cloud(16, 9);
  nets::ModuleNet<float> net;
  net.init(2, 31);
  nets::Adam<float> opt(1e-3);
  auto params = net.params();
  double first = 0, last = 0;
  for (int it = 0; it < 400; ++it) {
    net.zero_grad();
    typename nets::Encoder<float>::Cache cache;
    const auto fs = net.enc.forward(cloud, net.enc_cfg, &cache);
    nets::MatX<float> dfs =
        nets::MatX<float>::Zero(nets::kFeatureDim, fs.cols());
    const double loss =
        relaytrain::affordance_step(net, fs, dfs, 3, cloud.points[3], 0.9);
    net.enc.backward(cache, dfs);
    opt.step(params);
    if (it == 0) first = loss;
    last = loss;
  }
  CHECK(last < 0.05);
  CHECK(last < first);
}
