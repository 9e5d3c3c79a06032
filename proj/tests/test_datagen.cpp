#include <doctest.h>

#include <filesystem>

#include "core/error.hpp"
#include "datagen/collect.hpp"

using namespace pgr;
using namespace pgr::datagen;
namespace fs = std::filesystem;

namespace {

// Grasp-score stub whose score rises sharply once the object's +x extent
// passes the table's, i.e. once the object overhangs the +x edge.
class EdgeProximityStub : public relaytrain::GraspScorer {
 public:
  void prepare(const cloudgen::LabeledPointCloud& c) override {
    double obj_x = -1e9, env_x = -1e9;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      double& slot = c.labels[i] == cloudgen::kLabelObject ? obj_x : env_x;
      slot = std::max(slot, c.points[i].x());
    }
    score_ = 1.0 / (1.0 + std::exp(-(obj_x - env_x + 0.02) / 0.02));
  }
  double affordance(int) override { return 0.5; }
  double sample_and_score(int, Rng&) override { return score_; }

 private:
  double score_ = 0;
};

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("pgr_dataset_test_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<EpisodeRecord> small_grasp_dataset(std::uint64_t seed,
                                               bool embed = false) {
  GraspCollectConfig cfg;
  cfg.embed_clouds = embed;
  return collect_grasp(8, 24,
                       {scenesim::SceneKind::Edge, scenesim::SceneKind::Wall},
                       {"phone", "book", "mug"}, seed, cfg);
}

}  // namespace

TEST_CASE("grasp collection meets quotas exactly and deterministically") {
  const auto records = small_grasp_dataset(11);
  std::size_t succ = 0;
  for (const auto& r : records) succ += r.r;
  CHECK(records.size() == 32);
  CHECK(succ == 8);

  // Same seed: byte-identical records.
  const auto again = small_grasp_dataset(11);
  REQUIRE(again.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    CHECK(records_equal(records[i], again[i]));

  for (const auto& rec : records) {
    CHECK(rec.kind == EpisodeRecord::Grasp);
    // Approach ray inside the hemisphere above the local tangent plane.
    const Vec3 n = scenesim::surface_normal(rec.state, rec.grasp.contact);
    const Vec3 a = approach_dir(euler_to_matrix(rec.grasp.euler));
    CHECK(a.dot(n) < 0.0);
    // Contact is the indexed point of the regenerated cloud.
    const auto cloud = regenerate(rec.state, rec.cloud_before);
    REQUIRE(rec.point_index < cloud.points.size());
    CHECK((cloud.points[rec.point_index] - rec.grasp.contact).norm() == 0.0);
  }
}

TEST_CASE("embedded cloud payloads match regeneration") {
  const auto records = small_grasp_dataset(13, /*embed=*/true);
  for (std::size_t i = 0; i < records.size(); i += 7) {
    const auto& rec = records[i];
    REQUIRE(!rec.cloud_before.payload.empty());
    const auto embedded = regenerate(rec.state, rec.cloud_before);
    CloudRef seeds_only = rec.cloud_before;
    seeds_only.payload.clear();
    const auto rendered = regenerate(rec.state, seeds_only);
    REQUIRE(embedded.n_points() == rendered.n_points());
    for (std::size_t k = 0; k < embedded.n_points(); ++k) {
      // Payload stores f32-rounded coordinates.
      CHECK((embedded.points[k] - rendered.points[k]).norm() < 1e-6);
      CHECK(embedded.labels[k] == rendered.labels[k]);
    }
  }
}

TEST_CASE("shard round trip, corruption, and manifest marker") {
  const auto records = small_grasp_dataset(17);
  TempDir dir;
  write_shards(dir.path.string(), records, "grasp", "cfg123");

  DatasetManifest meta;
  const auto back = read_shards(dir.path.string(), &meta);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    CHECK(records_equal(records[i], back[i]));
  CHECK(meta.kind == "grasp");
  CHECK(meta.config_hash == "cfg123");
  CHECK(meta.n_success == 8);
  CHECK(meta.n_failure == 24);
  std::uint64_t scene_total = 0;
  for (const auto& [k, v] : meta.per_scene) scene_total += v;
  CHECK(scene_total == records.size());

  CHECK(!dataset_hash(dir.path.string()).empty());

  SUBCASE("bit flip is detected") {
    const auto shard = (dir.path / "shard_0000.bin").string();
    auto bytes = read_file(shard);
    bytes[bytes.size() / 2] ^= 0x10;
    write_file(shard, bytes);
    try {
      read_shards(dir.path.string());
      FAIL("expected CorruptShard");
    } catch (const Error& e) {
      CHECK(e.code() == Err::CorruptShard);
    }
  }
  SUBCASE("missing manifest marks a partial dataset") {
    fs::remove(dir.path / "manifest.json");
    try {
      read_shards(dir.path.string());
      FAIL("expected MissingManifest");
    } catch (const Error& e) {
      CHECK(e.code() == Err::MissingManifest);
    }
  }
}

TEST_CASE("large datasets split into capped shards") {
  auto one = small_grasp_dataset(19);
  std::vector<EpisodeRecord> many;
  for (int i = 0; i < 150; ++i)
    many.insert(many.end(), one.begin(), one.end());  // 4800 records
  TempDir dir;
  write_shards(dir.path.string(), many, "grasp", "x");
  CHECK(fs::exists(dir.path / "shard_0000.bin"));
  CHECK(fs::exists(dir.path / "shard_0001.bin"));
  const auto back = read_shards(dir.path.string());
  REQUIRE(back.size() == many.size());
  CHECK(records_equal(back[kShardCapacity], many[kShardCapacity]));
}

TEST_CASE("push direction sampler") {
  SUBCASE("undirected is uniform on the circle") {
    Rng rng(29);
    const int n = 10000;
    std::vector<double> angles;
    for (int i = 0; i < n; ++i) {
      const Vec2 d = sample_push_direction(rng, Vec2(0.5, 0.5), Vec2(1.2, 0.5),
                                           0.0, 0.3);
      CHECK(d.norm() == doctest::Approx(1.0));
      angles.push_back(std::atan2(d.y(), d.x()) + M_PI);
    }
    std::sort(angles.begin(), angles.end());
    double ks = 0;
    for (int i = 0; i < n; ++i) {
      const double u = angles[i] / (2 * M_PI);
      ks = std::max(ks, std::abs(u - double(i + 1) / n));
      ks = std::max(ks, std::abs(u - double(i) / n));
    }
    CHECK(ks < 1.63 / std::sqrt(double(n)));  // alpha = 0.01
  }
  SUBCASE("fully directed with zero noise aims exactly at the anchor") {
    Rng rng(31);
    for (int i = 0; i < 50; ++i) {
      const Vec2 from(rng.uniform(0.1, 1.1), rng.uniform(0.1, 0.7));
      const Vec2 anchor(1.2, from.y());
      const Vec2 d = sample_push_direction(rng, from, anchor, 1.0, 0.0);
      CHECK(d.x() == 1.0);
      CHECK(d.y() == 0.0);
    }
  }
  SUBCASE("magnitude is truncated normal") {
    Rng rng(37);
    for (int i = 0; i < 2000; ++i) {
      const double m = sample_push_magnitude(rng, 0.15, 0.05, 0.4);
      CHECK(m > 0.0);
      CHECK(m <= 0.4);
    }
  }
}

TEST_CASE("pre-grasp collection quotas, re-simulation, and determinism") {
  EdgeProximityStub stub;
  PreGraspCollectConfig cfg;
  cfg.attempts_per_state = 2;
  const auto records = collect_pregrasp(6, 18, {scenesim::SceneKind::Edge},
                                        {"phone", "cd"}, 23, stub, cfg);
  std::size_t succ = 0;
  for (const auto& r : records) succ += r.success;
  CHECK(records.size() == 24);
  CHECK(succ == 6);

  EdgeProximityStub stub2;
  const auto again = collect_pregrasp(6, 18, {scenesim::SceneKind::Edge},
                                      {"phone", "cd"}, 23, stub2, cfg);
  REQUIRE(again.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    CHECK(records_equal(records[i], again[i]));

  for (const auto& rec : records) {
    CHECK(rec.kind == EpisodeRecord::PreGrasp);
    CHECK(rec.push.displacement.norm() <= 0.4);
    CHECK(rec.push.displacement.norm() > 0.0);
    // Stored outcome equals re-simulation from stored inputs.
    const auto re = scenesim::apply_push(rec.state, rec.push, cfg.push_steps,
                                         cfg.sim);
    CHECK(re.safety == rec.outcome.safety);
    CHECK(re.slip == rec.outcome.slip);
    CHECK(re.new_pose.x == rec.outcome.new_pose.x);
    CHECK(re.new_pose.y == rec.outcome.new_pose.y);
    CHECK(re.new_pose.yaw == rec.outcome.new_pose.yaw);
    CHECK((re.rotation - rec.outcome.rotation).norm() == 0.0);
  }
}

TEST_CASE("directed pushes raise the success-per-attempt rate") {
  // Same seed set, fixed state budget; compare raw pre-quota rates.
  const auto rate = [](double directed_fraction) {
    EdgeProximityStub stub;
    PreGraspCollectConfig cfg;
    cfg.attempts_per_state = 2;
    cfg.directed_fraction = directed_fraction;
    cfg.max_states = 200;
    CollectStats stats;
    try {
      collect_pregrasp(std::size_t(1) << 40, std::size_t(1) << 40,
                       {scenesim::SceneKind::Edge}, {"phone"}, 7, stub, cfg,
                       &stats);
    } catch (const Error& e) {
      CHECK(e.code() == Err::QuotaInfeasible);
    }
    REQUIRE(stats.attempts > 100);
    return double(stats.successes_seen) / double(stats.attempts);
  };
  const double undirected = rate(0.0);
  const double directed = rate(0.3);
  CHECK(directed >= 1.2 * undirected);
}

TEST_CASE("impossible quotas fail loudly") {
  GraspCollectConfig cfg;
  cfg.max_states = 5;
  try {
    collect_grasp(1000, 1000, {scenesim::SceneKind::Edge}, {"phone"}, 3, cfg);
    FAIL("expected QuotaInfeasible");
  } catch (const Error& e) {
    CHECK(e.code() == Err::QuotaInfeasible);
  }
}
