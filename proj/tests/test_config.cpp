#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <doctest.h>
#include <json.hpp>

#include "config/config.hpp"
#include "core/error.hpp"

using namespace pgr;
using nlohmann::json;

TEST_SUITE_BEGIN("config");

TEST_CASE("defaults survive a normalize round trip") {
  const auto base = config::default_config();
  const json doc = config::config_to_json(base);
  const auto back = config::config_from_json(doc);
  CHECK(config::config_to_json(back) == doc);
  CHECK(config::config_hash(back) == config::config_hash(base));

  // The normalized document always carries every group.
  for (const char* key :
       {"seed", "out_dir", "cloud_n", "sim", "placement", "oracle", "datagen",
        "train", "planner", "eval", "sweep"})
    CHECK(doc.contains(key));
}

TEST_CASE("unknown keys are rejected with their location") {
  json doc = config::config_to_json(config::default_config());

  SUBCASE("at the root") {
    doc["bogus"] = 1;
    CHECK_THROWS_WITH_AS(config::config_from_json(doc),
                         "unknown key config.bogus", Error);
  }
  SUBCASE("inside a group") {
    doc["sim"]["bogus"] = 1;
    CHECK_THROWS_WITH_AS(config::config_from_json(doc),
                         "unknown key sim.bogus", Error);
  }
  SUBCASE("inside a nested group") {
    doc["datagen"]["grasp"]["bogus"] = 1;
    CHECK_THROWS_WITH_AS(config::config_from_json(doc),
                         "unknown key datagen.grasp.bogus", Error);
  }
  SUBCASE("wrongly typed value") {
    doc["sim"]["push_max"] = "lots";
    CHECK_THROWS_AS(config::config_from_json(doc), Error);
  }
}

TEST_CASE("partial documents inherit the remaining defaults") {
  const auto c = config::config_from_json(json{{"seed", 42}});
  const auto d = config::default_config();
  CHECK(c.seed == 42);
  CHECK(c.cloud_n == d.cloud_n);
  CHECK(c.planner.theta_g == d.planner.theta_g);
  // Shared values propagate into the stage configs.
  CHECK(c.train.seed == 42);
  CHECK(c.planner.seed == 42);
  CHECK(c.eval.seed == 42);

  const auto c2 = config::config_from_json(json{{"cloud_n", 512}});
  CHECK(c2.grasp_collect.cloud_n == 512);
  CHECK(c2.pregrasp_collect.cloud_n == 512);
  CHECK(c2.planner.cloud_n == 512);
}

TEST_CASE("validation rejects out-of-range values") {
  json doc;
  SUBCASE("theta") { doc["planner"]["theta_g"] = 1.5; }
  SUBCASE("cloud size") { doc["cloud_n"] = 16; }
  SUBCASE("iteration cap") { doc["planner"]["max_iterations"] = 0; }
  SUBCASE("learning rate") { doc["train"]["lr"] = 0.0; }
  SUBCASE("trials") { doc["eval"]["trials"] = 0; }
  SUBCASE("quota") { doc["datagen"]["grasp"]["success"] = 0; }
  CHECK_THROWS_AS(config::config_from_json(doc), Error);
  try {
    config::config_from_json(doc);
  } catch (const Error& e) {
    CHECK(e.code() == Err::InvalidConfig);
  }
}

TEST_CASE("hash is deterministic and value-sensitive") {
  const auto a = config::default_config();
  auto b = config::default_config();
  CHECK(config::config_hash(a) == config::config_hash(b));
  CHECK(config::config_hash(a).size() == 8);

  b.seed = 1;
  CHECK(config::config_hash(a) != config::config_hash(b));

  auto c = config::default_config();
  c.planner.theta_g = 0.81;
  CHECK(config::config_hash(a) != config::config_hash(c));
}

TEST_CASE("load_config reads files and honors PGR_SEED") {
  const auto dir = std::filesystem::temp_directory_path() / "pgr_cfg_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "cfg.json").string();
  {
    std::ofstream f(path);
    f << R"({"seed": 5, "planner": {"theta_g": 0.6}})";
  }

  unsetenv("PGR_SEED");
  auto c = config::load_config(path);
  CHECK(c.seed == 5);
  CHECK(c.planner.theta_g == 0.6);

  setenv("PGR_SEED", "99", 1);
  c = config::load_config(path);
  CHECK(c.seed == 99);
  CHECK(c.train.seed == 99);  // override flows into the stage configs

  // Empty path: defaults (plus the env override).
  c = config::load_config("");
  CHECK(c.seed == 99);

  setenv("PGR_SEED", "not-a-number", 1);
  CHECK_THROWS_AS(config::load_config(path), Error);
  unsetenv("PGR_SEED");

  CHECK_THROWS_AS(config::load_config((dir / "absent.json").string()), Error);
  std::filesystem::remove_all(dir);
}

TEST_SUITE_END();
