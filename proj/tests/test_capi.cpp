// Exercises the C API surface: handle lifecycle, status codes, the
// thread-local error message, and config overrides. The heavy pipeline
// operations are covered end to end by the CLI test script.
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "pregrasp/pregrasp.h"

namespace {

struct Handle {
  pg_config* cfg = nullptr;
  ~Handle() { pg_config_free(cfg); }
};

std::string dump(const pg_config* cfg) {
  char* text = nullptr;
  REQUIRE(pg_config_dump(cfg, &text) == PG_OK);
  std::string out(text);
  pg_string_free(text);
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("capi");

TEST_CASE("config lifecycle, dump, and hash") {
  Handle h;
  REQUIRE(pg_config_load(nullptr, &h.cfg) == PG_OK);

  const auto doc = nlohmann::json::parse(dump(h.cfg));
  CHECK(doc.at("seed") == 0);
  CHECK(doc.at("planner").at("theta_g") == 0.8);

  char hash[9] = {};
  REQUIRE(pg_config_hash(h.cfg, hash, sizeof hash) == PG_OK);
  CHECK(std::strlen(hash) == 8);
  CHECK(pg_config_hash(h.cfg, hash, 4) == PG_USAGE);

  // from_json agrees with load-defaults for the same document.
  Handle h2;
  REQUIRE(pg_config_from_json(dump(h.cfg).c_str(), &h2.cfg) == PG_OK);
  char hash2[9] = {};
  REQUIRE(pg_config_hash(h2.cfg, hash2, sizeof hash2) == PG_OK);
  CHECK(std::string(hash) == hash2);
}

TEST_CASE("setters update the document and validate input") {
  Handle h;
  REQUIRE(pg_config_load(nullptr, &h.cfg) == PG_OK);

  CHECK(pg_config_set_seed(h.cfg, 42) == PG_OK);
  CHECK(pg_config_set_theta(h.cfg, 0.55) == PG_OK);
  CHECK(pg_config_set_trials(h.cfg, 7) == PG_OK);
  CHECK(pg_config_set_quota(h.cfg, "grasp", 11, 33) == PG_OK);
  CHECK(pg_config_set_baselines(h.cfg, "ours,no_pregrasp") == PG_OK);
  CHECK(pg_config_set_out_dir(h.cfg, "elsewhere") == PG_OK);

  const auto doc = nlohmann::json::parse(dump(h.cfg));
  CHECK(doc.at("seed") == 42);
  CHECK(doc.at("planner").at("theta_g") == 0.55);
  CHECK(doc.at("eval").at("trials") == 7);
  CHECK(doc.at("datagen").at("grasp").at("success") == 11);
  CHECK(doc.at("datagen").at("grasp").at("failure") == 33);
  CHECK(doc.at("eval").at("baselines") ==
        nlohmann::json({"ours", "no_pregrasp"}));
  CHECK(doc.at("out_dir") == "elsewhere");

  CHECK(pg_config_set_theta(h.cfg, 1.5) == PG_USAGE);
  CHECK(pg_config_set_trials(h.cfg, 0) == PG_USAGE);
  CHECK(pg_config_set_quota(h.cfg, "bogus", 1, 1) == PG_USAGE);
  CHECK(pg_config_set_baselines(h.cfg, "bogus") == PG_USAGE);
  CHECK(std::string(pg_last_error()).find("bogus") != std::string::npos);
}

TEST_CASE("status codes mirror the error taxonomy") {
  Handle h;
  REQUIRE(pg_config_load(nullptr, &h.cfg) == PG_OK);

  // NULL / invalid handles and arguments.
  CHECK(pg_config_load("/nonexistent/cfg.json", &h.cfg) != PG_OK);
  CHECK(pg_config_from_json("{not json", &h.cfg) == PG_USAGE);
  CHECK(pg_config_from_json("{\"bogus\": 1}", &h.cfg) == PG_USAGE);
  CHECK(pg_collect(nullptr, "grasp", "x", nullptr) == PG_USAGE);
  CHECK(pg_collect(h.cfg, "bogus", "x", nullptr) == PG_USAGE);

  // Relay order: the pre-grasp dataset needs trained grasp weights.
  CHECK(pg_collect(h.cfg, "pregrasp", "x", nullptr) == PG_MISSING_DEPENDENCY);
  CHECK(pg_plan(h.cfg, "/nonexistent.wt", "/nonexistent.wt", "edge", "phone",
                nullptr) == PG_USAGE);  // out_json missing
  char* json = nullptr;
  CHECK(pg_plan(h.cfg, "/nonexistent.wt", "/nonexistent.wt", "edge", "phone",
                &json) == PG_MISSING_DEPENDENCY);

  // A present-but-garbage weight file is corrupt, not missing.
  const auto dir = std::filesystem::temp_directory_path() / "pgr_capi_test";
  std::filesystem::create_directories(dir);
  const auto bad = (dir / "bad.wt").string();
  { std::ofstream(bad) << "not a weight file, certainly"; }
  CHECK(pg_plan(h.cfg, bad.c_str(), bad.c_str(), "edge", "phone", &json) ==
        PG_CORRUPT_DATA);
  CHECK(std::string(pg_last_error()).size() > 0);
  std::filesystem::remove_all(dir);
}

TEST_SUITE_END();
