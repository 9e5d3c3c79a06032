#pragma once

#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "cloudgen/cloudgen.hpp"
#include "core/binio.hpp"
#include "scenesim/scene.hpp"

namespace pgr::datagen {

// A stored cloud is its regeneration recipe; the payload is only embedded
// when a dataset is archived (embed flag at collection time).
struct CloudRef {
  std::uint64_t camera_seed = 0;
  std::uint64_t render_seed = 0;
  std::uint32_t n = 0;
  std::vector<std::uint8_t> payload;  // optional embedded cloud record
};

// Renders (or unpacks) the cloud a CloudRef describes for the given state.
cloudgen::LabeledPointCloud regenerate(const scenesim::SceneState& state,
                                       const CloudRef& ref);

struct EpisodeRecord {
  enum Kind : std::uint8_t { Grasp = 0, PreGrasp = 1 };
  Kind kind = Grasp;
  std::uint8_t scene = 0;  // scenesim::SceneKind
  std::uint64_t episode_seed = 0;
  scenesim::SceneState state;  // pose before the action
  CloudRef cloud_before;

  // Grasp episodes: contact is cloud_before.points[point_index].
  std::uint32_t point_index = 0;
  scenesim::GraspAction grasp;
  std::uint8_t r = 0;       // grasp outcome
  std::uint8_t safety = 0;  // scenesim::SafetyEvent of the grasp

  // Pre-grasp episodes.
  scenesim::PreGraspAction push;
  scenesim::PushOutcome outcome;
  CloudRef cloud_after;  // only valid when outcome.safety == None
  std::uint8_t success = 0;  // 40%-gain rule at collection time
};

void record_to_bytes(const EpisodeRecord& rec, ByteWriter& w);
EpisodeRecord record_from_bytes(ByteReader& r);
bool records_equal(const EpisodeRecord& a, const EpisodeRecord& b);

struct DatasetManifest {
  std::string kind;  // "grasp" | "pregrasp"
  std::string config_hash;
  std::uint64_t n_records = 0;
  std::uint64_t n_success = 0;
  std::uint64_t n_failure = 0;
  std::map<std::string, std::uint64_t> per_scene;
  std::map<std::string, std::uint64_t> per_category;
  std::vector<std::pair<std::string, std::uint32_t>> shard_checksums;
};

// Shards of at most 4096 records each; the manifest is written last and
// serves as the completion marker.
inline constexpr std::size_t kShardCapacity = 4096;

void write_shards(const std::string& dir,
                  const std::vector<EpisodeRecord>& records,
                  const std::string& kind, const std::string& config_hash);
std::vector<EpisodeRecord> read_shards(const std::string& dir,
                                       DatasetManifest* manifest = nullptr);

// Stable content hash of a dataset (over shard checksums), recorded in
// trained-weight metadata.
std::string dataset_hash(const std::string& dir);

}  // namespace pgr::datagen
