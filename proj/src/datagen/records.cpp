#include "datagen/records.hpp"

#include <filesystem>

#include "core/error.hpp"

namespace pgr::datagen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kShardMagic[4] = {'P', 'G', 'D', 'S'};
constexpr std::uint16_t kShardVersion = 1;

void write_vec3(ByteWriter& w, const Vec3& v) {
  w.f64(v.x());
  w.f64(v.y());
  w.f64(v.z());
}

Vec3 read_vec3(ByteReader& r) {
  const double x = r.f64(), y = r.f64(), z = r.f64();
  return {x, y, z};
}

void write_pose(ByteWriter& w, const scenesim::ObjectPose& p) {
  w.str(scenesim::pose_to_json(p).dump());
}

scenesim::ObjectPose read_pose(ByteReader& r) {
  return scenesim::pose_from_json(json::parse(r.str()));
}

void write_cloud_ref(ByteWriter& w, const CloudRef& ref) {
  w.u64(ref.camera_seed);
  w.u64(ref.render_seed);
  w.u32(ref.n);
  w.u32(std::uint32_t(ref.payload.size()));
  w.bytes(ref.payload.data(), ref.payload.size());
}

CloudRef read_cloud_ref(ByteReader& r) {
  CloudRef ref;
  ref.camera_seed = r.u64();
  ref.render_seed = r.u64();
  ref.n = r.u32();
  ref.payload.resize(r.u32());
  r.bytes(ref.payload.data(), ref.payload.size());
  return ref;
}

std::string shard_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "shard_%04zu.bin", index);
  return buf;
}

}  // namespace

cloudgen::LabeledPointCloud regenerate(const scenesim::SceneState& state,
                                       const CloudRef& ref) {
  if (!ref.payload.empty()) return cloudgen::cloud_from_bytes(ref.payload);
  const auto camera = cloudgen::sample_camera(state, ref.camera_seed);
  return cloudgen::render_cloud(state, camera, ref.n, ref.render_seed);
}

void record_to_bytes(const EpisodeRecord& rec, ByteWriter& w) {
  w.u8(rec.kind);
  w.u8(rec.scene);
  w.u64(rec.episode_seed);
  w.str(scenesim::state_to_json(rec.state).dump());
  write_cloud_ref(w, rec.cloud_before);
  if (rec.kind == EpisodeRecord::Grasp) {
    w.u32(rec.point_index);
    write_vec3(w, rec.grasp.contact);
    write_vec3(w, rec.grasp.euler);
    w.u8(rec.r);
    w.u8(rec.safety);
  } else {
    write_vec3(w, rec.push.contact);
    w.f64(rec.push.displacement.x());
    w.f64(rec.push.displacement.y());
    write_pose(w, rec.outcome.new_pose);
    w.f64(rec.outcome.slip);
    write_vec3(w, rec.outcome.rotation);
    w.u8(std::uint8_t(rec.outcome.safety));
    write_cloud_ref(w, rec.cloud_after);
    w.u8(rec.success);
  }
}

EpisodeRecord record_from_bytes(ByteReader& r) {
  EpisodeRecord rec;
  const std::uint8_t kind = r.u8();
  if (kind > 1) fail(Err::CorruptShard, "bad record kind");
  rec.kind = EpisodeRecord::Kind(kind);
  rec.scene = r.u8();
  rec.episode_seed = r.u64();
  rec.state = scenesim::state_from_json(json::parse(r.str()));
  rec.cloud_before = read_cloud_ref(r);
  if (rec.kind == EpisodeRecord::Grasp) {
    rec.point_index = r.u32();
    rec.grasp.contact = read_vec3(r);
    rec.grasp.euler = read_vec3(r);
    rec.r = r.u8();
    rec.safety = r.u8();
  } else {
    rec.push.contact = read_vec3(r);
    const double dx = r.f64(), dy = r.f64();
    rec.push.displacement = Vec2(dx, dy);
    rec.outcome.new_pose = read_pose(r);
    rec.outcome.slip = r.f64();
    rec.outcome.rotation = read_vec3(r);
    rec.outcome.safety = scenesim::SafetyEvent(r.u8());
    rec.cloud_after = read_cloud_ref(r);
    rec.success = r.u8();
  }
  return rec;
}

bool records_equal(const EpisodeRecord& a, const EpisodeRecord& b) {
  ByteWriter wa, wb;
  record_to_bytes(a, wa);
  record_to_bytes(b, wb);
  return wa.data() == wb.data();
}

void write_shards(const std::string& dir,
                  const std::vector<EpisodeRecord>& records,
                  const std::string& kind, const std::string& config_hash) {
  fs::create_directories(dir);
  json manifest;
  manifest["schema_version"] = 1;
  manifest["kind"] = kind;
  manifest["config_hash"] = config_hash;
  manifest["n_records"] = records.size();

  std::uint64_t n_success = 0;
  std::map<std::string, std::uint64_t> per_scene, per_category;
  for (const auto& rec : records) {
    const bool ok = rec.kind == EpisodeRecord::Grasp ? rec.r != 0
                                                     : rec.success != 0;
    n_success += ok ? 1 : 0;
    ++per_scene[scenesim::to_string(scenesim::SceneKind(rec.scene))];
    ++per_category[rec.state.object.category];
  }
  manifest["counts"] = {{"success", n_success},
                        {"failure", records.size() - n_success},
                        {"per_scene", per_scene},
                        {"per_category", per_category}};

  json shards = json::array();
  for (std::size_t start = 0; start < records.size() || start == 0;
       start += kShardCapacity) {
    const std::size_t count =
        std::min(kShardCapacity, records.size() - start);
    ByteWriter w;
    w.bytes(kShardMagic, 4);
    w.u16(kShardVersion);
    w.u32(std::uint32_t(count));
    for (std::size_t i = 0; i < count; ++i) {
      ByteWriter rw;
      record_to_bytes(records[start + i], rw);
      w.u32(std::uint32_t(rw.data().size()));
      w.bytes(rw.data().data(), rw.data().size());
    }
    // The manifest records the payload CRC (the same value the shard file
    // carries in its trailer). Hashing the whole file would be useless: the
    // CRC of any data followed by its own little-endian CRC is the fixed
    // CRC-32 residue, identical for every well-formed shard.
    const std::uint32_t payload_crc = crc32_of(w.data());
    ByteWriter out;
    out.bytes(w.data().data(), w.data().size());
    out.u32(payload_crc);
    const std::string name = shard_name(start / kShardCapacity);
    write_file((fs::path(dir) / name).string(), out.data());
    shards.push_back(
        {{"file", name}, {"records", count}, {"crc32", payload_crc}});
    if (records.empty()) break;
  }
  manifest["shards"] = shards;

  // Manifest last: its presence marks a complete dataset.
  const std::string text = manifest.dump(2) + "\n";
  write_file((fs::path(dir) / "manifest.json").string(),
             std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::vector<EpisodeRecord> read_shards(const std::string& dir,
                                       DatasetManifest* manifest_out) {
  const fs::path mpath = fs::path(dir) / "manifest.json";
  if (!fs::exists(mpath))
    fail(Err::MissingManifest, "no manifest in " + dir +
                                   " (incomplete or missing dataset)");
  json manifest;
  try {
    const auto bytes = read_file(mpath.string());
    manifest = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    fail(Err::CorruptFile, std::string("bad manifest: ") + e.what());
  }

  std::vector<EpisodeRecord> records;
  DatasetManifest meta;
  meta.kind = manifest.at("kind").get<std::string>();
  meta.config_hash = manifest.at("config_hash").get<std::string>();
  meta.n_records = manifest.at("n_records").get<std::uint64_t>();
  const auto& counts = manifest.at("counts");
  meta.n_success = counts.at("success").get<std::uint64_t>();
  meta.n_failure = counts.at("failure").get<std::uint64_t>();
  for (const auto& [k, v] : counts.at("per_scene").items())
    meta.per_scene[k] = v.get<std::uint64_t>();
  for (const auto& [k, v] : counts.at("per_category").items())
    meta.per_category[k] = v.get<std::uint64_t>();

  for (const auto& shard : manifest.at("shards")) {
    const std::string name = shard.at("file").get<std::string>();
    const auto bytes = read_file((fs::path(dir) / name).string());
    if (bytes.size() < 4 + 2 + 4 + 4)
      fail(Err::CorruptShard, "shard too short: " + name);
    const std::uint32_t stored =
        std::uint32_t(bytes[bytes.size() - 4]) |
        std::uint32_t(bytes[bytes.size() - 3]) << 8 |
        std::uint32_t(bytes[bytes.size() - 2]) << 16 |
        std::uint32_t(bytes[bytes.size() - 1]) << 24;
    const std::uint32_t payload_crc =
        crc32_of(bytes.data(), bytes.size() - 4);
    if (payload_crc != shard.at("crc32").get<std::uint32_t>())
      fail(Err::CorruptShard, "shard checksum mismatch: " + name);
    if (payload_crc != stored)
      fail(Err::CorruptShard, "shard payload checksum mismatch: " + name);
    meta.shard_checksums.emplace_back(name, payload_crc);

    ByteReader r(bytes.data(), bytes.size() - 4);
    char magic[4];
    r.bytes(magic, 4);
    if (std::string_view(magic, 4) != std::string_view(kShardMagic, 4))
      fail(Err::CorruptShard, "bad shard magic: " + name);
    if (r.u16() != kShardVersion)
      fail(Err::SchemaMismatch, "unsupported shard version: " + name);
    const std::uint32_t count = r.u32();
    if (count > kShardCapacity)
      fail(Err::CorruptShard, "shard over capacity: " + name);
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::uint32_t len = r.u32();
      if (len > r.remaining())
        fail(Err::CorruptShard, "record overruns shard: " + name);
      const std::size_t end = r.pos() + len;
      records.push_back(record_from_bytes(r));
      if (r.pos() != end)
        fail(Err::CorruptShard, "record length mismatch: " + name);
    }
  }
  if (records.size() != meta.n_records)
    fail(Err::CorruptShard, "manifest count does not match shard contents");
  if (manifest_out) *manifest_out = meta;
  return records;
}

std::string dataset_hash(const std::string& dir) {
  DatasetManifest meta;
  read_shards(dir, &meta);
  ByteWriter w;
  for (const auto& [name, crc] : meta.shard_checksums) {
    w.str(name);
    w.u32(crc);
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", crc32_of(w.data()));
  return buf;
}

}  // namespace pgr::datagen
