#include "nets/weights.hpp"

#include "core/binio.hpp"
#include "core/error.hpp"

namespace pgr::nets {

namespace {
constexpr std::uint16_t kSchema = 1;
}

void save_weights(const std::string& path, ModuleNet<float>& net,
                  const WeightsMeta& meta) {
  ByteWriter w;
  w.bytes("PGWT", 4);
  w.u16(kSchema);
  w.u8(std::uint8_t(net.module));
  w.u64(meta.seed);
  w.u32(meta.epochs);
  w.str(meta.dataset_hash);

  std::uint32_t count = 0;
  net.visit([&](const char*, Dense<float>&) { count += 2; });
  w.u32(count);
  net.visit([&](const char* name, Dense<float>& d) {
    for (const auto& [suffix, m] :
         {std::pair<const char*, MatX<float>*>{".W", &d.W}, {".b", &d.b}}) {
      w.str(std::string(name) + suffix);
      w.u32(std::uint32_t(m->rows()));
      w.u32(std::uint32_t(m->cols()));
      for (int c = 0; c < m->cols(); ++c)
        for (int r = 0; r < m->rows(); ++r) w.f32((*m)(r, c));
    }
  });
  ByteWriter out;
  out.bytes(w.data().data(), w.data().size());
  out.u32(crc32_of(w.data()));
  write_file(path, out.data());
}

WeightsMeta load_weights(const std::string& path, ModuleNet<float>& net) {
  const auto bytes = read_file(path);
  if (bytes.size() < 4 + 2 + 4)
    fail(Err::CorruptFile, "weight file too short: " + path);
  const std::uint32_t stored_crc =
      std::uint32_t(bytes[bytes.size() - 4]) |
      std::uint32_t(bytes[bytes.size() - 3]) << 8 |
      std::uint32_t(bytes[bytes.size() - 2]) << 16 |
      std::uint32_t(bytes[bytes.size() - 1]) << 24;
  if (crc32_of(bytes.data(), bytes.size() - 4) != stored_crc)
    fail(Err::CorruptFile, "weight file checksum mismatch: " + path);

  ByteReader r(bytes.data(), bytes.size() - 4);
  char magic[4];
  r.bytes(magic, 4);
  if (std::string_view(magic, 4) != "PGWT")
    fail(Err::SchemaMismatch, "not a weight file: " + path);
  if (r.u16() != kSchema)
    fail(Err::SchemaMismatch, "unsupported weight schema: " + path);
  const int module = r.u8();
  if (module != net.module)
    fail(Err::SchemaMismatch, "weight file is for module " +
                                  std::to_string(module));
  WeightsMeta meta;
  meta.seed = r.u64();
  meta.epochs = r.u32();
  meta.dataset_hash = r.str();

  const std::uint32_t count = r.u32();
  std::uint32_t seen = 0;
  net.visit([&](const char* name, Dense<float>& d) {
    for (const auto& [suffix, m] :
         {std::pair<const char*, MatX<float>*>{".W", &d.W}, {".b", &d.b}}) {
      const std::string expect = std::string(name) + suffix;
      const std::string got = r.str();
      if (got != expect)
        fail(Err::SchemaMismatch,
             "tensor order mismatch: expected " + expect + ", got " + got);
      const std::uint32_t rows = r.u32(), cols = r.u32();
      if (int(rows) != m->rows() || int(cols) != m->cols())
        fail(Err::SchemaMismatch, "tensor shape mismatch for " + expect);
      for (std::uint32_t c = 0; c < cols; ++c)
        for (std::uint32_t rr = 0; rr < rows; ++rr) (*m)(rr, c) = r.f32();
      ++seen;
    }
  });
  if (seen != count)
    fail(Err::SchemaMismatch, "tensor count mismatch in " + path);
  return meta;
}

}  // namespace pgr::nets
