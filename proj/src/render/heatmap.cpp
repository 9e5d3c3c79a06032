#include "render/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <zlib.h>

#include "core/binio.hpp"
#include "core/error.hpp"

namespace pgr::render {

namespace {

constexpr std::uint8_t kBackground[3] = {20, 20, 24};
constexpr std::uint8_t kEnvironment[3] = {95, 95, 95};

void score_color(double s, std::uint8_t* px) {
  s = std::clamp(s, 0.0, 1.0);
  // Blue (low) to red (high), documented in the CLI help.
  px[0] = std::uint8_t(40 + s * (230 - 40));
  px[1] = std::uint8_t(60 + s * (30 - 60));
  px[2] = std::uint8_t(220 + s * (30 - 220));
}

void splat(Image& img, int cx, int cy, const std::uint8_t* color) {
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) {
      const int x = cx + dx, y = cy + dy;
      if (x < 0 || y < 0 || x >= img.width || y >= img.height) continue;
      std::copy(color, color + 3, img.at(x, y));
    }
}

}  // namespace

Image render_heatmap(const cloudgen::LabeledPointCloud& cloud,
                     const std::vector<double>& scores, int width, int height,
                     bool camera_view) {
  if (width < 8 || height < 8)
    throw Error(Err::InvalidConfig, "heatmap size must be at least 8x8");
  if (scores.size() != cloud.n_points())
    throw Error(Err::InvalidConfig, "scores must align with the cloud");

  Image img;
  img.width = width;
  img.height = height;
  img.rgb.resize(std::size_t(3) * width * height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      std::copy(kBackground, kBackground + 3, img.at(x, y));

  const std::size_t n = cloud.n_points();
  if (n == 0) return img;

  // Projection basis: top-down (x right, y up) or the stored camera frame.
  Vec3 right(1, 0, 0), up(0, 1, 0), toward(0, 0, -1);
  Vec3 origin(0, 0, 0);
  if (camera_view) {
    const auto& cam = cloud.camera;
    toward = (cam.look_at - cam.position).normalized();
    right = toward.cross(cam.up).normalized();
    up = right.cross(toward);
    origin = cam.position;
  }

  std::vector<double> us(n), vs(n), depth(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 d = cloud.points[i] - origin;
    us[i] = d.dot(right);
    vs[i] = d.dot(up);
    depth[i] = d.dot(toward);
  }
  const auto [umin, umax] = std::minmax_element(us.begin(), us.end());
  const auto [vmin, vmax] = std::minmax_element(vs.begin(), vs.end());
  const double span =
      std::max({*umax - *umin, *vmax - *vmin, 1e-6});
  const double scale = 0.9 * std::min(width, height) / span;
  const double ucenter = 0.5 * (*umin + *umax);
  const double vcenter = 0.5 * (*vmin + *vmax);

  // Far points first so near ones overwrite them.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return depth[a] != depth[b] ? depth[a] > depth[b] : a < b;
  });

  for (const std::size_t i : order) {
    const int x = int(std::lround(width / 2.0 + (us[i] - ucenter) * scale));
    const int y = int(std::lround(height / 2.0 - (vs[i] - vcenter) * scale));
    std::uint8_t color[3];
    if (cloud.labels[i] == cloudgen::kLabelObject)
      score_color(scores[i], color);
    else
      std::copy(kEnvironment, kEnvironment + 3, color);
    splat(img, x, y, color);
  }
  return img;
}

namespace {

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               const std::vector<std::uint8_t>& data) {
  const auto be32 = [&](std::uint32_t v) {
    out.push_back(std::uint8_t(v >> 24));
    out.push_back(std::uint8_t(v >> 16));
    out.push_back(std::uint8_t(v >> 8));
    out.push_back(std::uint8_t(v));
  };
  be32(std::uint32_t(data.size()));
  const std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  be32(std::uint32_t(
      ::crc32(0L, out.data() + crc_start, uInt(out.size() - crc_start))));
}

}  // namespace

std::vector<std::uint8_t> png_bytes(const Image& img) {
  std::vector<std::uint8_t> out{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

  std::vector<std::uint8_t> ihdr;
  const auto be32 = [&](std::uint32_t v) {
    ihdr.push_back(std::uint8_t(v >> 24));
    ihdr.push_back(std::uint8_t(v >> 16));
    ihdr.push_back(std::uint8_t(v >> 8));
    ihdr.push_back(std::uint8_t(v));
  };
  be32(std::uint32_t(img.width));
  be32(std::uint32_t(img.height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // color type: RGB
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter method
  ihdr.push_back(0);  // no interlace
  put_chunk(out, "IHDR", ihdr);

  // Raw scanlines, each prefixed by filter byte 0.
  std::vector<std::uint8_t> raw;
  raw.reserve((std::size_t(img.width) * 3 + 1) * img.height);
  for (int y = 0; y < img.height; ++y) {
    raw.push_back(0);
    raw.insert(raw.end(), img.at(0, y), img.at(0, y) + 3 * img.width);
  }
  uLongf zlen = compressBound(uLong(raw.size()));
  std::vector<std::uint8_t> z(zlen);
  if (compress2(z.data(), &zlen, raw.data(), uLong(raw.size()), 6) != Z_OK)
    throw Error(Err::Io, "png: deflate failed");
  z.resize(zlen);
  put_chunk(out, "IDAT", z);
  put_chunk(out, "IEND", {});
  return out;
}

void write_png(const std::string& path, const Image& img) {
  write_file(path, png_bytes(img));
}

}  // namespace pgr::render
