#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cloudgen/cloudgen.hpp"

namespace pgr::render {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  std::uint8_t* at(int x, int y) { return &rgb[3 * (y * width + x)]; }
  const std::uint8_t* at(int x, int y) const {
    return &rgb[3 * (y * width + x)];
  }
};

// Affordance heatmap over the cloud. Scores in [0, 1] blend from blue (low)
// to red (high); environment points render gray on a dark background.
// Orthographic top-down by default; camera_view projects along the cloud's
// stored camera instead.
Image render_heatmap(const cloudgen::LabeledPointCloud& cloud,
                     const std::vector<double>& scores, int width, int height,
                     bool camera_view = false);

// Minimal RGB8 PNG encoder (single IDAT, no filtering).
std::vector<std::uint8_t> png_bytes(const Image& img);
void write_png(const std::string& path, const Image& img);

}  // namespace pgr::render
