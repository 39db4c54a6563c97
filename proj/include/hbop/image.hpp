#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hbop/geometry.hpp"

namespace hbop {

/// Binary shape mask. Row-major, 1 = shape pixel.
/// Valid instances have exactly one 4-connected foreground component.
struct ShapeImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> mask;
  std::string id;
  std::string class_label;

  bool at(int x, int y) const {
    if (x < 0 || y < 0 || x >= width || y >= height) return false;
    return mask[static_cast<std::size_t>(y) * width + x] != 0;
  }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }

  int foreground_count() const;
};

/// Build a validated ShapeImage from raw pixels. Throws EmptyMask /
/// MultipleComponents / BadArgument on invariant violations.
ShapeImage make_shape(int width, int height, std::vector<std::uint8_t> mask,
                      std::string id = {}, std::string class_label = {});

/// Load a mask from a PBM (P1/P4) or, when compiled with libpng, a PNG file.
/// PNG pixels are thresholded at 128 after grayscale conversion; dark pixels
/// are the shape, matching the PBM convention where 1 = black = shape.
ShapeImage load_mask(const std::string& file_path);

/// Plain-text P1 writer, used by the ingest tooling and the tests.
void save_pbm(const ShapeImage& shape, const std::string& file_path);

/// Count 4-connected components of the foreground.
int count_foreground_components4(int width, int height,
                                 const std::vector<std::uint8_t>& mask);

/// Number of holes: 4-connected background components not reaching the
/// image border.
int count_holes(const ShapeImage& shape);

/// Global geometry of a mask, shared by graph construction and features.
struct MaskStats {
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  double max_centroid_dist = 0.0;  // over foreground pixels
  double principal_axis = 0.0;     // [0, pi), from second central moments
  std::vector<Point> boundary;     // foreground pixels 4-adjacent to background,
                                   // in scanline order
};

MaskStats compute_mask_stats(const ShapeImage& shape);

}  // namespace hbop
