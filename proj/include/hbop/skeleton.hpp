#pragma once

#include <cstdint>
#include <vector>

#include "hbop/geometry.hpp"
#include "hbop/image.hpp"

namespace hbop {

/// Thin, homotopic skeleton of a shape mask. `radius` holds the Euclidean
/// distance transform at skeleton pixels; `boundary_contribution` counts the
/// boundary pixels whose nearest skeleton pixel this is (the additive branch
/// relevance measure).
struct Skeleton {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
  std::vector<double> radius;
  std::vector<double> boundary_contribution;
  int total_boundary = 0;

  bool at(int x, int y) const {
    if (x < 0 || y < 0 || x >= width || y >= height) return false;
    return pixels[static_cast<std::size_t>(y) * width + x] != 0;
  }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }

  int pixel_count() const;
  std::vector<Point> pixel_list() const;  // scanline order
};

/// Exact squared Euclidean distance to the nearest zero pixel
/// (Felzenszwalb-Huttenlocher two-pass).
std::vector<double> squared_distance_transform(int width, int height,
                                               const std::vector<std::uint8_t>& mask);

/// Distance-ordered homotopic thinning: simple points are removed in
/// increasing distance-transform order, curve end points are kept. The result
/// is thin (no 2x2 block) and homotopic to the mask under (8,4) connectivity.
Skeleton skeletonize(const ShapeImage& shape);

/// Minimal 8-adjacency used for skeleton topology: orthogonal neighbors
/// always, diagonal neighbors only when the two shared orthogonal pixels are
/// off. Keeps diagonal staircases from reading as spurious cycles.
std::vector<Point> skeleton_neighbors(const Skeleton& skeleton, const Point& p);

}  // namespace hbop
