#include "hbop/skeleton.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "hbop/errors.hpp"

namespace hbop {

int Skeleton::pixel_count() const {
  int n = 0;
  for (auto p : pixels) n += (p != 0);
  return n;
}

std::vector<Point> Skeleton::pixel_list() const {
  std::vector<Point> out;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (at(x, y)) out.push_back({x, y});
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1-D squared distance transform of a sampled function (lower envelope of
// parabolas), after Felzenszwalb & Huttenlocher.
void dt_1d(const std::vector<double>& f, std::vector<double>& d, int n,
           std::vector<int>& v, std::vector<double>& z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s;
    for (;;) {
      s = ((f[q] + q * double(q)) - (f[v[k]] + v[k] * double(v[k]))) /
          (2.0 * q - 2.0 * v[k]);
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    d[q] = (q - v[k]) * double(q - v[k]) + f[v[k]];
  }
}

}  // namespace

std::vector<double> squared_distance_transform(int width, int height,
                                               const std::vector<std::uint8_t>& mask) {
  // Computed on a grid padded with one background ring: pixels outside the
  // image count as background. A large finite sentinel keeps the parabola
  // intersections well defined.
  constexpr double kFar = 1e20;
  const int pw = width + 2, ph = height + 2;
  std::vector<double> dist(static_cast<std::size_t>(pw) * ph, 0.0);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      dist[static_cast<std::size_t>(y + 1) * pw + (x + 1)] =
          mask[static_cast<std::size_t>(y) * width + x] ? kFar : 0.0;

  const int n = std::max(pw, ph);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);

  for (int x = 0; x < pw; ++x) {
    for (int y = 0; y < ph; ++y) f[y] = dist[static_cast<std::size_t>(y) * pw + x];
    dt_1d(f, d, ph, v, z);
    for (int y = 0; y < ph; ++y) dist[static_cast<std::size_t>(y) * pw + x] = d[y];
  }
  for (int y = 0; y < ph; ++y) {
    for (int x = 0; x < pw; ++x) f[x] = dist[static_cast<std::size_t>(y) * pw + x];
    dt_1d(f, d, pw, v, z);
    for (int x = 0; x < pw; ++x) dist[static_cast<std::size_t>(y) * pw + x] = d[x];
  }

  std::vector<double> out(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      out[static_cast<std::size_t>(y) * width + x] =
          dist[static_cast<std::size_t>(y + 1) * pw + (x + 1)];
  return out;
}

namespace {

// Neighborhood bit layout, clockwise from east:
//   bit 0:(+1,0) 1:(+1,+1) 2:(0,+1) 3:(-1,+1) 4:(-1,0) 5:(-1,-1) 6:(0,-1) 7:(+1,-1)
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

// (8,4) simple-point test over the 8-neighborhood bitmask: exactly one
// 8-connected foreground component in the ring and exactly one 4-connected
// background component touching the center 4-neighborhood. Ring adjacency,
// derived from slot geometry: consecutive slots always touch; two orthogonal
// slots two apart (e.g. east and south) are also 8-adjacent to each other.
bool simple_from_mask(unsigned m) {
  if (m == 0) return false;  // isolated pixel

  auto fg_adjacent = [](int a, int b) {
    int d = (b - a + 8) % 8;
    if (d == 1 || d == 7) return true;
    return (d == 2 || d == 6) && a % 2 == 0 && b % 2 == 0;
  };
  int fg_components = 0;
  unsigned seen = 0;
  for (int start = 0; start < 8; ++start) {
    if (!((m >> start) & 1u) || ((seen >> start) & 1u)) continue;
    ++fg_components;
    unsigned stack = 1u << start;
    seen |= 1u << start;
    while (stack) {
      int a = __builtin_ctz(stack);
      stack &= stack - 1;
      for (int b = 0; b < 8; ++b)
        if (((m >> b) & 1u) && !((seen >> b) & 1u) && fg_adjacent(a, b)) {
          seen |= 1u << b;
          stack |= 1u << b;
        }
    }
  }
  if (fg_components != 1) return false;

  // Background components under ring 4-adjacency (consecutive slots only);
  // only components containing an orthogonal slot are 4-adjacent to the
  // center. Exactly one such component must exist.
  int bg_components = 0;
  unsigned bg = ~m & 0xffu;
  unsigned bg_seen = 0;
  for (int start = 0; start < 8; ++start) {
    if (!((bg >> start) & 1u) || ((bg_seen >> start) & 1u)) continue;
    bool touches_center = false;
    unsigned stack = 1u << start;
    bg_seen |= 1u << start;
    while (stack) {
      int a = __builtin_ctz(stack);
      stack &= stack - 1;
      if (a % 2 == 0) touches_center = true;
      for (int d : {1, 7}) {
        int b = (a + d) % 8;
        if (((bg >> b) & 1u) && !((bg_seen >> b) & 1u)) {
          bg_seen |= 1u << b;
          stack |= 1u << b;
        }
      }
    }
    if (touches_center) ++bg_components;
  }
  return bg_components == 1;
}

const std::array<bool, 256>& simple_table() {
  static const std::array<bool, 256> table = [] {
    std::array<bool, 256> t{};
    for (unsigned m = 0; m < 256; ++m) t[m] = simple_from_mask(m);
    return t;
  }();
  return table;
}

unsigned neighborhood_mask(const std::vector<std::uint8_t>& pix, int width,
                           int height, int x, int y) {
  unsigned m = 0;
  for (int i = 0; i < 8; ++i) {
    int nx = x + kDx[i], ny = y + kDy[i];
    if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
    if (pix[static_cast<std::size_t>(ny) * width + nx]) m |= 1u << i;
  }
  return m;
}

int neighbor_count(unsigned m) {
#if defined(__GNUC__)
  return __builtin_popcount(m);
#else
  int n = 0;
  while (m) { n += m & 1u; m >>= 1; }
  return n;
#endif
}

}  // namespace

Skeleton skeletonize(const ShapeImage& shape) {
  const int w = shape.width, h = shape.height;
  Skeleton skel;
  skel.width = w;
  skel.height = h;
  skel.pixels = shape.mask;
  skel.radius.assign(static_cast<std::size_t>(w) * h, 0.0);
  skel.boundary_contribution.assign(static_cast<std::size_t>(w) * h, 0.0);

  const std::vector<double> dist2 = squared_distance_transform(w, h, shape.mask);

  // Min-heap keyed by (squared distance, scanline order).
  using Entry = std::tuple<double, int, int>;  // dist2, y, x
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (shape.at(x, y)) queue.emplace(dist2[shape.index(x, y)], y, x);

  auto& simple = simple_table();
  while (!queue.empty()) {
    auto [d2, y, x] = queue.top();
    queue.pop();
    std::size_t idx = skel.index(x, y);
    if (!skel.pixels[idx]) continue;
    unsigned m = neighborhood_mask(skel.pixels, w, h, x, y);
    if (neighbor_count(m) == 1) continue;  // curve end point, keep
    if (!simple[m]) continue;
    skel.pixels[idx] = 0;
    for (int i = 0; i < 8; ++i) {
      int nx = x + kDx[i], ny = y + kDy[i];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      std::size_t nidx = skel.index(nx, ny);
      if (skel.pixels[nidx]) queue.emplace(dist2[nidx], ny, nx);
    }
  }

  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (skel.at(x, y)) skel.radius[skel.index(x, y)] = std::sqrt(dist2[skel.index(x, y)]);

  // Assign each boundary pixel to its nearest skeleton pixel; ties resolve to
  // the first skeleton pixel in scanline order.
  const MaskStats stats = compute_mask_stats(shape);
  skel.total_boundary = static_cast<int>(stats.boundary.size());
  const std::vector<Point> skeleton_pixels = skel.pixel_list();
  for (const Point& b : stats.boundary) {
    double best = kInf;
    std::size_t best_idx = 0;
    for (const Point& s : skeleton_pixels) {
      const double dx = b.x - s.x, dy = b.y - s.y;
      const double d = dx * dx + dy * dy;
      if (d < best) {
        best = d;
        best_idx = skel.index(s.x, s.y);
      }
    }
    skel.boundary_contribution[best_idx] += 1.0;
  }
  return skel;
}

std::vector<Point> skeleton_neighbors(const Skeleton& skeleton, const Point& p) {
  std::vector<Point> out;
  for (int i = 0; i < 8; ++i) {
    int nx = p.x + kDx[i], ny = p.y + kDy[i];
    if (!skeleton.at(nx, ny)) continue;
    if (i % 2 == 1) {
      // diagonal: skip when an orthogonal 2-step path already connects them
      if (skeleton.at(p.x + kDx[i], p.y) || skeleton.at(p.x, p.y + kDy[i])) continue;
    }
    out.push_back({nx, ny});
  }
  std::sort(out.begin(), out.end(), scanline_less);
  return out;
}

}  // namespace hbop
