#include "hbop/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hbop/errors.hpp"

#ifdef HBOP_HAVE_PNG
#include <png.h>
#include <cstdio>
#endif

namespace hbop {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnreadableFile: return "UnreadableFile";
    case ErrorCode::BadFormat: return "BadFormat";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::MultipleComponents: return "MultipleComponents";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::NotInterior: return "NotInterior";
    case ErrorCode::DegreeTwoInTree: return "DegreeTwoInTree";
    case ErrorCode::Irreducible: return "Irreducible";
    case ErrorCode::MismatchedD: return "MismatchedD";
    case ErrorCode::ZeroSelfKernel: return "ZeroSelfKernel";
    case ErrorCode::EmptyBag: return "EmptyBag";
    case ErrorCode::DegenerateModel: return "DegenerateModel";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::BadArgument: return "BadArgument";
  }
  return "UnknownError";
}

int ShapeImage::foreground_count() const {
  int n = 0;
  for (auto p : mask) n += (p != 0);
  return n;
}

int count_foreground_components4(int width, int height,
                                 const std::vector<std::uint8_t>& mask) {
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<int> stack;
  int components = 0;
  for (int start = 0; start < width * height; ++start) {
    if (!mask[start] || seen[start]) continue;
    ++components;
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      int p = stack.back();
      stack.pop_back();
      int x = p % width, y = p / width;
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || ny[k] < 0 || nx[k] >= width || ny[k] >= height) continue;
        int q = ny[k] * width + nx[k];
        if (mask[q] && !seen[q]) {
          seen[q] = 1;
          stack.push_back(q);
        }
      }
    }
  }
  return components;
}

int count_holes(const ShapeImage& shape) {
  // Background 4-components that do not touch the border are holes.
  const int w = shape.width, h = shape.height;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<int> stack;
  int holes = 0;
  auto flood = [&](int start, bool& touches_border) {
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      int p = stack.back();
      stack.pop_back();
      int x = p % w, y = p / w;
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) touches_border = true;
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
        int q = ny[k] * w + nx[k];
        if (!shape.mask[q] && !seen[q]) {
          seen[q] = 1;
          stack.push_back(q);
        }
      }
    }
  };
  for (int p = 0; p < w * h; ++p) {
    if (shape.mask[p] || seen[p]) continue;
    bool touches_border = false;
    flood(p, touches_border);
    if (!touches_border) ++holes;
  }
  return holes;
}

ShapeImage make_shape(int width, int height, std::vector<std::uint8_t> mask,
                      std::string id, std::string class_label) {
  if (width < 3 || height < 3)
    fail(ErrorCode::BadArgument, "shape images must be at least 3x3");
  if (mask.size() != static_cast<std::size_t>(width) * height)
    fail(ErrorCode::BadArgument, "mask size does not match dimensions");
  for (auto& p : mask) p = (p != 0);

  ShapeImage shape;
  shape.width = width;
  shape.height = height;
  shape.mask = std::move(mask);
  shape.id = std::move(id);
  shape.class_label = std::move(class_label);

  if (shape.foreground_count() == 0)
    fail(ErrorCode::EmptyMask, "mask has no foreground pixels: " + shape.id);
  int components = count_foreground_components4(width, height, shape.mask);
  if (components != 1)
    fail(ErrorCode::MultipleComponents,
         "mask has " + std::to_string(components) +
             " foreground components: " + shape.id);
  return shape;
}

namespace {

// Skips whitespace and '#' comments in plain PNM headers.
int next_pnm_token(std::istream& in) {
  for (;;) {
    int c = in.get();
    if (c == EOF) return EOF;
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
      continue;
    }
    if (!std::isspace(c)) return c;
  }
}

int read_pnm_int(std::istream& in) {
  int c = next_pnm_token(in);
  if (c == EOF || !std::isdigit(c))
    fail(ErrorCode::BadFormat, "malformed PBM header");
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    c = in.get();
  }
  return value;
}

ShapeImage load_pbm(std::ifstream& in, const std::string& file_path, char variant) {
  int width = read_pnm_int(in);
  int height = read_pnm_int(in);
  if (width <= 0 || height <= 0)
    fail(ErrorCode::BadFormat, "bad PBM dimensions in " + file_path);
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(width) * height, 0);
  if (variant == '1') {
    for (std::size_t i = 0; i < mask.size(); ++i) {
      int c = next_pnm_token(in);
      if (c != '0' && c != '1')
        fail(ErrorCode::BadFormat, "bad P1 payload in " + file_path);
      mask[i] = static_cast<std::uint8_t>(c == '1');
    }
  } else {  // P4: packed rows, MSB first, 1 = black = shape
    const int row_bytes = (width + 7) / 8;
    std::vector<char> row(row_bytes);
    for (int y = 0; y < height; ++y) {
      if (!in.read(row.data(), row_bytes))
        fail(ErrorCode::BadFormat, "truncated P4 payload in " + file_path);
      for (int x = 0; x < width; ++x) {
        int bit = (static_cast<unsigned char>(row[x / 8]) >> (7 - x % 8)) & 1;
        mask[static_cast<std::size_t>(y) * width + x] = static_cast<std::uint8_t>(bit);
      }
    }
  }
  return make_shape(width, height, std::move(mask));
}

#ifdef HBOP_HAVE_PNG
ShapeImage load_png(const std::string& file_path) {
  std::FILE* fp = std::fopen(file_path.c_str(), "rb");
  if (!fp) fail(ErrorCode::UnreadableFile, "cannot open " + file_path);
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    fail(ErrorCode::UnreadableFile, "libpng init failed for " + file_path);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    fail(ErrorCode::BadFormat, "libpng failed to decode " + file_path);
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
      color == PNG_COLOR_TYPE_PALETTE)
    png_set_rgb_to_gray(png, 1, -1.0, -1.0);
  png_read_update_info(png, info);
  std::size_t row_bytes = png_get_rowbytes(png, info);
  std::vector<std::uint8_t> pixels(row_bytes * h);
  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = pixels.data() + y * row_bytes;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);

  std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 0);
  for (png_uint_32 y = 0; y < h; ++y)
    for (png_uint_32 x = 0; x < w; ++x)
      mask[static_cast<std::size_t>(y) * w + x] =
          static_cast<std::uint8_t>(pixels[y * row_bytes + x] < 128);
  return make_shape(static_cast<int>(w), static_cast<int>(h), std::move(mask));
}
#endif

}  // namespace

ShapeImage load_mask(const std::string& file_path) {
  std::ifstream in(file_path, std::ios::binary);
  if (!in) fail(ErrorCode::UnreadableFile, "cannot open " + file_path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in) fail(ErrorCode::BadFormat, "file too short: " + file_path);
  if (magic[0] == 'P' && (magic[1] == '1' || magic[1] == '4')) {
    ShapeImage shape = load_pbm(in, file_path, magic[1]);
    shape.id = file_path;
    return shape;
  }
  if (magic[0] == '\x89' && magic[1] == 'P') {
#ifdef HBOP_HAVE_PNG
    in.close();
    ShapeImage shape = load_png(file_path);
    shape.id = file_path;
    return shape;
#else
    fail(ErrorCode::BadFormat, "PNG support not compiled in: " + file_path);
#endif
  }
  fail(ErrorCode::BadFormat, "unsupported bitmap format: " + file_path);
}

void save_pbm(const ShapeImage& shape, const std::string& file_path) {
  std::ofstream out(file_path);
  if (!out) fail(ErrorCode::UnreadableFile, "cannot write " + file_path);
  out << "P1\n" << shape.width << " " << shape.height << "\n";
  for (int y = 0; y < shape.height; ++y) {
    for (int x = 0; x < shape.width; ++x) {
      out << (shape.at(x, y) ? '1' : '0');
      out << (x + 1 == shape.width ? '\n' : ' ');
    }
  }
}

MaskStats compute_mask_stats(const ShapeImage& shape) {
  MaskStats stats;
  double sx = 0.0, sy = 0.0;
  int n = 0;
  for (int y = 0; y < shape.height; ++y)
    for (int x = 0; x < shape.width; ++x)
      if (shape.at(x, y)) {
        sx += x;
        sy += y;
        ++n;
      }
  stats.centroid_x = sx / n;
  stats.centroid_y = sy / n;

  double mu20 = 0.0, mu02 = 0.0, mu11 = 0.0;
  for (int y = 0; y < shape.height; ++y)
    for (int x = 0; x < shape.width; ++x)
      if (shape.at(x, y)) {
        const double dx = x - stats.centroid_x;
        const double dy = y - stats.centroid_y;
        mu20 += dx * dx;
        mu02 += dy * dy;
        mu11 += dx * dy;
        stats.max_centroid_dist =
            std::max(stats.max_centroid_dist, std::sqrt(dx * dx + dy * dy));
      }
  stats.principal_axis = fold_axis_angle(0.5 * std::atan2(2.0 * mu11, mu20 - mu02));

  for (int y = 0; y < shape.height; ++y)
    for (int x = 0; x < shape.width; ++x) {
      if (!shape.at(x, y)) continue;
      if (!shape.at(x - 1, y) || !shape.at(x + 1, y) || !shape.at(x, y - 1) ||
          !shape.at(x, y + 1))
        stats.boundary.push_back({x, y});
    }
  return stats;
}

}  // namespace hbop
