#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace stereoct {

/// Grayscale image, row-major intensities in [0,1].
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  GrayImage() = default;
  GrayImage(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return data.size(); }
  bool same_shape(const GrayImage& o) const { return width == o.width && height == o.height; }
};

/// Real-valued disparity map with a validity mask. Invalid pixels are
/// excluded from every metric and loss.
struct DisparityMap {
  int width = 0;
  int height = 0;
  std::vector<double> data;
  std::vector<uint8_t> valid;

  DisparityMap() = default;
  DisparityMap(int w, int h, double fill = 0.0, bool valid_fill = true)
      : width(w), height(h),
        data(static_cast<size_t>(w) * h, fill),
        valid(static_cast<size_t>(w) * h, valid_fill ? 1 : 0) {}

  double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  bool valid_at(int x, int y) const { return valid[static_cast<size_t>(y) * width + x] != 0; }
  void set_valid(int x, int y, bool v) { valid[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
  size_t size() const { return data.size(); }
};

/// Boolean pixel mask (left-image coordinates unless stated otherwise).
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  Mask() = default;
  Mask(int w, int h, bool fill = false)
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill ? 1 : 0) {}

  bool at(int x, int y) const { return data[static_cast<size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { data[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
  size_t count() const {
    size_t n = 0;
    for (uint8_t b : data) n += (b != 0);
    return n;
  }
};

/// Axis-aligned pixel rectangle, [x, x+w) x [y, y+h).
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool contains(int px, int py) const {
    return px >= x && px < x + w && py >= y && py < y + h;
  }
  // Horizontal containment for real-valued correspondences (closed pixel-center range).
  bool contains_x(double px) const { return px >= x && px <= x + w - 1.0; }
  bool inside(int img_w, int img_h) const {
    return x >= 0 && y >= 0 && w > 0 && h > 0 && x + w <= img_w && y + h <= img_h;
  }
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace stereoct
