#pragma once

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <string>

#include "stereoct/image.hpp"
#include "stereoct/rng.hpp"

namespace stereoct::test {

inline GrayImage random_image(int width, int height, uint64_t seed, double lo = 0.0,
                              double hi = 1.0) {
  GrayImage img(width, height);
  SplitMix64 rng(seed);
  for (double& v : img.data) v = rng.uniform(lo, hi);
  return img;
}

// Random integer-valued ground truth in [0, dmax]; a sprinkle of pixels is
// marked invalid when holes > 0 (roughly one in `holes`).
inline DisparityMap random_gt(int width, int height, int dmax, uint64_t seed, int holes = 0) {
  DisparityMap gt(width, height, 0.0, true);
  SplitMix64 rng(seed);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      gt.at(x, y) = static_cast<double>(rng.next() % (dmax + 1));
      if (holes > 0 && rng.next() % holes == 0) gt.set_valid(x, y, false);
    }
  return gt;
}

// Fresh scratch directory under the system temp root, removed on destruction.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("stereoct_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace stereoct::test
