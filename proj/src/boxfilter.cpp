#include "stereoct/boxfilter.hpp"

#include <algorithm>

#include "stereoct/image.hpp"
#include "stereoct/parallel.hpp"

namespace stereoct {

namespace {

// Separable two-pass sum over clipped windows. Sums are recomputed per
// output (no sliding accumulator) so results are independent of traversal
// order and bit-reproducible for any worker count.
std::vector<double> box_sum_impl(const std::vector<double>& in, int width, int height,
                                 int channels, int window) {
  require(window >= 1 && window % 2 == 1, "box window must be odd and >= 1");
  if (window == 1) return in;
  const int b = window / 2;
  std::vector<double> tmp(in.size());
  std::vector<double> out(in.size());

  parallel_for(0, height, [&](int y) {
    const double* src = in.data() + static_cast<size_t>(y) * width * channels;
    double* dst = tmp.data() + static_cast<size_t>(y) * width * channels;
    for (int x = 0; x < width; ++x) {
      const int lo = std::max(0, x - b), hi = std::min(width - 1, x + b);
      for (int c = 0; c < channels; ++c) {
        double s = 0.0;
        for (int u = lo; u <= hi; ++u) s += src[static_cast<size_t>(u) * channels + c];
        dst[static_cast<size_t>(x) * channels + c] = s;
      }
    }
  });
  parallel_for(0, height, [&](int y) {
    const int lo = std::max(0, y - b), hi = std::min(height - 1, y + b);
    double* dst = out.data() + static_cast<size_t>(y) * width * channels;
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        double s = 0.0;
        for (int v = lo; v <= hi; ++v)
          s += tmp[(static_cast<size_t>(v) * width + x) * channels + c];
        dst[static_cast<size_t>(x) * channels + c] = s;
      }
    }
  });
  return out;
}

}  // namespace

std::vector<double> box_sum_channels(const std::vector<double>& in, int width, int height,
                                     int channels, int window) {
  return box_sum_impl(in, width, height, channels, window);
}

std::vector<double> box_counts(int width, int height, int window) {
  const int b = window / 2;
  std::vector<double> counts(static_cast<size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const int ch = std::min(height - 1, y + b) - std::max(0, y - b) + 1;
    for (int x = 0; x < width; ++x) {
      const int cw = std::min(width - 1, x + b) - std::max(0, x - b) + 1;
      counts[static_cast<size_t>(y) * width + x] = static_cast<double>(cw) * ch;
    }
  }
  return counts;
}

std::vector<double> box_mean_channels(const std::vector<double>& in, int width, int height,
                                      int channels, int window) {
  if (window == 1) return in;
  std::vector<double> out = box_sum_impl(in, width, height, channels, window);
  const std::vector<double> counts = box_counts(width, height, window);
  parallel_for(0, height, [&](int y) {
    for (int x = 0; x < width; ++x) {
      const double inv = 1.0 / counts[static_cast<size_t>(y) * width + x];
      double* dst = out.data() + (static_cast<size_t>(y) * width + x) * channels;
      for (int c = 0; c < channels; ++c) dst[c] *= inv;
    }
  });
  return out;
}

}  // namespace stereoct
