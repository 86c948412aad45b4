#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "stereoct/image.hpp"

namespace stereoct {

/// Numerically stable logistic function 1/(1+exp(-z)).
double logistic(double z);

/// Per-pixel, per-scale packed binary descriptors.
///
/// For window size k the descriptor has k*k-1 bits (the center pixel is
/// excluded): bit i corresponds to the i-th neighbor in a row-major scan of
/// the window that skips the center, and equals 1 iff I(v) >= I(u). Bits are
/// packed 64 per word, LSB first; trailing bits of the last word are zero.
/// A pixel is invalid at a scale when the window exits the image.
struct CensusField {
  int width = 0;
  int height = 0;
  std::vector<int> scales;
  // bits[s] holds words_per_pixel(s) words per pixel, row-major.
  std::vector<std::vector<uint64_t>> bits;

  static int bits_per_pixel(int scale) { return scale * scale - 1; }
  static int words_per_pixel(int scale) { return (bits_per_pixel(scale) + 63) / 64; }

  bool valid_at(int x, int y, int scale_idx) const {
    const int r = scales[scale_idx] / 2;
    return x >= r && x < width - r && y >= r && y < height - r;
  }

  std::span<const uint64_t> descriptor(int x, int y, int scale_idx) const {
    const int wpp = words_per_pixel(scales[scale_idx]);
    return {bits[scale_idx].data() + (static_cast<size_t>(y) * width + x) * wpp,
            static_cast<size_t>(wpp)};
  }
};

/// Same layout as CensusField but each bit is a real in (0,1):
/// soft bit(u,v) = logistic(C * (I(v) - I(u))).
struct SoftCensusField {
  int width = 0;
  int height = 0;
  std::vector<int> scales;
  double steepness = 0.0;
  std::vector<std::vector<double>> bits;  // bits[s]: (k*k-1) doubles per pixel

  bool valid_at(int x, int y, int scale_idx) const {
    const int r = scales[scale_idx] / 2;
    return x >= r && x < width - r && y >= r && y < height - r;
  }

  std::span<const double> descriptor(int x, int y, int scale_idx) const {
    const int bpp = scales[scale_idx] * scales[scale_idx] - 1;
    return {bits[scale_idx].data() + (static_cast<size_t>(y) * width + x) * bpp,
            static_cast<size_t>(bpp)};
  }
};

/// Hard multi-scale census transform. Every scale must be odd and >= 3.
/// Comparisons use >=, so ties yield bit 1; descriptors are invariant under
/// any strictly increasing intensity remap.
CensusField census_transform(const GrayImage& img, const std::vector<int>& scales);

/// Differentiable census relaxation; steepness C > 0. Equal intensities give
/// soft bit 0.5, and soft bits converge to hard bits as C grows wherever
/// I(v) != I(u).
SoftCensusField soft_census_transform(const GrayImage& img, const std::vector<int>& scales,
                                      double steepness);

/// Number of differing bit positions between two equal-length packed vectors.
int hamming(std::span<const uint64_t> a, std::span<const uint64_t> b);

/// Hamming distance divided by k*k, the number of pixels of the window.
/// The descriptor itself carries k*k-1 bits; the divisor follows the window
/// size, so the maximum cost is (k*k-1)/(k*k).
double normalized_cost(std::span<const uint64_t> a, std::span<const uint64_t> b, int scale);

/// Sum of squared differences between soft bit vectors; coincides with
/// hamming() when all entries are exactly 0 or 1.
double soft_hamming(std::span<const double> a, std::span<const double> b);

void validate_scales(const std::vector<int>& scales);

/// Debug dump: one pixel per line, descriptor words as zero-padded hex,
/// most significant word first.
void dump_census_hex(const CensusField& field, int scale_idx, std::ostream& os);

}  // namespace stereoct
