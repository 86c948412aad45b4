#include "stereoct/census.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "stereoct/parallel.hpp"

namespace stereoct {

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void validate_scales(const std::vector<int>& scales) {
  require(!scales.empty(), "scales must be non-empty");
  for (int k : scales) require(k >= 3 && k % 2 == 1, "window sizes must be odd and >= 3");
}

CensusField census_transform(const GrayImage& img, const std::vector<int>& scales) {
  validate_scales(scales);
  CensusField field;
  field.width = img.width;
  field.height = img.height;
  field.scales = scales;
  field.bits.resize(scales.size());

  for (size_t s = 0; s < scales.size(); ++s) {
    const int k = scales[s];
    const int r = k / 2;
    const int wpp = CensusField::words_per_pixel(k);
    auto& words = field.bits[s];
    words.assign(static_cast<size_t>(img.width) * img.height * wpp, 0);

    parallel_for(r, img.height - r, [&](int y) {
      for (int x = r; x < img.width - r; ++x) {
        const double center = img.at(x, y);
        uint64_t* dst = words.data() + (static_cast<size_t>(y) * img.width + x) * wpp;
        int bit = 0;
        for (int dy = -r; dy <= r; ++dy) {
          const double* row = img.data.data() + static_cast<size_t>(y + dy) * img.width + (x - r);
          for (int dx = -r; dx <= r; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (row[dx + r] >= center) dst[bit >> 6] |= uint64_t{1} << (bit & 63);
            ++bit;
          }
        }
      }
    });
  }
  return field;
}

SoftCensusField soft_census_transform(const GrayImage& img, const std::vector<int>& scales,
                                      double steepness) {
  validate_scales(scales);
  require(steepness > 0.0, "steepness must be positive");
  SoftCensusField field;
  field.width = img.width;
  field.height = img.height;
  field.scales = scales;
  field.steepness = steepness;
  field.bits.resize(scales.size());

  for (size_t s = 0; s < scales.size(); ++s) {
    const int k = scales[s];
    const int r = k / 2;
    const int bpp = k * k - 1;
    auto& vals = field.bits[s];
    vals.assign(static_cast<size_t>(img.width) * img.height * bpp, 0.0);

    parallel_for(r, img.height - r, [&](int y) {
      for (int x = r; x < img.width - r; ++x) {
        const double center = img.at(x, y);
        double* dst = vals.data() + (static_cast<size_t>(y) * img.width + x) * bpp;
        int bit = 0;
        for (int dy = -r; dy <= r; ++dy) {
          const double* row = img.data.data() + static_cast<size_t>(y + dy) * img.width + (x - r);
          for (int dx = -r; dx <= r; ++dx) {
            if (dx == 0 && dy == 0) continue;
            dst[bit++] = logistic(steepness * (row[dx + r] - center));
          }
        }
      }
    });
  }
  return field;
}

int hamming(std::span<const uint64_t> a, std::span<const uint64_t> b) {
  require(a.size() == b.size(), "hamming: length mismatch");
  int count = 0;
  for (size_t i = 0; i < a.size(); ++i) count += std::popcount(a[i] ^ b[i]);
  return count;
}

double normalized_cost(std::span<const uint64_t> a, std::span<const uint64_t> b, int scale) {
  return static_cast<double>(hamming(a, b)) / (static_cast<double>(scale) * scale);
}

double soft_hamming(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "soft_hamming: length mismatch");
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

void dump_census_hex(const CensusField& field, int scale_idx, std::ostream& os) {
  const int wpp = CensusField::words_per_pixel(field.scales[scale_idx]);
  for (int y = 0; y < field.height; ++y) {
    for (int x = 0; x < field.width; ++x) {
      const auto desc = field.descriptor(x, y, scale_idx);
      for (int w = wpp - 1; w >= 0; --w)
        os << std::hex << std::setw(16) << std::setfill('0') << desc[w];
      os << '\n';
    }
  }
  os << std::dec;
}

}  // namespace stereoct
