#include "stereoct/cost_volume.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "stereoct/parallel.hpp"

namespace stereoct {

namespace {

CostVolume make_volume(const GrayImage& left, const GrayImage& right,
                       const std::vector<int>& scales, int max_disp, int num_scales) {
  require(left.same_shape(right), "stereo pair dimension mismatch");
  require(max_disp >= 1, "max_disp must be >= 1");
  validate_scales(scales);

  CostVolume vol;
  vol.height = left.height;
  vol.width = left.width;
  vol.max_disp = max_disp;
  vol.num_scales = num_scales;
  if (num_scales > 1) vol.scales = scales;
  vol.cost.assign(static_cast<size_t>(left.width) * left.height * max_disp * num_scales, 1.0);
  vol.valid.assign(static_cast<size_t>(left.width) * left.height * max_disp, 0);

  // Validity is decided at the largest scale: the windows centered at (x,y)
  // and (x-d,y) must both fit in the frame.
  const int r = *std::max_element(scales.begin(), scales.end()) / 2;
  parallel_for(r, left.height - r, [&](int y) {
    for (int x = r; x < left.width - r; ++x)
      for (int d = 0; d <= std::min(x - r, max_disp - 1); ++d)
        vol.valid[vol.entry_index(x, y, d)] = 1;
  });
  return vol;
}

template <typename PerScaleCost>
void fill_costs(CostVolume& vol, const std::vector<int>& scales, bool reduced,
                const PerScaleCost& cost_at) {
  const int K = static_cast<int>(scales.size());
  const int r = *std::max_element(scales.begin(), scales.end()) / 2;
  parallel_for(r, vol.height - r, [&](int y) {
    for (int x = r; x < vol.width - r; ++x) {
      const int d_hi = std::min(x - r, vol.max_disp - 1);
      for (int d = 0; d <= d_hi; ++d) {
        if (reduced) {
          double sum = 0.0;
          for (int s = 0; s < K; ++s) sum += cost_at(x, y, d, s);
          vol.cost[vol.entry_index(x, y, d)] = sum / K;
        } else {
          double* dst = vol.cost.data() + vol.entry_index(x, y, d) * K;
          for (int s = 0; s < K; ++s) dst[s] = cost_at(x, y, d, s);
        }
      }
    }
  });
}

CostVolume census_volume_impl(const GrayImage& left, const GrayImage& right,
                              const std::vector<int>& scales, int max_disp, bool reduced) {
  CostVolume vol = make_volume(left, right, scales, max_disp,
                               reduced ? 1 : static_cast<int>(scales.size()));
  const CensusField cl = census_transform(left, scales);
  const CensusField cr = census_transform(right, scales);
  fill_costs(vol, scales, reduced, [&](int x, int y, int d, int s) {
    return normalized_cost(cl.descriptor(x, y, s), cr.descriptor(x - d, y, s), scales[s]);
  });
  return vol;
}

CostVolume soft_census_volume_impl(const GrayImage& left, const GrayImage& right,
                                   const std::vector<int>& scales, int max_disp,
                                   double steepness, bool reduced) {
  CostVolume vol = make_volume(left, right, scales, max_disp,
                               reduced ? 1 : static_cast<int>(scales.size()));
  const SoftCensusField cl = soft_census_transform(left, scales, steepness);
  const SoftCensusField cr = soft_census_transform(right, scales, steepness);
  fill_costs(vol, scales, reduced, [&](int x, int y, int d, int s) {
    const double k2 = static_cast<double>(scales[s]) * scales[s];
    return soft_hamming(cl.descriptor(x, y, s), cr.descriptor(x - d, y, s)) / k2;
  });
  return vol;
}

CostVolume sad_volume_impl(const GrayImage& left, const GrayImage& right,
                           const std::vector<int>& scales, int max_disp, bool reduced) {
  CostVolume vol = make_volume(left, right, scales, max_disp,
                               reduced ? 1 : static_cast<int>(scales.size()));
  fill_costs(vol, scales, reduced, [&](int x, int y, int d, int s) {
    const int k = scales[s];
    const int r = k / 2;
    double sum = 0.0;
    for (int dy = -r; dy <= r; ++dy) {
      const double* lrow = left.data.data() + static_cast<size_t>(y + dy) * left.width;
      const double* rrow = right.data.data() + static_cast<size_t>(y + dy) * right.width;
      for (int dx = -r; dx <= r; ++dx) sum += std::abs(lrow[x + dx] - rrow[x - d + dx]);
    }
    return sum / (static_cast<double>(k) * k);
  });
  return vol;
}

}  // namespace

CostVolume build_census_volume(const GrayImage& left, const GrayImage& right,
                               const std::vector<int>& scales, int max_disp) {
  return census_volume_impl(left, right, scales, max_disp, false);
}

CostVolume build_census_volume_reduced(const GrayImage& left, const GrayImage& right,
                                       const std::vector<int>& scales, int max_disp) {
  return census_volume_impl(left, right, scales, max_disp, true);
}

CostVolume build_soft_census_volume(const GrayImage& left, const GrayImage& right,
                                    const std::vector<int>& scales, int max_disp,
                                    double steepness) {
  return soft_census_volume_impl(left, right, scales, max_disp, steepness, false);
}

CostVolume build_soft_census_volume_reduced(const GrayImage& left, const GrayImage& right,
                                            const std::vector<int>& scales, int max_disp,
                                            double steepness) {
  return soft_census_volume_impl(left, right, scales, max_disp, steepness, true);
}

CostVolume build_sad_volume(const GrayImage& left, const GrayImage& right,
                            const std::vector<int>& scales, int max_disp) {
  return sad_volume_impl(left, right, scales, max_disp, false);
}

CostVolume build_sad_volume_reduced(const GrayImage& left, const GrayImage& right,
                                    const std::vector<int>& scales, int max_disp) {
  return sad_volume_impl(left, right, scales, max_disp, true);
}

CostVolume reduce_scales(const CostVolume& vol) {
  if (vol.num_scales == 1) return vol;
  CostVolume out;
  out.height = vol.height;
  out.width = vol.width;
  out.max_disp = vol.max_disp;
  out.num_scales = 1;
  out.valid = vol.valid;
  out.cost.resize(vol.valid.size());
  const int K = vol.num_scales;
  for (size_t e = 0; e < out.cost.size(); ++e) {
    double sum = 0.0;
    for (int k = 0; k < K; ++k) sum += vol.cost[e * K + k];
    out.cost[e] = sum / K;
  }
  return out;
}

void dump_cost_volume(const CostVolume& vol, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  char header[32] = {};
  std::memcpy(header, "STCVOL01", 8);
  const uint32_t dims[4] = {static_cast<uint32_t>(vol.height), static_cast<uint32_t>(vol.width),
                            static_cast<uint32_t>(vol.max_disp),
                            static_cast<uint32_t>(vol.num_scales)};
  std::memcpy(header + 8, dims, 16);
  out.write(header, 32);
  std::vector<float> buf(vol.cost.size());
  for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(vol.cost[i]);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * 4));
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace stereoct
