#pragma once

#include <string>
#include <vector>

#include "stereoct/census.hpp"
#include "stereoct/image.hpp"

namespace stereoct {

/// 4-D matching cost tensor, H x W x max_disp x K, indexed in left-image
/// coordinates with disparity candidates d in {0..max_disp-1} and K scale
/// channels (innermost). Costs of valid entries lie in [0,1]; an entry is
/// invalid when the window at the largest scale exits the frame on either
/// side, and then carries cost exactly 1.0 at every scale so downstream
/// soft operations stay total.
struct CostVolume {
  int height = 0;
  int width = 0;
  int max_disp = 0;
  int num_scales = 1;
  std::vector<int> scales;       // empty once reduced to K=1
  std::vector<double> cost;      // ((y*W + x)*max_disp + d)*K + k
  std::vector<uint8_t> valid;    // (y*W + x)*max_disp + d

  size_t entry_index(int x, int y, int d) const {
    return (static_cast<size_t>(y) * width + x) * max_disp + d;
  }
  double at(int x, int y, int d, int k = 0) const {
    return cost[entry_index(x, y, d) * num_scales + k];
  }
  double& at(int x, int y, int d, int k = 0) {
    return cost[entry_index(x, y, d) * num_scales + k];
  }
  bool valid_at(int x, int y, int d) const { return valid[entry_index(x, y, d)] != 0; }
};

/// Multi-scale census cost volume: cost[x,y,d,k] = hamming / k^2 between the
/// left descriptor at (x,y) and the right descriptor at (x-d,y).
CostVolume build_census_volume(const GrayImage& left, const GrayImage& right,
                               const std::vector<int>& scales, int max_disp);

/// Differentiable variant using soft census bits and soft_hamming / k^2.
CostVolume build_soft_census_volume(const GrayImage& left, const GrayImage& right,
                                    const std::vector<int>& scales, int max_disp,
                                    double steepness);

/// Multi-scale SAD baseline: cost[x,y,d,k] = mean over the k x k window of
/// |I_L - I_R(shifted by d)|.
CostVolume build_sad_volume(const GrayImage& left, const GrayImage& right,
                            const std::vector<int>& scales, int max_disp);

/// Mean over the scale axis; validity mask unchanged. Identity for K=1.
CostVolume reduce_scales(const CostVolume& vol);

/// Fused builders producing the scale-reduced K=1 volume directly, without
/// materializing the K-channel tensor. Entrywise equal to
/// reduce_scales(build_*_volume(...)).
CostVolume build_census_volume_reduced(const GrayImage& left, const GrayImage& right,
                                       const std::vector<int>& scales, int max_disp);
CostVolume build_soft_census_volume_reduced(const GrayImage& left, const GrayImage& right,
                                            const std::vector<int>& scales, int max_disp,
                                            double steepness);
CostVolume build_sad_volume_reduced(const GrayImage& left, const GrayImage& right,
                                    const std::vector<int>& scales, int max_disp);

/// Raw dump for cross-implementation diffing: 32-byte header (magic
/// "STCVOL01", uint32 H, W, max_disp, K, 8 reserved zero bytes), then
/// little-endian float32 costs in (y, x, d, k) order.
void dump_cost_volume(const CostVolume& vol, const std::string& path);

}  // namespace stereoct
