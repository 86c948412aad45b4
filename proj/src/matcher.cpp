#include "stereoct/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stereoct/boxfilter.hpp"
#include "stereoct/parallel.hpp"

namespace stereoct {

CostVolume sgm_direction_pass(const CostVolume& vol, const SgmParams& params, int dx, int dy) {
  require(vol.num_scales == 1, "sgm expects a scale-reduced volume (K == 1)");
  params.validate();
  require((dx != 0 || dy != 0) && std::abs(dx) <= 1 && std::abs(dy) <= 1, "bad direction");

  CostVolume out = vol;
  const int W = vol.width, H = vol.height, L = vol.max_disp;

  const int y0 = dy > 0 ? 0 : H - 1;
  const int y_step = dy > 0 ? 1 : -1;
  const int x0 = dx > 0 ? 0 : W - 1;
  const int x_step = dx > 0 ? 1 : -1;

  for (int yi = 0; yi < H; ++yi) {
    const int y = y0 + yi * y_step;
    const int py = y - dy;
    for (int xi = 0; xi < W; ++xi) {
      const int x = x0 + xi * x_step;
      const int px = x - dx;
      if (px < 0 || px >= W || py < 0 || py >= H) continue;  // path start: keep unary cost

      const double* prev = out.cost.data() + out.entry_index(px, py, 0);
      double prev_min = prev[0];
      for (int d = 1; d < L; ++d) prev_min = std::min(prev_min, prev[d]);

      double* cur = out.cost.data() + out.entry_index(x, y, 0);
      const double* unary = vol.cost.data() + vol.entry_index(x, y, 0);
      for (int d = 0; d < L; ++d) {
        double best = prev[d];
        if (d > 0) best = std::min(best, prev[d - 1] + params.p1);
        if (d + 1 < L) best = std::min(best, prev[d + 1] + params.p1);
        best = std::min(best, prev_min + params.p2);
        cur[d] = unary[d] + best - prev_min;
      }
    }
  }
  return out;
}

CostVolume sgm_aggregate(const CostVolume& vol, const SgmParams& params) {
  require(vol.num_scales == 1, "sgm expects a scale-reduced volume (K == 1)");
  params.validate();

  static const int dirs8[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1},
                                  {1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
  CostVolume acc = vol;
  std::fill(acc.cost.begin(), acc.cost.end(), 0.0);
  for (int i = 0; i < params.directions; ++i) {
    const CostVolume pass = sgm_direction_pass(vol, params, dirs8[i][0], dirs8[i][1]);
    for (size_t e = 0; e < acc.cost.size(); ++e) acc.cost[e] += pass.cost[e];
  }
  return acc;
}

DisparityMap wta(const CostVolume& vol) {
  require(vol.num_scales == 1, "wta expects a scale-reduced volume (K == 1)");
  DisparityMap disp(vol.width, vol.height, 0.0, false);
  parallel_for(0, vol.height, [&](int y) {
    for (int x = 0; x < vol.width; ++x) {
      int best_d = -1;
      double best = std::numeric_limits<double>::infinity();
      const size_t base = vol.entry_index(x, y, 0);
      for (int d = 0; d < vol.max_disp; ++d) {
        if (!vol.valid[base + d]) continue;
        if (vol.cost[base + d] < best) {  // strict: ties keep the smaller d
          best = vol.cost[base + d];
          best_d = d;
        }
      }
      if (best_d >= 0) {
        disp.at(x, y) = best_d;
        disp.set_valid(x, y, true);
      }
    }
  });
  return disp;
}

DisparityMap soft_expectation(const std::vector<double>& agg_cost, int width, int height,
                              int max_disp, double temperature) {
  DisparityMap disp(width, height, 0.0, true);
  const double inv_tau = 1.0 / temperature;
  parallel_for(0, height, [&](int y) {
    for (int x = 0; x < width; ++x) {
      const double* c = agg_cost.data() + (static_cast<size_t>(y) * width + x) * max_disp;
      double cmin = c[0];
      for (int d = 1; d < max_disp; ++d) cmin = std::min(cmin, c[d]);
      double wsum = 0.0, dsum = 0.0;
      for (int d = 0; d < max_disp; ++d) {
        const double w = std::exp((cmin - c[d]) * inv_tau);
        wsum += w;
        dsum += d * w;
      }
      disp.at(x, y) = dsum / wsum;
    }
  });
  return disp;
}

DisparityMap soft_argmin(const CostVolume& vol, const SoftMatchParams& params) {
  require(vol.num_scales == 1, "soft_argmin expects a scale-reduced volume (K == 1)");
  params.validate();
  const std::vector<double> agg =
      box_mean_channels(vol.cost, vol.width, vol.height, vol.max_disp, params.agg_window);
  return soft_expectation(agg, vol.width, vol.height, vol.max_disp, params.temperature);
}

Mask occlusion_mask(const DisparityMap& gt) {
  Mask occl(gt.width, gt.height, false);
  std::vector<double> best(gt.width);
  for (int y = 0; y < gt.height; ++y) {
    std::fill(best.begin(), best.end(), -1.0);
    // Pass 1: largest disparity claiming each right column wins.
    for (int x = 0; x < gt.width; ++x) {
      if (!gt.valid_at(x, y)) continue;
      const long xr = std::lround(x - gt.at(x, y));
      if (xr < 0 || xr >= gt.width) continue;
      best[xr] = std::max(best[xr], gt.at(x, y));
    }
    // Pass 2: out-of-frame correspondences and strictly beaten pixels.
    for (int x = 0; x < gt.width; ++x) {
      if (!gt.valid_at(x, y)) continue;
      const long xr = std::lround(x - gt.at(x, y));
      if (xr < 0 || xr >= gt.width) {
        occl.set(x, y, true);
      } else if (best[xr] > gt.at(x, y)) {
        occl.set(x, y, true);
      }
    }
  }
  return occl;
}

}  // namespace stereoct
