#pragma once

#include <vector>

#include "stereoct/cost_volume.hpp"
#include "stereoct/image.hpp"

namespace stereoct {

/// Semi-global aggregation penalties, in normalized cost units.
struct SgmParams {
  double p1 = 0.05;   // small disparity jump (+-1)
  double p2 = 0.5;    // larger jump
  int directions = 8; // 4 or 8

  void validate() const {
    require(p1 > 0.0 && p1 <= p2, "SGM penalties require 0 < p1 <= p2");
    require(directions == 4 || directions == 8, "SGM directions must be 4 or 8");
  }
};

/// Differentiable-path parameters: spatial box aggregation followed by a
/// softmax-weighted expectation over disparity candidates.
struct SoftMatchParams {
  int agg_window = 7;
  double temperature = 0.1;

  void validate() const {
    require(agg_window >= 1 && agg_window % 2 == 1, "agg_window must be odd and >= 1");
    require(temperature > 0.0, "temperature must be positive");
  }
};

/// One directional pass of the semi-global recurrence
///   L(p,d) = C(p,d) + min(L(q,d), L(q,d+-1)+p1, min_d' L(q,d')+p2) - min_d' L(q,d')
/// with q = p - (dx,dy); pixels without a predecessor keep their unary cost.
CostVolume sgm_direction_pass(const CostVolume& vol, const SgmParams& params, int dx, int dy);

/// Sum of all directional passes (4 axis-aligned, optionally 4 diagonal).
/// Requires K == 1; validity mask is preserved.
CostVolume sgm_aggregate(const CostVolume& vol, const SgmParams& params);

/// Winner-take-all: per-pixel argmin over valid candidates, ties broken
/// toward smaller disparity; pixels with no valid candidate are invalid.
DisparityMap wta(const CostVolume& vol);

/// Box-aggregates costs spatially, then outputs the softmax-weighted
/// expectation sum_d d * softmax_d(-cost/tau). Total and differentiable;
/// every output pixel is marked valid.
DisparityMap soft_argmin(const CostVolume& vol, const SoftMatchParams& params);

/// The expectation stage of soft_argmin on an already-aggregated cost plane
/// (layout (y, x, d), d innermost). Shared with the gradient module so the
/// forward pass there is arithmetically identical to the matcher's.
DisparityMap soft_expectation(const std::vector<double>& agg_cost, int width, int height,
                              int max_disp, double temperature);

/// Left-image occlusion mask derived from ground truth: a pixel is occluded
/// if its correspondence column round(x - D) leaves the frame, or another
/// left pixel in the same row with strictly larger disparity maps to the
/// same right column (z-buffer rule). Invalid ground-truth pixels are left
/// unmarked; they are excluded by evaluation masks instead.
Mask occlusion_mask(const DisparityMap& gt);

}  // namespace stereoct
