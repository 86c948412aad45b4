#pragma once

#include <optional>
#include <vector>

#include "stereoct/image.hpp"

namespace stereoct {

// Evaluation mask: GT valid, not occluded, D < max_disp, and both the pixel
// and its correspondence x - D stay inside the (optional) crop rectangle.
Mask build_eval_mask(const DisparityMap& gt, const Mask& occl, const std::optional<Rect>& crop,
                     int max_disp);

// Mean end-point error |pred - gt| over masked pixels. Pixels the predictor
// marked invalid are skipped; throws if nothing remains to evaluate.
double epe(const DisparityMap& pred, const DisparityMap& gt, const Mask& mask);

// Percentage of masked pixels with |pred - gt| strictly greater than tau.
double bad(const DisparityMap& pred, const DisparityMap& gt, const Mask& mask, double tau);

inline double smooth_l1(double z) {
  const double a = z < 0 ? -z : z;
  return a < 1.0 ? 0.5 * z * z : a - 0.5;
}

double smooth_l1_loss(const DisparityMap& pred, const DisparityMap& gt, const Mask& mask);

// Weighted multi-stack variant: sum_s beta_s * mean smooth_l1(stack_s - gt).
double smooth_l1_loss(const std::vector<DisparityMap>& stacks, const DisparityMap& gt,
                      const Mask& mask, const std::vector<double>& betas);

// The attack objective; identical to epe by definition.
double mae_loss(const DisparityMap& pred, const DisparityMap& gt, const Mask& mask);

struct Metrics {
  double epe = 0.0;
  double bad1 = 0.0;
  double bad3 = 0.0;
  long pixels = 0;         // pixels actually evaluated
  double mask_fraction = 0.0;  // evaluated pixels / image area
};

Metrics compute_metrics(const DisparityMap& pred, const DisparityMap& gt, const Mask& mask);

}  // namespace stereoct
