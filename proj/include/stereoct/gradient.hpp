#pragma once

#include <vector>

#include "stereoct/image.hpp"
#include "stereoct/pipeline.hpp"

namespace stereoct {

/// dL/dP in right-image coordinates, plus the loss value from the same
/// forward pass. `blocked` is set on the hard-census path, whose gradient
/// is identically zero (the comparison operator has no derivative).
struct LossGradient {
  int width = 0;
  int height = 0;
  std::vector<double> d_pert;
  double loss = 0.0;
  bool blocked = false;

  double at(int x, int y) const { return d_pert[static_cast<size_t>(y) * width + x]; }
};

/// Image-space gradients, used by the unconstrained attack where the two
/// views carry independent perturbation fields.
struct PairLossGradient {
  int width = 0;
  int height = 0;
  std::vector<double> d_left;
  std::vector<double> d_right;
  double loss = 0.0;
  bool blocked = false;
};

/// Attack loss on already-perturbed images: mean |soft prediction - gt| over
/// the evaluation mask derived from gt (occlusion, disparities >= max_disp,
/// and out-of-frame correspondences excluded).
double loss_on_images(const GrayImage& ladv, const GrayImage& radv, const DisparityMap& gt,
                      const PipelineConfig& cfg);

PairLossGradient grad_loss_on_images(const GrayImage& ladv, const GrayImage& radv,
                                     const DisparityMap& gt, const PipelineConfig& cfg);

/// Loss as a function of the shared perturbation field: applies P to the
/// right image and, through the ground-truth correspondence, to non-occluded
/// left pixels, then evaluates loss_on_images. No clipping is performed here.
double forward_loss(const GrayImage& left, const GrayImage& right, const DisparityMap& gt,
                    const PerturbationMap& pert, const PipelineConfig& cfg);

/// Exact adjoint of forward_loss: image-space gradients pulled back through
/// the correspondence scatter. Coordinates that feed no evaluated pixel get
/// exact zeros; the hard-census descriptor yields an all-zero map with the
/// blocked flag set.
LossGradient grad_loss(const GrayImage& left, const GrayImage& right, const DisparityMap& gt,
                       const PerturbationMap& pert, const PipelineConfig& cfg);

struct Coord {
  int x = 0;
  int y = 0;
};

/// Central finite differences of forward_loss at the given P coordinates:
/// (L(P + step e) - L(P - step e)) / (2 step). The probes are applied as-is,
/// without any eps or intensity clipping.
std::vector<double> fd_grad(const GrayImage& left, const GrayImage& right, const DisparityMap& gt,
                            const PerturbationMap& pert, const PipelineConfig& cfg,
                            const std::vector<Coord>& coords, double step);

}  // namespace stereoct
