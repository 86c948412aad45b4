#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "stereoct/image.hpp"
#include "stereoct/pipeline.hpp"

namespace stereoct {

enum class AttackMode { constrained, unconstrained, patch };

AttackMode parse_attack_mode(const std::string& name);
const char* attack_mode_name(AttackMode m);

struct AttackConfig {
  AttackMode mode = AttackMode::constrained;
  double eps = 0.03;
  double alpha = 0.01;
  int steps = 20;
  std::optional<Rect> patch_rect;
  PipelineConfig pipeline;
  // Lets the hard-census no-op run instead of refusing, reproducing the
  // "unattackable" blocked-gradient baseline: P stays 0 and the loss trace
  // is constant.
  bool allow_zero_grad = false;

  void validate() const {
    require(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
    require(alpha > 0.0, "alpha must be positive");
    require(steps >= 1, "steps must be >= 1");
    pipeline.validate();
  }

  // Patch runs default to the full color range within the patch.
  static AttackConfig patch_defaults(Rect rect) {
    AttackConfig cfg;
    cfg.mode = AttackMode::patch;
    cfg.eps = 1.0;
    cfg.steps = 100;
    cfg.patch_rect = rect;
    return cfg;
  }
};

/// Final perturbation plus the loss value at every iterate: trace[0] is the
/// clean loss at P = 0 and trace[t] the loss at P_t, so it has steps+1
/// entries.
struct AttackResult {
  PerturbationMap pert;
  std::vector<double> loss_trace;
  bool blocked = false;
};

struct UnconstrainedResult {
  PerturbationMap pert_left;
  PerturbationMap pert_right;
  std::vector<double> loss_trace;
  bool blocked = false;
};

/// The stereo-consistent application rule: the right image receives P
/// directly, and every non-occluded left pixel with valid ground truth
/// receives P at its correspondence column round(x - D). Occluded or
/// invalid left pixels are untouched. Returns (left_adv, right_adv).
std::pair<GrayImage, GrayImage> apply_perturbation(const GrayImage& left, const GrayImage& right,
                                                   const DisparityMap& gt, const Mask& occl,
                                                   const PerturbationMap& pert);

/// Clips each P value to the intersection of [-eps, eps], the right pixel's
/// intensity headroom [-I_R, 1-I_R], and the headroom of every non-occluded
/// left pixel mapping to that column — one shared value keeps both views in
/// [0,1]. Zero always remains admissible. Preserves P's support mask.
PerturbationMap joint_clip(const PerturbationMap& raw, const GrayImage& left,
                           const GrayImage& right, const DisparityMap& gt, const Mask& occl,
                           double eps);

/// Sign-of-gradient ascent from P = 0 with joint_clip after every step.
/// In patch mode, steps outside the support rectangle are zeroed. Refuses
/// the hard-census pipeline unless cfg.allow_zero_grad is set.
AttackResult pgd_attack(const GrayImage& left, const GrayImage& right, const DisparityMap& gt,
                        const Mask& occl, const AttackConfig& cfg);

/// Baseline without the stereo constraint: the two views carry independent
/// fields, each clipped to its own eps-ball and intensity headroom;
/// occlusion does not restrict where perturbation lands.
UnconstrainedResult unconstrained_pgd(const GrayImage& left, const GrayImage& right,
                                      const DisparityMap& gt, const AttackConfig& cfg);

/// pgd_attack restricted to a rectangle of the right image; ground truth is
/// left untouched, so the patch must fool the matcher at the scene's true
/// geometry.
AttackResult patch_attack(const GrayImage& left, const GrayImage& right, const DisparityMap& gt,
                          const Mask& occl, Rect rect, const AttackConfig& cfg);

}  // namespace stereoct
