#include "stereoct/attack.hpp"

#include <algorithm>
#include <cmath>

#include "stereoct/gradient.hpp"

namespace stereoct {

namespace {

double sign0(double z) { return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0); }

GrayImage add_field(const GrayImage& img, const std::vector<double>& field) {
  GrayImage out = img;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += field[i];
  return out;
}

// Per-image clip for the unconstrained baseline: eps-ball plus that image's
// own intensity headroom.
void clip_single(PerturbationMap& p, const GrayImage& img, double eps) {
  for (size_t i = 0; i < p.data.size(); ++i) {
    const double lo = std::max(-eps, -img.data[i]);
    const double hi = std::min(eps, 1.0 - img.data[i]);
    p.data[i] = std::clamp(p.data[i], lo, hi);
  }
}

Mask rect_mask(Rect rect, int width, int height) {
  Mask m(width, height, false);
  for (int y = rect.y; y < rect.y + rect.h; ++y)
    for (int x = rect.x; x < rect.x + rect.w; ++x) m.set(x, y, true);
  return m;
}

void check_differentiable(const AttackConfig& cfg) {
  if (!cfg.pipeline.differentiable() && !cfg.allow_zero_grad)
    throw std::invalid_argument(
        "hard census blocks all gradients; use census-soft or sad, or opt into "
        "the zero-gradient no-op");
}

}  // namespace

AttackMode parse_attack_mode(const std::string& name) {
  if (name == "constrained") return AttackMode::constrained;
  if (name == "unconstrained") return AttackMode::unconstrained;
  if (name == "patch") return AttackMode::patch;
  throw std::invalid_argument("unknown attack mode: " + name);
}

const char* attack_mode_name(AttackMode m) {
  switch (m) {
    case AttackMode::constrained: return "constrained";
    case AttackMode::unconstrained: return "unconstrained";
    case AttackMode::patch: return "patch";
  }
  return "?";
}

std::pair<GrayImage, GrayImage> apply_perturbation(const GrayImage& left, const GrayImage& right,
                                                   const DisparityMap& gt, const Mask& occl,
                                                   const PerturbationMap& pert) {
  require(left.same_shape(right), "stereo pair dimension mismatch");
  require(gt.width == left.width && gt.height == left.height, "ground truth dimension mismatch");
  require(occl.width == left.width && occl.height == left.height, "occlusion dimension mismatch");
  require(pert.width == left.width && pert.height == left.height,
          "perturbation dimension mismatch");

  GrayImage radv = add_field(right, pert.data);
  GrayImage ladv = left;
  for (int y = 0; y < left.height; ++y)
    for (int x = 0; x < left.width; ++x) {
      if (!gt.valid_at(x, y) || occl.at(x, y)) continue;
      const long xr = std::lround(x - gt.at(x, y));
      ladv.at(x, y) += pert.at(static_cast<int>(xr), y);
    }
  return {std::move(ladv), std::move(radv)};
}

PerturbationMap joint_clip(const PerturbationMap& raw, const GrayImage& left,
                           const GrayImage& right, const DisparityMap& gt, const Mask& occl,
                           double eps) {
  require(raw.width == right.width && raw.height == right.height,
          "perturbation dimension mismatch");
  require(eps > 0.0, "eps must be positive");

  const size_t n = raw.data.size();
  std::vector<double> lo(n), hi(n);
  for (size_t i = 0; i < n; ++i) {
    lo[i] = std::max(-eps, -right.data[i]);
    hi[i] = std::min(eps, 1.0 - right.data[i]);
  }
  // Every non-occluded left pixel shares the value at its correspondence
  // column, so its headroom tightens that column's interval too.
  for (int y = 0; y < gt.height; ++y)
    for (int x = 0; x < gt.width; ++x) {
      if (!gt.valid_at(x, y) || occl.at(x, y)) continue;
      const long xr = std::lround(x - gt.at(x, y));
      const size_t i = static_cast<size_t>(y) * raw.width + xr;
      lo[i] = std::max(lo[i], -left.at(x, y));
      hi[i] = std::min(hi[i], 1.0 - left.at(x, y));
    }

  PerturbationMap out = raw;
  out.eps = eps;
  for (size_t i = 0; i < n; ++i) out.data[i] = std::clamp(out.data[i], lo[i], hi[i]);
  if (out.support)
    for (size_t i = 0; i < n; ++i)
      if (!out.support->data[i]) out.data[i] = 0.0;
  return out;
}

AttackResult pgd_attack(const GrayImage& left, const GrayImage& right, const DisparityMap& gt,
                        const Mask& occl, const AttackConfig& cfg) {
  cfg.validate();
  require(cfg.mode != AttackMode::unconstrained, "use unconstrained_pgd for independent fields");
  check_differentiable(cfg);

  PerturbationMap pert(right.width, right.height, cfg.eps);
  if (cfg.mode == AttackMode::patch) {
    require(cfg.patch_rect.has_value(), "patch mode needs a patch rectangle");
    require(cfg.patch_rect->inside(right.width, right.height), "patch rectangle out of bounds");
    pert.support = rect_mask(*cfg.patch_rect, right.width, right.height);
  }

  AttackResult res;
  res.loss_trace.reserve(cfg.steps + 1);
  for (int t = 0; t < cfg.steps; ++t) {
    const LossGradient g = grad_loss(left, right, gt, pert, cfg.pipeline);
    if (t == 0) res.blocked = g.blocked;
    res.loss_trace.push_back(g.loss);
    for (size_t i = 0; i < pert.data.size(); ++i) {
      if (pert.support && !pert.support->data[i]) continue;
      pert.data[i] += cfg.alpha * sign0(g.d_pert[i]);
    }
    pert = joint_clip(pert, left, right, gt, occl, cfg.eps);
  }
  res.loss_trace.push_back(forward_loss(left, right, gt, pert, cfg.pipeline));
  res.pert = std::move(pert);
  return res;
}

UnconstrainedResult unconstrained_pgd(const GrayImage& left, const GrayImage& right,
                                      const DisparityMap& gt, const AttackConfig& cfg) {
  cfg.validate();
  check_differentiable(cfg);

  UnconstrainedResult res;
  res.pert_left = PerturbationMap(left.width, left.height, cfg.eps);
  res.pert_right = PerturbationMap(right.width, right.height, cfg.eps);
  res.loss_trace.reserve(cfg.steps + 1);
  for (int t = 0; t < cfg.steps; ++t) {
    const PairLossGradient g = grad_loss_on_images(add_field(left, res.pert_left.data),
                                                   add_field(right, res.pert_right.data), gt,
                                                   cfg.pipeline);
    if (t == 0) res.blocked = g.blocked;
    res.loss_trace.push_back(g.loss);
    for (size_t i = 0; i < res.pert_left.data.size(); ++i) {
      res.pert_left.data[i] += cfg.alpha * sign0(g.d_left[i]);
      res.pert_right.data[i] += cfg.alpha * sign0(g.d_right[i]);
    }
    clip_single(res.pert_left, left, cfg.eps);
    clip_single(res.pert_right, right, cfg.eps);
  }
  res.loss_trace.push_back(loss_on_images(add_field(left, res.pert_left.data),
                                          add_field(right, res.pert_right.data), gt,
                                          cfg.pipeline));
  return res;
}

AttackResult patch_attack(const GrayImage& left, const GrayImage& right, const DisparityMap& gt,
                          const Mask& occl, Rect rect, const AttackConfig& cfg) {
  AttackConfig patched = cfg;
  patched.mode = AttackMode::patch;
  patched.patch_rect = rect;
  return pgd_attack(left, right, gt, occl, patched);
}

}  // namespace stereoct
