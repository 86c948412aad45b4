#include "stereoct/eval.hpp"

#include <cmath>

namespace stereoct {

Mask build_eval_mask(const DisparityMap& gt, const Mask& occl, const std::optional<Rect>& crop,
                     int max_disp) {
  require(gt.width == occl.width && gt.height == occl.height, "gt/occlusion shape mismatch");
  require(max_disp > 0, "max_disp must be positive");
  Mask mask(gt.width, gt.height, false);
  for (int y = 0; y < gt.height; ++y) {
    for (int x = 0; x < gt.width; ++x) {
      if (!gt.valid_at(x, y)) continue;
      if (occl.at(x, y)) continue;
      const double d = gt.at(x, y);
      if (d >= max_disp) continue;
      const double xr = x - d;
      if (crop) {
        if (!crop->contains(x, y) || !crop->contains_x(xr)) continue;
      } else if (xr < 0 || xr > gt.width - 1) {
        continue;
      }
      mask.set(x, y, true);
    }
  }
  return mask;
}

namespace {

template <class Fn>
void for_evaluated(const DisparityMap& pred, const DisparityMap& gt, const Mask& mask, Fn&& fn) {
  require(pred.width == gt.width && pred.height == gt.height, "pred/gt shape mismatch");
  require(mask.width == gt.width && mask.height == gt.height, "mask shape mismatch");
  long n = 0;
  for (int y = 0; y < gt.height; ++y) {
    for (int x = 0; x < gt.width; ++x) {
      if (!mask.at(x, y) || !pred.valid_at(x, y)) continue;
      fn(pred.at(x, y) - gt.at(x, y));
      ++n;
    }
  }
  require(n > 0, "empty evaluation mask");
}

}  // namespace

double epe(const DisparityMap& pred, const DisparityMap& gt, const Mask& mask) {
  double sum = 0.0;
  long n = 0;
  for_evaluated(pred, gt, mask, [&](double z) {
    sum += std::abs(z);
    ++n;
  });
  return sum / n;
}

double bad(const DisparityMap& pred, const DisparityMap& gt, const Mask& mask, double tau) {
  require(tau > 0.0, "tau must be positive");
  long over = 0, n = 0;
  for_evaluated(pred, gt, mask, [&](double z) {
    if (std::abs(z) > tau) ++over;
    ++n;
  });
  return 100.0 * over / n;
}

double smooth_l1_loss(const DisparityMap& pred, const DisparityMap& gt, const Mask& mask) {
  double sum = 0.0;
  long n = 0;
  for_evaluated(pred, gt, mask, [&](double z) {
    sum += smooth_l1(z);
    ++n;
  });
  return sum / n;
}

double smooth_l1_loss(const std::vector<DisparityMap>& stacks, const DisparityMap& gt,
                      const Mask& mask, const std::vector<double>& betas) {
  require(!stacks.empty() && stacks.size() == betas.size(),
          "one weight per prediction stack required");
  double total = 0.0;
  for (size_t s = 0; s < stacks.size(); ++s)
    total += betas[s] * smooth_l1_loss(stacks[s], gt, mask);
  return total;
}

double mae_loss(const DisparityMap& pred, const DisparityMap& gt, const Mask& mask) {
  return epe(pred, gt, mask);
}

Metrics compute_metrics(const DisparityMap& pred, const DisparityMap& gt, const Mask& mask) {
  Metrics m;
  double sum = 0.0;
  long over1 = 0, over3 = 0, n = 0;
  for_evaluated(pred, gt, mask, [&](double z) {
    const double a = std::abs(z);
    sum += a;
    if (a > 1.0) ++over1;
    if (a > 3.0) ++over3;
    ++n;
  });
  m.epe = sum / n;
  m.bad1 = 100.0 * over1 / n;
  m.bad3 = 100.0 * over3 / n;
  m.pixels = n;
  m.mask_fraction = static_cast<double>(n) / (static_cast<double>(gt.width) * gt.height);
  return m;
}

}  // namespace stereoct
