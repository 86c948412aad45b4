#include "stereoct/gradient.hpp"

#include <cmath>

#include "stereoct/attack.hpp"
#include "stereoct/boxfilter.hpp"
#include "stereoct/cost_volume.hpp"
#include "stereoct/eval.hpp"
#include "stereoct/parallel.hpp"

namespace stereoct {

namespace {

double sign0(double z) { return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0); }

struct ForwardPass {
  Mask occl;
  Mask emask;
  CostVolume vol;            // scale-reduced costs, layout (y, x, d)
  std::vector<double> agg;   // box-mean aggregated costs
  std::vector<double> counts;
  DisparityMap pred;
  double loss = 0.0;
  long evaluated = 0;
};

ForwardPass run_forward(const GrayImage& ladv, const GrayImage& radv, const DisparityMap& gt,
                        const PipelineConfig& cfg) {
  cfg.validate();
  require(ladv.same_shape(radv), "stereo pair dimension mismatch");
  require(gt.width == ladv.width && gt.height == ladv.height, "ground truth dimension mismatch");

  ForwardPass fp;
  fp.occl = occlusion_mask(gt);
  fp.emask = build_eval_mask(gt, fp.occl, std::nullopt, cfg.max_disp);
  switch (cfg.descriptor) {
    case Descriptor::census_hard:
      fp.vol = build_census_volume_reduced(ladv, radv, cfg.scales, cfg.max_disp);
      break;
    case Descriptor::census_soft:
      fp.vol = build_soft_census_volume_reduced(ladv, radv, cfg.scales, cfg.max_disp,
                                                cfg.steepness);
      break;
    case Descriptor::sad:
      fp.vol = build_sad_volume_reduced(ladv, radv, cfg.scales, cfg.max_disp);
      break;
  }
  fp.agg = box_mean_channels(fp.vol.cost, fp.vol.width, fp.vol.height, fp.vol.max_disp,
                             cfg.match.agg_window);
  fp.counts = box_counts(fp.vol.width, fp.vol.height, cfg.match.agg_window);
  fp.pred = soft_expectation(fp.agg, fp.vol.width, fp.vol.height, fp.vol.max_disp,
                             cfg.match.temperature);

  double sum = 0.0;
  long n = 0;
  for (int y = 0; y < gt.height; ++y)
    for (int x = 0; x < gt.width; ++x) {
      if (!fp.emask.at(x, y)) continue;
      sum += std::abs(fp.pred.at(x, y) - gt.at(x, y));
      ++n;
    }
  require(n > 0, "empty evaluation mask");
  fp.loss = sum / n;
  fp.evaluated = n;
  return fp;
}

// Adjoint through: masked MAE -> softmax expectation -> box mean ->
// scale mean -> descriptor. Gives dL/d(left image), dL/d(right image).
struct ImageGrads {
  std::vector<double> d_left;
  std::vector<double> d_right;
};

ImageGrads backward(const GrayImage& ladv, const GrayImage& radv, const DisparityMap& gt,
                    const PipelineConfig& cfg, const ForwardPass& fp) {
  const int W = fp.vol.width, H = fp.vol.height, L = fp.vol.max_disp;
  const int K = static_cast<int>(cfg.scales.size());
  const double inv_tau = 1.0 / cfg.match.temperature;
  const double inv_n = 1.0 / static_cast<double>(fp.evaluated);

  // dL/d(aggregated cost): through sign-of-error and the softmax expectation
  // D = sum_d d * w_d, where dD/dc_e = (-1/tau) * w_e * (e - D).
  std::vector<double> g_agg(static_cast<size_t>(W) * H * L, 0.0);
  parallel_for(0, H, [&](int y) {
    std::vector<double> w(L);
    for (int x = 0; x < W; ++x) {
      if (!fp.emask.at(x, y)) continue;
      const double g_pred = sign0(fp.pred.at(x, y) - gt.at(x, y)) * inv_n;
      if (g_pred == 0.0) continue;
      const double* c = fp.agg.data() + (static_cast<size_t>(y) * W + x) * L;
      double cmin = c[0];
      for (int d = 1; d < L; ++d) cmin = std::min(cmin, c[d]);
      double wsum = 0.0;
      for (int d = 0; d < L; ++d) {
        w[d] = std::exp((cmin - c[d]) * inv_tau);
        wsum += w[d];
      }
      const double dhat = fp.pred.at(x, y);
      double* g = g_agg.data() + (static_cast<size_t>(y) * W + x) * L;
      for (int d = 0; d < L; ++d)
        g[d] = g_pred * (-inv_tau) * (w[d] / wsum) * (d - dhat);
    }
  });

  // Transpose of the clipped box mean: scale by each output's window area,
  // then box-sum (the clipped box window relation is symmetric).
  parallel_for(0, H, [&](int y) {
    for (int x = 0; x < W; ++x) {
      const double inv_count = 1.0 / fp.counts[static_cast<size_t>(y) * W + x];
      double* g = g_agg.data() + (static_cast<size_t>(y) * W + x) * L;
      for (int d = 0; d < L; ++d) g[d] *= inv_count;
    }
  });
  std::vector<double> g_cost = box_sum_channels(g_agg, W, H, L, cfg.match.agg_window);

  // Invalid entries hold the constant 1.0 and pass no gradient.
  for (size_t e = 0; e < fp.vol.valid.size(); ++e)
    if (!fp.vol.valid[e]) g_cost[e] = 0.0;

  ImageGrads ig;
  ig.d_left.assign(static_cast<size_t>(W) * H, 0.0);
  ig.d_right.assign(static_cast<size_t>(W) * H, 0.0);

  // Descriptor stage, one scale at a time; each scale contributes
  // 1/(K * k^2) of the reduced cost. Scatter-adds stay serial.
  for (int s = 0; s < K; ++s) {
    const int k = cfg.scales[s];
    const int r = k / 2;
    const double coef = 1.0 / (static_cast<double>(K) * k * k);

    if (cfg.descriptor == Descriptor::sad) {
      for (int y = r; y < H - r; ++y)
        for (int x = r; x < W - r; ++x) {
          const int d_hi = std::min(x - r, L - 1);
          const size_t base = fp.vol.entry_index(x, y, 0);
          for (int d = 0; d <= d_hi; ++d) {
            const double g = g_cost[base + d] * coef;
            if (g == 0.0) continue;
            for (int dy = -r; dy <= r; ++dy) {
              const size_t lrow = static_cast<size_t>(y + dy) * W;
              for (int dx = -r; dx <= r; ++dx) {
                const double sgn = sign0(ladv.data[lrow + x + dx] - radv.data[lrow + x - d + dx]);
                ig.d_left[lrow + x + dx] += g * sgn;
                ig.d_right[lrow + x - d + dx] -= g * sgn;
              }
            }
          }
        }
      continue;
    }

    // Soft census: bit = logistic(C * (I(v) - I(u))), cost contribution
    // (a_i - b_i)^2 / (K k^2). Fields are recomputed per scale to bound
    // memory on large inputs.
    const std::vector<int> one_scale{k};
    const SoftCensusField fl = soft_census_transform(ladv, one_scale, cfg.steepness);
    const SoftCensusField fr = soft_census_transform(radv, one_scale, cfg.steepness);
    const int bpp = k * k - 1;
    const double C = cfg.steepness;

    for (int y = r; y < H - r; ++y)
      for (int x = r; x < W - r; ++x) {
        const int d_hi = std::min(x - r, L - 1);
        const size_t base = fp.vol.entry_index(x, y, 0);
        const double* a = fl.bits[0].data() + (static_cast<size_t>(y) * W + x) * bpp;
        for (int d = 0; d <= d_hi; ++d) {
          const double g = g_cost[base + d] * coef;
          if (g == 0.0) continue;
          const double* b = fr.bits[0].data() + (static_cast<size_t>(y) * W + x - d) * bpp;
          double g_center_l = 0.0, g_center_r = 0.0;
          int bit = 0;
          for (int dy = -r; dy <= r; ++dy) {
            const size_t lrow = static_cast<size_t>(y + dy) * W;
            for (int dx = -r; dx <= r; ++dx) {
              if (dx == 0 && dy == 0) continue;
              const double diff2g = 2.0 * (a[bit] - b[bit]) * g;
              const double da = diff2g * C * a[bit] * (1.0 - a[bit]);
              const double db = -diff2g * C * b[bit] * (1.0 - b[bit]);
              ig.d_left[lrow + x + dx] += da;
              g_center_l -= da;
              ig.d_right[lrow + x - d + dx] += db;
              g_center_r -= db;
              ++bit;
            }
          }
          ig.d_left[static_cast<size_t>(y) * W + x] += g_center_l;
          ig.d_right[static_cast<size_t>(y) * W + x - d] += g_center_r;
        }
      }
  }
  return ig;
}

}  // namespace

double loss_on_images(const GrayImage& ladv, const GrayImage& radv, const DisparityMap& gt,
                      const PipelineConfig& cfg) {
  return run_forward(ladv, radv, gt, cfg).loss;
}

PairLossGradient grad_loss_on_images(const GrayImage& ladv, const GrayImage& radv,
                                     const DisparityMap& gt, const PipelineConfig& cfg) {
  const ForwardPass fp = run_forward(ladv, radv, gt, cfg);
  PairLossGradient out;
  out.width = ladv.width;
  out.height = ladv.height;
  out.loss = fp.loss;
  if (!cfg.differentiable()) {
    out.d_left.assign(ladv.size(), 0.0);
    out.d_right.assign(ladv.size(), 0.0);
    out.blocked = true;
    return out;
  }
  ImageGrads ig = backward(ladv, radv, gt, cfg, fp);
  out.d_left = std::move(ig.d_left);
  out.d_right = std::move(ig.d_right);
  return out;
}

double forward_loss(const GrayImage& left, const GrayImage& right, const DisparityMap& gt,
                    const PerturbationMap& pert, const PipelineConfig& cfg) {
  const Mask occl = occlusion_mask(gt);
  auto [ladv, radv] = apply_perturbation(left, right, gt, occl, pert);
  return loss_on_images(ladv, radv, gt, cfg);
}

LossGradient grad_loss(const GrayImage& left, const GrayImage& right, const DisparityMap& gt,
                       const PerturbationMap& pert, const PipelineConfig& cfg) {
  require(pert.width == right.width && pert.height == right.height,
          "perturbation dimension mismatch");
  const Mask occl = occlusion_mask(gt);
  auto [ladv, radv] = apply_perturbation(left, right, gt, occl, pert);
  PairLossGradient pair = grad_loss_on_images(ladv, radv, gt, cfg);

  LossGradient out;
  out.width = pert.width;
  out.height = pert.height;
  out.loss = pair.loss;
  out.blocked = pair.blocked;
  // Pull image-space gradients back through the application rule: the right
  // image reads P directly, each non-occluded left pixel reads P at its
  // correspondence column.
  out.d_pert = std::move(pair.d_right);
  for (int y = 0; y < gt.height; ++y)
    for (int x = 0; x < gt.width; ++x) {
      if (!gt.valid_at(x, y) || occl.at(x, y)) continue;
      const long xr = std::lround(x - gt.at(x, y));
      out.d_pert[static_cast<size_t>(y) * out.width + xr] +=
          pair.d_left[static_cast<size_t>(y) * gt.width + x];
    }
  return out;
}

std::vector<double> fd_grad(const GrayImage& left, const GrayImage& right, const DisparityMap& gt,
                            const PerturbationMap& pert, const PipelineConfig& cfg,
                            const std::vector<Coord>& coords, double step) {
  require(step > 0.0, "step must be positive");
  std::vector<double> out;
  out.reserve(coords.size());
  PerturbationMap probe = pert;
  for (const Coord& c : coords) {
    require(c.x >= 0 && c.x < pert.width && c.y >= 0 && c.y < pert.height,
            "probe coordinate out of bounds");
    const double saved = probe.at(c.x, c.y);
    probe.at(c.x, c.y) = saved + step;
    const double hi = forward_loss(left, right, gt, probe, cfg);
    probe.at(c.x, c.y) = saved - step;
    const double lo = forward_loss(left, right, gt, probe, cfg);
    probe.at(c.x, c.y) = saved;
    out.push_back((hi - lo) / (2.0 * step));
  }
  return out;
}

}  // namespace stereoct
