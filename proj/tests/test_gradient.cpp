#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "stereoct/attack.hpp"
#include "stereoct/cost_volume.hpp"
#include "stereoct/eval.hpp"
#include "stereoct/gradient.hpp"
#include "stereoct/matcher.hpp"
#include "stereoct/synth.hpp"

using namespace stereoct;

namespace {

// Small differentiable pipeline: cheap but with multiple scales.
PipelineConfig small_config(Descriptor desc, double steepness) {
  PipelineConfig cfg;
  cfg.descriptor = desc;
  cfg.scales = {3, 5};
  cfg.max_disp = 12;
  cfg.steepness = steepness;
  cfg.match.agg_window = 7;
  cfg.match.temperature = 0.1;
  return cfg;
}

SyntheticScene small_scene(uint64_t seed, int width = 48, int height = 24) {
  SceneSpec spec;
  spec.width = width;
  spec.height = height;
  spec.kind = SceneKind::step;
  spec.d0 = 3.0;
  spec.d1 = 7.0;
  spec.seed = seed;
  return make_scene(spec);
}

oracle::Cost oracle_kind(Descriptor desc) {
  return desc == Descriptor::sad ? oracle::Cost::sad : oracle::Cost::census_soft;
}

// Keeps the FD probes on coordinates whose gradient actually matters:
// relative error on near-zero entries measures only round-off.
std::vector<Coord> live_coords(const LossGradient& g, size_t want, uint64_t seed) {
  double gmax = 0.0;
  for (double v : g.d_pert) gmax = std::max(gmax, std::abs(v));
  REQUIRE(gmax > 0.0);
  std::vector<Coord> live;
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x)
      if (std::abs(g.at(x, y)) >= 1e-3 * gmax) live.push_back({x, y});
  REQUIRE(live.size() >= want);
  SplitMix64 rng(seed);
  for (size_t i = 0; i < want; ++i)
    std::swap(live[i], live[i + rng.next() % (live.size() - i)]);
  live.resize(want);
  return live;
}

}  // namespace

TEST_CASE("forward loss equals the scalar pipeline oracle") {
  const SyntheticScene scene = small_scene(11);
  for (Descriptor desc : {Descriptor::census_soft, Descriptor::sad}) {
    for (double C : {10.0, 1e5}) {
      const PipelineConfig cfg = small_config(desc, C);
      const PerturbationMap zero(scene.spec.width, scene.spec.height, 0.03);
      const double fast = forward_loss(scene.left, scene.right, scene.gt, zero, cfg);
      const double ref = oracle::pipeline_loss(scene.left, scene.right, scene.gt, cfg.scales,
                                               cfg.max_disp, oracle_kind(desc), C,
                                               cfg.match.agg_window, cfg.match.temperature);
      REQUIRE(fast == doctest::Approx(ref).epsilon(1e-12));
      if (desc == Descriptor::sad) break;  // steepness does not matter for SAD
    }
  }
}

TEST_CASE("forward loss is exactly the matcher's mae on the soft path") {
  const SyntheticScene scene = small_scene(12);
  const PipelineConfig cfg = small_config(Descriptor::census_soft, 1e5);
  const PerturbationMap zero(scene.spec.width, scene.spec.height, 0.03);
  const double loss = forward_loss(scene.left, scene.right, scene.gt, zero, cfg);

  const CostVolume vol = build_soft_census_volume_reduced(scene.left, scene.right, cfg.scales,
                                                          cfg.max_disp, cfg.steepness);
  const DisparityMap pred = soft_argmin(vol, cfg.match);
  const Mask emask = build_eval_mask(scene.gt, occlusion_mask(scene.gt), std::nullopt,
                                    cfg.max_disp);
  CHECK(loss == mae_loss(pred, scene.gt, emask));
}

TEST_CASE("adjoint matches central differences through the shared perturbation") {
  for (Descriptor desc : {Descriptor::census_soft, Descriptor::sad}) {
    CAPTURE(static_cast<int>(desc));
    const SyntheticScene scene = small_scene(desc == Descriptor::sad ? 21 : 22);
    const PipelineConfig cfg = small_config(desc, 10.0);

    PerturbationMap pert(scene.spec.width, scene.spec.height, 0.03);
    SplitMix64 rng(5);
    for (double& v : pert.data) v = rng.uniform(-0.01, 0.01);

    const LossGradient g = grad_loss(scene.left, scene.right, scene.gt, pert, cfg);
    REQUIRE_FALSE(g.blocked);
    REQUIRE(g.loss == doctest::Approx(
                          forward_loss(scene.left, scene.right, scene.gt, pert, cfg)));

    const std::vector<Coord> coords = live_coords(g, 20, 77);
    const std::vector<double> fd =
        fd_grad(scene.left, scene.right, scene.gt, pert, cfg, coords, 1e-5);
    for (size_t i = 0; i < coords.size(); ++i) {
      const double a = g.at(coords[i].x, coords[i].y);
      const double f = fd[i];
      const double rel = std::abs(a - f) / std::max(std::abs(a), std::abs(f));
      CAPTURE(coords[i].x);
      CAPTURE(coords[i].y);
      REQUIRE(rel <= 1e-4);
    }
  }
}

TEST_CASE("image-space gradients match finite differences too") {
  const SyntheticScene scene = small_scene(31, 40, 20);
  const PipelineConfig cfg = small_config(Descriptor::census_soft, 10.0);
  const PairLossGradient g = grad_loss_on_images(scene.left, scene.right, scene.gt, cfg);
  REQUIRE_FALSE(g.blocked);

  // probe a handful of pixels on each side with manual central differences
  const double h = 1e-5;
  SplitMix64 rng(3);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 12; ++trial) {
    const int x = 3 + static_cast<int>(rng.next() % (scene.spec.width - 6));
    const int y = 3 + static_cast<int>(rng.next() % (scene.spec.height - 6));
    const bool on_left = (rng.next() & 1) != 0;
    const std::vector<double>& grad = on_left ? g.d_left : g.d_right;
    const double a = grad[static_cast<size_t>(y) * scene.spec.width + x];
    if (std::abs(a) < 1e-4) continue;

    GrayImage l = scene.left, r = scene.right;
    GrayImage& probe = on_left ? l : r;
    probe.at(x, y) += h;
    const double up = loss_on_images(l, r, scene.gt, cfg);
    probe.at(x, y) -= 2 * h;
    const double down = loss_on_images(l, r, scene.gt, cfg);
    const double f = (up - down) / (2 * h);
    const double rel = std::abs(a - f) / std::max(std::abs(a), std::abs(f));
    REQUIRE(rel <= 1e-4);
    ++checked;
  }
  REQUIRE(checked == 12);
}

TEST_CASE("hard census blocks every gradient") {
  const SyntheticScene scene = small_scene(41);
  const PipelineConfig cfg = small_config(Descriptor::census_hard, 1e5);
  const PerturbationMap zero(scene.spec.width, scene.spec.height, 0.03);

  const LossGradient g = grad_loss(scene.left, scene.right, scene.gt, zero, cfg);
  CHECK(g.blocked);
  for (double v : g.d_pert) REQUIRE(v == 0.0);
  CHECK(g.loss > 0.0);

  const PairLossGradient pg = grad_loss_on_images(scene.left, scene.right, scene.gt, cfg);
  CHECK(pg.blocked);
  for (double v : pg.d_left) REQUIRE(v == 0.0);
  for (double v : pg.d_right) REQUIRE(v == 0.0);
}

TEST_CASE("a sign step along the gradient raises the loss") {
  const SyntheticScene scene = small_scene(51);
  const PipelineConfig cfg = small_config(Descriptor::sad, 1e5);
  PerturbationMap pert(scene.spec.width, scene.spec.height, 0.03);
  const LossGradient g = grad_loss(scene.left, scene.right, scene.gt, pert, cfg);

  PerturbationMap stepped = pert;
  for (size_t i = 0; i < stepped.data.size(); ++i) {
    const double s = g.d_pert[i] > 0 ? 1.0 : (g.d_pert[i] < 0 ? -1.0 : 0.0);
    stepped.data[i] += 1e-4 * s;
  }
  const double before = g.loss;
  const double after = forward_loss(scene.left, scene.right, scene.gt, stepped, cfg);
  CHECK(after > before);
}

TEST_CASE("gradients are finite and dimension mismatches are rejected") {
  const SyntheticScene scene = small_scene(61);
  const PipelineConfig cfg = small_config(Descriptor::census_soft, 10.0);
  const PerturbationMap zero(scene.spec.width, scene.spec.height, 0.03);
  const LossGradient g = grad_loss(scene.left, scene.right, scene.gt, zero, cfg);
  for (double v : g.d_pert) REQUIRE(std::isfinite(v));

  const PerturbationMap wrong(scene.spec.width - 1, scene.spec.height, 0.03);
  CHECK_THROWS_AS(grad_loss(scene.left, scene.right, scene.gt, wrong, cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(forward_loss(scene.left, scene.right, scene.gt, wrong, cfg),
                  std::invalid_argument);
}

TEST_CASE("gradient evaluation needs a nonempty evaluation mask") {
  const SyntheticScene scene = small_scene(71);
  PipelineConfig cfg = small_config(Descriptor::census_soft, 10.0);
  cfg.max_disp = 2;  // every ground-truth disparity is 3 or 7 -> empty mask
  const PerturbationMap zero(scene.spec.width, scene.spec.height, 0.03);
  CHECK_THROWS_AS(forward_loss(scene.left, scene.right, scene.gt, zero, cfg),
                  std::invalid_argument);
}
