#include <cmath>

#include <doctest.h>

#include "helpers.hpp"
#include "stereoct/attack.hpp"
#include "stereoct/gradient.hpp"
#include "stereoct/matcher.hpp"
#include "stereoct/synth.hpp"

using namespace stereoct;

namespace {

PipelineConfig cheap_pipeline(Descriptor desc) {
  PipelineConfig cfg;
  cfg.descriptor = desc;
  cfg.scales = {3, 5};
  cfg.max_disp = 12;
  cfg.steepness = 1e5;
  cfg.match.temperature = 0.05;
  return cfg;
}

AttackConfig cheap_attack(Descriptor desc, int steps = 4) {
  AttackConfig cfg;
  cfg.pipeline = cheap_pipeline(desc);
  cfg.steps = steps;
  return cfg;
}

SyntheticScene scene_with_occlusion(uint64_t seed) {
  SceneSpec spec;
  spec.width = 48;
  spec.height = 24;
  spec.kind = SceneKind::step;
  spec.d0 = 2.0;
  spec.d1 = 8.0;
  spec.seed = seed;
  return make_scene(spec);
}

}  // namespace

TEST_CASE("apply_perturbation follows the correspondence rule exactly") {
  const SyntheticScene scene = scene_with_occlusion(1);
  const int W = scene.spec.width, H = scene.spec.height;
  PerturbationMap pert(W, H, 0.03);
  SplitMix64 rng(2);
  for (double& v : pert.data) v = rng.uniform(-0.03, 0.03);

  const auto [ladv, radv] = apply_perturbation(scene.left, scene.right, scene.gt, scene.occl,
                                               pert);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      REQUIRE(radv.at(x, y) == scene.right.at(x, y) + pert.at(x, y));
      if (scene.occl.at(x, y) || !scene.gt.valid_at(x, y)) {
        REQUIRE(ladv.at(x, y) == scene.left.at(x, y));
      } else {
        const int xr = static_cast<int>(std::lround(x - scene.gt.at(x, y)));
        REQUIRE(ladv.at(x, y) == scene.left.at(x, y) + pert.at(xr, y));
      }
    }
}

TEST_CASE("photometric differences are conserved for every non-occluded pixel") {
  const SyntheticScene scene = scene_with_occlusion(3);
  PerturbationMap pert(scene.spec.width, scene.spec.height, 0.03);
  SplitMix64 rng(4);
  for (double& v : pert.data) v = rng.uniform(-0.03, 0.03);
  const auto [ladv, radv] = apply_perturbation(scene.left, scene.right, scene.gt, scene.occl,
                                               pert);
  for (int y = 0; y < scene.spec.height; ++y)
    for (int x = 0; x < scene.spec.width; ++x) {
      if (scene.occl.at(x, y)) continue;
      const int xr = static_cast<int>(std::lround(x - scene.gt.at(x, y)));
      // exact-copy scene: both clean and adversarial differences are 0.0
      REQUIRE(scene.left.at(x, y) - scene.right.at(xr, y) == 0.0);
      REQUIRE(ladv.at(x, y) - radv.at(xr, y) == 0.0);
    }
}

TEST_CASE("joint clip respects eps and both intensity ranges") {
  const SyntheticScene scene = scene_with_occlusion(5);
  const int W = scene.spec.width, H = scene.spec.height;
  PerturbationMap raw(W, H, 0.25);
  SplitMix64 rng(6);
  for (double& v : raw.data) v = rng.uniform(-2.0, 2.0);

  const PerturbationMap clipped =
      joint_clip(raw, scene.left, scene.right, scene.gt, scene.occl, 0.25);
  const auto [ladv, radv] = apply_perturbation(scene.left, scene.right, scene.gt, scene.occl,
                                               clipped);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      REQUIRE(std::abs(clipped.at(x, y)) <= 0.25);
      REQUIRE(radv.at(x, y) >= 0.0);
      REQUIRE(radv.at(x, y) <= 1.0);
      REQUIRE(ladv.at(x, y) >= 0.0);
      REQUIRE(ladv.at(x, y) <= 1.0);
    }

  // an in-range field passes through untouched
  PerturbationMap small(W, H, 0.25);
  for (double& v : small.data) v = 1e-4;
  // keep headroom: the texture spans (0,1) so 1e-4 fits almost everywhere;
  // compare only entries that were already feasible
  const PerturbationMap small_clipped =
      joint_clip(small, scene.left, scene.right, scene.gt, scene.occl, 0.25);
  int unchanged = 0;
  for (size_t i = 0; i < small.data.size(); ++i)
    unchanged += small_clipped.data[i] == small.data[i];
  CHECK(unchanged > static_cast<int>(small.data.size()) * 9 / 10);
}

TEST_CASE("pgd produces a feasible perturbation and a full loss trace") {
  const SyntheticScene scene = scene_with_occlusion(7);
  const AttackConfig cfg = cheap_attack(Descriptor::sad, 5);
  const AttackResult res = pgd_attack(scene.left, scene.right, scene.gt, scene.occl, cfg);

  REQUIRE_FALSE(res.blocked);
  REQUIRE(res.loss_trace.size() == 6);  // T + 1
  const PerturbationMap zero(scene.spec.width, scene.spec.height, cfg.eps);
  CHECK(res.loss_trace[0] ==
        forward_loss(scene.left, scene.right, scene.gt, zero, cfg.pipeline));
  CHECK(res.pert.max_abs() <= cfg.eps + 1e-15);
  CHECK(res.pert.max_abs() > 0.0);

  const auto [ladv, radv] = apply_perturbation(scene.left, scene.right, scene.gt, scene.occl,
                                               res.pert);
  for (size_t i = 0; i < ladv.data.size(); ++i) {
    REQUIRE(ladv.data[i] >= 0.0);
    REQUIRE(ladv.data[i] <= 1.0);
    REQUIRE(radv.data[i] >= 0.0);
    REQUIRE(radv.data[i] <= 1.0);
  }
  // the final trace entry is the loss at the returned perturbation
  CHECK(res.loss_trace.back() ==
        forward_loss(scene.left, scene.right, scene.gt, res.pert, cfg.pipeline));

  // reruns are bit-identical
  const AttackResult res2 = pgd_attack(scene.left, scene.right, scene.gt, scene.occl, cfg);
  CHECK(res2.pert.data == res.pert.data);
  CHECK(res2.loss_trace == res.loss_trace);
}

TEST_CASE("hard census refuses unless the zero-grad no-op is requested") {
  const SyntheticScene scene = scene_with_occlusion(9);
  AttackConfig cfg = cheap_attack(Descriptor::census_hard, 3);
  CHECK_THROWS_WITH_AS(pgd_attack(scene.left, scene.right, scene.gt, scene.occl, cfg),
                       doctest::Contains("census"), std::invalid_argument);

  cfg.allow_zero_grad = true;
  const AttackResult res = pgd_attack(scene.left, scene.right, scene.gt, scene.occl, cfg);
  CHECK(res.blocked);
  REQUIRE(res.loss_trace.size() == 4);
  for (double v : res.pert.data) REQUIRE(v == 0.0);
  for (double l : res.loss_trace) REQUIRE(l == res.loss_trace[0]);
}

TEST_CASE("patch attacks stay inside the rectangle") {
  const SyntheticScene scene = scene_with_occlusion(11);
  const Rect rect{20, 8, 10, 9};
  AttackConfig cfg = AttackConfig::patch_defaults(rect);
  cfg.steps = 6;
  cfg.pipeline = cheap_pipeline(Descriptor::sad);
  const AttackResult res =
      patch_attack(scene.left, scene.right, scene.gt, scene.occl, rect, cfg);

  REQUIRE(res.pert.support.has_value());
  int inside_nonzero = 0;
  for (int y = 0; y < scene.spec.height; ++y)
    for (int x = 0; x < scene.spec.width; ++x) {
      if (!rect.contains(x, y)) {
        REQUIRE(res.pert.at(x, y) == 0.0);
      } else if (res.pert.at(x, y) != 0.0) {
        ++inside_nonzero;
      }
    }
  CHECK(inside_nonzero > 0);

  // left-image changes appear only at pixels whose correspondence is patched
  const auto [ladv, radv] = apply_perturbation(scene.left, scene.right, scene.gt, scene.occl,
                                               res.pert);
  for (int y = 0; y < scene.spec.height; ++y)
    for (int x = 0; x < scene.spec.width; ++x) {
      if (ladv.at(x, y) == scene.left.at(x, y)) continue;
      REQUIRE_FALSE(scene.occl.at(x, y));
      const int xr = static_cast<int>(std::lround(x - scene.gt.at(x, y)));
      REQUIRE(rect.contains(xr, y));
    }

  Rect outside{40, 20, 20, 20};
  CHECK_THROWS_AS(patch_attack(scene.left, scene.right, scene.gt, scene.occl, outside, cfg),
                  std::invalid_argument);
}

TEST_CASE("unconstrained attack keeps independent feasible fields") {
  const SyntheticScene scene = scene_with_occlusion(13);
  AttackConfig cfg = cheap_attack(Descriptor::sad, 4);
  cfg.mode = AttackMode::unconstrained;
  const UnconstrainedResult res = unconstrained_pgd(scene.left, scene.right, scene.gt, cfg);

  REQUIRE(res.loss_trace.size() == 5);
  CHECK(res.pert_left.max_abs() <= cfg.eps + 1e-15);
  CHECK(res.pert_right.max_abs() <= cfg.eps + 1e-15);
  CHECK(res.pert_left.max_abs() > 0.0);
  for (int y = 0; y < scene.spec.height; ++y)
    for (int x = 0; x < scene.spec.width; ++x) {
      CHECK(scene.left.at(x, y) + res.pert_left.at(x, y) >= 0.0);
      CHECK(scene.left.at(x, y) + res.pert_left.at(x, y) <= 1.0);
      CHECK(scene.right.at(x, y) + res.pert_right.at(x, y) >= 0.0);
      CHECK(scene.right.at(x, y) + res.pert_right.at(x, y) <= 1.0);
    }
  // the two fields differ: without the constraint they are free to diverge
  CHECK(res.pert_left.data != res.pert_right.data);
}

TEST_CASE("attack configuration validation") {
  const SyntheticScene scene = scene_with_occlusion(15);
  AttackConfig cfg = cheap_attack(Descriptor::sad);
  cfg.eps = 0.0;
  CHECK_THROWS_AS(pgd_attack(scene.left, scene.right, scene.gt, scene.occl, cfg),
                  std::invalid_argument);
  cfg.eps = 1.5;
  CHECK_THROWS_AS(pgd_attack(scene.left, scene.right, scene.gt, scene.occl, cfg),
                  std::invalid_argument);
  cfg = cheap_attack(Descriptor::sad);
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(pgd_attack(scene.left, scene.right, scene.gt, scene.occl, cfg),
                  std::invalid_argument);
  cfg = cheap_attack(Descriptor::sad);
  cfg.steps = 0;
  CHECK_THROWS_AS(pgd_attack(scene.left, scene.right, scene.gt, scene.occl, cfg),
                  std::invalid_argument);
  cfg = cheap_attack(Descriptor::sad);
  cfg.mode = AttackMode::unconstrained;
  CHECK_THROWS_AS(pgd_attack(scene.left, scene.right, scene.gt, scene.occl, cfg),
                  std::invalid_argument);

  CHECK(parse_attack_mode("constrained") == AttackMode::constrained);
  CHECK(parse_attack_mode("patch") == AttackMode::patch);
  CHECK_THROWS_AS(parse_attack_mode("mystery"), std::invalid_argument);
  CHECK(std::string(attack_mode_name(AttackMode::unconstrained)) == "unconstrained");
}
