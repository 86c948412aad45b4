#include "stereoct/synth.hpp"

#include <algorithm>
#include <cmath>

#include "stereoct/matcher.hpp"
#include "stereoct/rng.hpp"

namespace stereoct {

namespace {

double disparity_at(const SceneSpec& spec, int x, int y) {
  switch (spec.kind) {
    case SceneKind::plane:
      return spec.d0;
    case SceneKind::slant: {
      const double d = spec.d0 + spec.sx * x + spec.sy * y;
      const double clamped = std::max(0.0, d);
      return spec.subpixel ? clamped : static_cast<double>(std::lround(clamped));
    }
    case SceneKind::step: {
      const int xb = spec.step_x >= 0 ? spec.step_x : spec.width / 2;
      return x < xb ? spec.d0 : spec.d1;
    }
  }
  return 0.0;
}

// Texture draws are snapped to 16-bit PGM levels so a scene written to disk
// and read back is bit-identical to the in-memory one.
double quantized(double v) { return std::round(v * 65535.0) * (1.0 / 65535.0); }

double sample_right(const GrayImage& right, double xr, int y) {
  // Non-occluded guarantees round(xr) is in frame; clamp covers the
  // fractional half-pixel overhang in subpixel mode.
  xr = std::clamp(xr, 0.0, right.width - 1.0);
  const int x0 = static_cast<int>(std::floor(xr));
  const double t = xr - x0;
  if (t == 0.0) return right.at(x0, y);
  const int x1 = std::min(x0 + 1, right.width - 1);
  return (1.0 - t) * right.at(x0, y) + t * right.at(x1, y);
}

}  // namespace

SyntheticScene make_scene(const SceneSpec& spec) {
  require(spec.width > 0 && spec.height > 0, "scene dimensions must be positive");
  require(0.0 <= spec.tex_lo && spec.tex_lo < spec.tex_hi && spec.tex_hi <= 1.0,
          "texture range must satisfy 0 <= lo < hi <= 1");

  SyntheticScene scene;
  scene.spec = spec;
  scene.gt = DisparityMap(spec.width, spec.height, 0.0, true);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const double d = disparity_at(spec, x, y);
      require(d >= 0.0 && d < spec.width, "scene disparity out of range");
      scene.gt.at(x, y) = d;
    }
  }
  scene.occl = occlusion_mask(scene.gt);

  SplitMix64 rng(spec.seed);
  scene.right = GrayImage(spec.width, spec.height);
  for (double& v : scene.right.data) v = quantized(rng.uniform(spec.tex_lo, spec.tex_hi));

  scene.left = GrayImage(spec.width, spec.height);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      if (scene.occl.at(x, y)) {
        scene.left.at(x, y) = quantized(rng.uniform(spec.tex_lo, spec.tex_hi));
      } else {
        scene.left.at(x, y) = sample_right(scene.right, x - scene.gt.at(x, y), y);
      }
    }
  }
  return scene;
}

SceneKind parse_scene_kind(const std::string& name) {
  if (name == "plane") return SceneKind::plane;
  if (name == "slant") return SceneKind::slant;
  if (name == "step") return SceneKind::step;
  throw std::invalid_argument("unknown scene kind: " + name);
}

const char* scene_kind_name(SceneKind kind) {
  switch (kind) {
    case SceneKind::plane: return "plane";
    case SceneKind::slant: return "slant";
    case SceneKind::step: return "step";
  }
  return "?";
}

}  // namespace stereoct
