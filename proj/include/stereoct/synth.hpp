#pragma once

#include <cstdint>
#include <string>

#include "stereoct/image.hpp"

namespace stereoct {

enum class SceneKind { plane, slant, step };

// Random-dot stereo scene description. Disparity fields:
//   plane: D = d0 everywhere
//   slant: D = round(d0 + sx*x + sy*y), clamped to >= 0
//   step:  D = d0 for x < step_x, d1 for x >= step_x (foreground on the right)
struct SceneSpec {
  int width = 64;
  int height = 48;
  SceneKind kind = SceneKind::plane;
  double d0 = 5.0;
  double d1 = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  int step_x = -1;  // default: width / 2
  double tex_lo = 0.0;
  double tex_hi = 1.0;
  uint64_t seed = 1;
  bool subpixel = false;  // keep slant disparities fractional (inexact warp)
};

struct SyntheticScene {
  GrayImage left;
  GrayImage right;
  DisparityMap gt;
  Mask occl;
  SceneSpec spec;
};

// Builds a scene whose ground truth is exact by construction: the right image
// is seeded uniform texture, the left image copies right(x - D, y) wherever
// that point is visible, and occluded or out-of-frame pixels get fresh noise.
SyntheticScene make_scene(const SceneSpec& spec);

SceneKind parse_scene_kind(const std::string& name);
const char* scene_kind_name(SceneKind kind);

}  // namespace stereoct
