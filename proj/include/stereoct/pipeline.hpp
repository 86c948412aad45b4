#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "stereoct/image.hpp"
#include "stereoct/matcher.hpp"

namespace stereoct {

enum class Descriptor { census_hard, census_soft, sad };

Descriptor parse_descriptor(const std::string& name);
const char* descriptor_name(Descriptor d);

inline std::vector<int> default_scales() { return {3, 5, 7, 9, 11}; }

/// Everything that determines the map from a perturbation to the attack
/// loss: descriptor choice, census scales, disparity range, sigmoid
/// steepness of the soft census, and the soft matcher parameters.
struct PipelineConfig {
  Descriptor descriptor = Descriptor::census_soft;
  std::vector<int> scales = default_scales();
  int max_disp = 192;
  double steepness = 1e5;
  SoftMatchParams match;

  bool differentiable() const { return descriptor != Descriptor::census_hard; }

  void validate() const {
    require(max_disp >= 1, "max_disp must be >= 1");
    require(steepness > 0.0, "steepness must be positive");
    validate_scales(scales);
    match.validate();
  }
};

/// Scalar perturbation field in right-image coordinates. |data| <= eps
/// everywhere once clipped; for patch attacks, support marks the patch and
/// the field is identically zero outside it.
struct PerturbationMap {
  int width = 0;
  int height = 0;
  std::vector<double> data;
  double eps = 0.0;
  std::optional<Mask> support;

  PerturbationMap() = default;
  PerturbationMap(int w, int h, double eps_)
      : width(w), height(h), data(static_cast<size_t>(w) * h, 0.0), eps(eps_) {}

  double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  double max_abs() const {
    double m = 0.0;
    for (double v : data) m = std::max(m, v < 0 ? -v : v);
    return m;
  }
};

}  // namespace stereoct
