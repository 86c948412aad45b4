#pragma once

#include <vector>

namespace stereoct {

// Spatial box filtering of a multi-channel plane stored (y, x, c) with
// channels innermost. Windows are clipped at the frame border; the mean
// variant divides by the clipped window area. box_sum_channels is the
// unnormalized sum, which is its own spatial transpose.

std::vector<double> box_sum_channels(const std::vector<double>& in, int width, int height,
                                     int channels, int window);

std::vector<double> box_mean_channels(const std::vector<double>& in, int width, int height,
                                      int channels, int window);

/// Clipped window area per pixel for the given odd window size.
std::vector<double> box_counts(int width, int height, int window);

}  // namespace stereoct
