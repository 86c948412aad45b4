#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stereoct/image.hpp"

namespace stereoct {

/// Reads a binary PGM ("P5") with maxval 255 or 65535. Intensities are
/// scaled by 1/maxval into [0,1]. Malformed files raise std::runtime_error
/// naming the byte offset.
GrayImage read_pgm(const std::string& path);

/// Writes a binary PGM. maxval must be 255 or 65535; intensities are
/// clamped to [0,1] and rounded to the nearest level.
void write_pgm(const GrayImage& img, const std::string& path, int maxval = 65535);

/// Reads a single-channel PFM ("Pf"). Rows are stored bottom-up in the file
/// and flipped to top-down on read; the scale line's sign encodes endianness.
/// Non-finite or negative values are marked invalid.
DisparityMap read_pfm(const std::string& path);

/// Writes a single-channel PFM, scale -1 (little-endian), rows bottom-up.
/// Invalid pixels are written as -1.0. Values are stored as 32-bit floats,
/// so read_pfm(write_pfm(m)) == m bit-exactly for float-representable data.
void write_pfm(const DisparityMap& map, const std::string& path);

/// PFM round-trip for arbitrary real fields (e.g. perturbation maps):
/// no validity convention, values stored verbatim as float32.
void write_pfm_raw(const std::vector<double>& values, int width, int height,
                   const std::string& path);
std::vector<double> read_pfm_raw(const std::string& path, int& width, int& height);

/// Reads a KITTI 2015 disparity PNG: 16-bit single-channel, disparity =
/// raw/256.0, raw 0 marks invalid (sparse LiDAR ground truth).
DisparityMap read_kitti_disparity(const std::string& path);

/// Rec.601 luma of one RGB triplet, all channels in [0,1].
double luma(double r, double g, double b);

/// Collapses planar RGB channels to a grayscale image via Rec.601 luma.
GrayImage to_gray(const std::vector<double>& r, const std::vector<double>& g,
                  const std::vector<double>& b, int width, int height);

/// 0/255 mask round-trip through 8-bit PGM (255 = set).
void write_mask_pgm(const Mask& mask, const std::string& path);
Mask read_mask_pgm(const std::string& path);

/// Binary PPM ("P6") writer for pseudo-color renderings; rgb holds
/// 3 bytes per pixel, row-major.
void write_ppm(const std::vector<uint8_t>& rgb, int width, int height,
               const std::string& path);

/// Jet-style pseudo-color rendering of a disparity map scaled by max_disp;
/// invalid pixels come out black.
void render_disparity_ppm(const DisparityMap& map, int max_disp, const std::string& path);

}  // namespace stereoct
