#pragma once

#include <array>
#include <string>
#include <vector>

#include "stereospoof/image.hpp"

namespace stereospoof {

// Binary netpbm and PFM readers/writers. All throw IoError on failure.
//
// PPM: P6, maxval 255.  PGM: P5, maxval 255.
// PFM: "Pf" single-channel float32, little-endian (negative scale header),
// scanlines stored bottom-up per the format convention.
//
// PFM carries no validity mask, so maps use in-band sentinels:
// disparity maps mark invalid pixels as -1.0 (real disparities are >= 0),
// depth maps mark invalid pixels as 0.0 (valid depths are strictly positive).

void write_ppm(const std::string& path, const ImageRgb8& img);
ImageRgb8 read_ppm(const std::string& path);

void write_pgm(const std::string& path, const ImageGray8& img);
ImageGray8 read_pgm(const std::string& path);

void write_pfm(const std::string& path, const Plane<float>& img);
Plane<float> read_pfm(const std::string& path);

// ASCII PLY with float x,y,z vertex properties.
void write_ply(const std::string& path, const std::vector<std::array<double, 3>>& points);

}  // namespace stereospoof
