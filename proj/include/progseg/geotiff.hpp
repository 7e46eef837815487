#pragma once

#include <string>

#include "progseg/image.hpp"

namespace progseg {

// Minimal TIFF codec: uncompressed, little-endian, strip-based. Images are
// written as float32 planar bands with band identities and the value domain
// recorded as JSON in ImageDescription, plus ModelPixelScale for the ground
// resolution. Masks are separate single-band uint8 files. The reader also
// accepts pixel-interleaved (chunky) layouts produced by other writers.
void save_geotiff(const std::string& path, const MultispectralImage& image);
MultispectralImage load_geotiff(const std::string& path);

void save_geotiff_mask(const std::string& path, const LabelMask& mask, float resolution_m = 30.0f);
LabelMask load_geotiff_mask(const std::string& path);

bool is_tiff_file(const std::string& path);

}  // namespace progseg
