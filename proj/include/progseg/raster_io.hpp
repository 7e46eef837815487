#pragma once

#include <string>
#include <vector>

#include "progseg/image.hpp"

namespace progseg {

enum class RasterFormat { GEOTIFF, ARCHIVE };

// Loads a raster from a PSEG archive or a TIFF, detected by magic bytes, and
// returns exactly expected_bands in canonical order. An empty expected list
// means "all bands in the file".
MultispectralImage load_raster(const std::string& path, const std::vector<BandId>& expected_bands);

void save_raster(const MultispectralImage& img, const std::string& path, RasterFormat format);

LabelMask load_mask(const std::string& path);
void save_mask(const LabelMask& mask, const std::string& path, RasterFormat format);

}  // namespace progseg
