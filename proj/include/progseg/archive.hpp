#pragma once

#include <optional>
#include <string>

#include "progseg/image.hpp"

namespace progseg {

// PSEG container: a little-endian raster archive that needs no geospatial
// stack. Layout (all integers little-endian):
//
//   bytes 0..3   magic "PSEG"
//   u32          version (1)
//   u32 u32 u32  H, W, C
//   u8[C]        band codes (BandId values)
//   u8           value domain (0 raw reflectance, 1 unit normalized)
//   u8           mask flag (0/1)
//   f32          resolution in meters per pixel
//   f32[C*H*W]   band planes, canonical band order, row-major
//   u8[H*W]      mask payload, present iff mask flag is 1
struct ArchiveContent {
    MultispectralImage image;
    std::optional<LabelMask> mask;
};

void save_archive(const std::string& path, const MultispectralImage& image,
                  const LabelMask* mask = nullptr);

ArchiveContent load_archive(const std::string& path);

bool is_archive_file(const std::string& path);

}  // namespace progseg
