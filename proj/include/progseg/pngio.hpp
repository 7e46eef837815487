#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "progseg/image.hpp"

namespace progseg {

// RGBA palette for rendered class masks: flood red, sprinkler yellow,
// other fully transparent.
inline constexpr std::array<std::array<std::uint8_t, 4>, kNumClasses> kClassPalette = {{
    {0, 0, 0, 0},        // OTHER
    {220, 20, 20, 255},  // FLOOD
    {250, 220, 20, 255}, // SPRINKLER
}};

// Writes an RGBA PNG. `rgba` is H*W*4 bytes, row-major.
void write_png_rgba(const std::string& path, int height, int width, const std::uint8_t* rgba);

// Renders a class mask through kClassPalette.
void write_mask_png(const std::string& path, const LabelMask& mask);

// Grayscale preview of a single band, values clamped to [0,1].
void write_band_png(const std::string& path, const MultispectralImage& img, BandId band);

}  // namespace progseg
