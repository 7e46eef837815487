#pragma once

#include <array>
#include <string>
#include <vector>

namespace progseg {

// Spectral bands in canonical order. Images and checkpoints always keep
// their band lists sorted in this order.
enum class BandId : std::uint8_t {
    BLUE = 0,
    GREEN = 1,
    RED = 2,
    SWIR1 = 3,
    SWIR2 = 4,
    NIR = 5,
    THERMAL = 6,
};

inline constexpr int kNumBands = 7;

inline constexpr std::array<BandId, kNumBands> kCanonicalBands = {
    BandId::BLUE,  BandId::GREEN, BandId::RED,     BandId::SWIR1,
    BandId::SWIR2, BandId::NIR,   BandId::THERMAL,
};

const char* band_name(BandId b);

// Short label used in experiment names and CLI strings (R, G, B, N, S1, S2, Th).
const char* band_letter(BandId b);

BandId band_from_name(const std::string& name);

// Sorts into canonical order; throws InvalidArgument on duplicates.
std::vector<BandId> canonicalize_bands(std::vector<BandId> bands);

// Parses "RGBNS1S2", "RGB", "BLUE,GREEN,RED", etc.
std::vector<BandId> parse_band_set(const std::string& text);

// Compact label in conventional R,G,B,N,S1,S2,Th display order.
std::string band_set_label(const std::vector<BandId>& bands);

// JSON-friendly full names in the bands' stored order.
std::vector<std::string> band_names(const std::vector<BandId>& bands);

}  // namespace progseg
