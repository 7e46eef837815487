#pragma once

#include <cstdint>
#include <vector>

#include "progseg/bands.hpp"
#include "progseg/errors.hpp"

namespace progseg {

enum class ValueDomain : std::uint8_t {
    RAW_REFLECTANCE = 0,
    UNIT_NORMALIZED = 1,
};

// Pixel classes. OTHER doubles as background fill.
enum : std::uint8_t {
    kClassOther = 0,
    kClassFlood = 1,
    kClassSprinkler = 2,
};
inline constexpr int kNumClasses = 3;

// H×W×C raster held as C contiguous H×W band planes, bands in canonical
// order. Planar storage keeps band selection and per-band statistics cheap.
struct MultispectralImage {
    int height = 0;
    int width = 0;
    std::vector<BandId> bands;           // canonical order, no duplicates
    std::vector<float> data;             // bands.size() planes of height*width
    float resolution_m = 30.0f;
    ValueDomain value_domain = ValueDomain::RAW_REFLECTANCE;

    MultispectralImage() = default;
    MultispectralImage(int h, int w, std::vector<BandId> b,
                       ValueDomain domain = ValueDomain::RAW_REFLECTANCE);

    int channels() const { return static_cast<int>(bands.size()); }
    std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }

    float* band_plane(int band_index) { return data.data() + band_index * plane_size(); }
    const float* band_plane(int band_index) const { return data.data() + band_index * plane_size(); }

    // Index of a band in this image, or -1.
    int index_of(BandId b) const;

    // Throws on any broken invariant (duplicate/unordered bands, size
    // mismatch, out-of-range values for UNIT_NORMALIZED).
    void validate() const;
};

// H×W per-pixel class codes in {0,1,2}.
struct LabelMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data;

    LabelMask() = default;
    LabelMask(int h, int w, std::uint8_t fill = kClassOther)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}

    bool empty() const { return data.empty(); }
    std::uint8_t& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }

    void validate() const;
};

// Co-registered square window of an image/mask pair.
struct Patch {
    MultispectralImage image;
    LabelMask mask;
    int tile_id = 0;
    int row_off = 0;
    int col_off = 0;
    int size = 0;
};

// Extracts a band subset (deep copy), result in canonical order.
MultispectralImage select_bands(const MultispectralImage& img, const std::vector<BandId>& subset);

}  // namespace progseg
