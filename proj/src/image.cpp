#include "progseg/image.hpp"

#include <algorithm>
#include <cstring>

namespace progseg {

MultispectralImage::MultispectralImage(int h, int w, std::vector<BandId> b, ValueDomain domain)
    : height(h),
      width(w),
      bands(canonicalize_bands(std::move(b))),
      data(static_cast<std::size_t>(h) * w * bands.size(), 0.0f),
      value_domain(domain) {}

int MultispectralImage::index_of(BandId b) const {
    auto it = std::find(bands.begin(), bands.end(), b);
    return it == bands.end() ? -1 : static_cast<int>(it - bands.begin());
}

void MultispectralImage::validate() const {
    if (height <= 0 || width <= 0) throw DimensionMismatch("image has empty dimensions");
    if (bands.empty()) throw DimensionMismatch("image has no bands");
    for (std::size_t i = 1; i < bands.size(); ++i)
        if (!(bands[i - 1] < bands[i]))
            throw InvalidArgument("band list not in canonical order or has duplicates");
    if (data.size() != plane_size() * bands.size())
        throw DimensionMismatch("image data size does not match H*W*C");
    if (value_domain == ValueDomain::UNIT_NORMALIZED) {
        for (float x : data)
            if (!(x >= 0.0f && x <= 1.0f))
                throw InvalidArgument("unit-normalized image has values outside [0,1]");
    }
}

void LabelMask::validate() const {
    if (height <= 0 || width <= 0) throw DimensionMismatch("mask has empty dimensions");
    if (data.size() != static_cast<std::size_t>(height) * width)
        throw DimensionMismatch("mask data size does not match H*W");
    for (std::uint8_t v : data)
        if (v >= kNumClasses) throw OutOfRangeClass("mask class code out of range");
}

MultispectralImage select_bands(const MultispectralImage& img, const std::vector<BandId>& subset) {
    std::vector<BandId> wanted = canonicalize_bands(subset);
    MultispectralImage out(img.height, img.width, wanted, img.value_domain);
    out.resolution_m = img.resolution_m;
    for (std::size_t i = 0; i < wanted.size(); ++i) {
        int src = img.index_of(wanted[i]);
        if (src < 0) throw MissingBand(std::string("image lacks band ") + band_name(wanted[i]));
        std::memcpy(out.band_plane(static_cast<int>(i)), img.band_plane(src),
                    img.plane_size() * sizeof(float));
    }
    return out;
}

}  // namespace progseg
