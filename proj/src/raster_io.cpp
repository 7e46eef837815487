#include "progseg/raster_io.hpp"

#include <filesystem>

#include "progseg/archive.hpp"
#include "progseg/geotiff.hpp"

namespace progseg {

MultispectralImage load_raster(const std::string& path,
                               const std::vector<BandId>& expected_bands) {
    if (!std::filesystem::exists(path)) throw IoError("no such file: " + path);
    MultispectralImage img;
    if (is_archive_file(path)) {
        img = load_archive(path).image;
    } else if (is_tiff_file(path)) {
        img = load_geotiff(path);
    } else {
        throw CorruptFile("unrecognized raster format: " + path);
    }
    if (expected_bands.empty()) return img;
    return select_bands(img, expected_bands);
}

void save_raster(const MultispectralImage& img, const std::string& path, RasterFormat format) {
    if (format == RasterFormat::ARCHIVE)
        save_archive(path, img);
    else
        save_geotiff(path, img);
}

LabelMask load_mask(const std::string& path) {
    if (!std::filesystem::exists(path)) throw IoError("no such file: " + path);
    if (is_archive_file(path)) {
        auto content = load_archive(path);
        if (!content.mask) throw CorruptFile("archive carries no mask payload: " + path);
        return *content.mask;
    }
    if (is_tiff_file(path)) return load_geotiff_mask(path);
    throw CorruptFile("unrecognized mask format: " + path);
}

void save_mask(const LabelMask& mask, const std::string& path, RasterFormat format) {
    if (format == RasterFormat::GEOTIFF) {
        save_geotiff_mask(path, mask);
        return;
    }
    // Archive masks ride alongside an image payload; a mask-only file is
    // stored as a single-band zero image plus the mask.
    MultispectralImage stub(mask.height, mask.width, {BandId::BLUE});
    save_archive(path, stub, &mask);
}

}  // namespace progseg
