#include "progseg/pngio.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <vector>

#include "progseg/errors.hpp"

namespace progseg {

namespace {

void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               const std::vector<std::uint8_t>& payload) {
    put_u32be(out, static_cast<std::uint32_t>(payload.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    const auto crc = crc32(0, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
    put_u32be(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

void write_png_rgba(const std::string& path, int height, int width, const std::uint8_t* rgba) {
    // Filter type 0 on every scanline, zlib-compressed in one stream.
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(height) * (static_cast<std::size_t>(width) * 4 + 1));
    for (int y = 0; y < height; ++y) {
        raw.push_back(0);
        const std::uint8_t* row = rgba + static_cast<std::size_t>(y) * width * 4;
        raw.insert(raw.end(), row, row + static_cast<std::size_t>(width) * 4);
    }
    uLongf comp_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> comp(comp_size);
    if (compress2(comp.data(), &comp_size, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw IoError("png compression failed");
    comp.resize(comp_size);

    std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<std::uint8_t> ihdr;
    put_u32be(ihdr, static_cast<std::uint32_t>(width));
    put_u32be(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(6);   // RGBA
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", comp);
    put_chunk(out, "IEND", {});

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!os) throw IoError("png write failed: " + path);
}

void write_mask_png(const std::string& path, const LabelMask& mask) {
    std::vector<std::uint8_t> rgba(static_cast<std::size_t>(mask.height) * mask.width * 4);
    for (std::size_t i = 0; i < mask.data.size(); ++i) {
        const auto& color = kClassPalette[mask.data[i] < kNumClasses ? mask.data[i] : 0];
        std::memcpy(rgba.data() + i * 4, color.data(), 4);
    }
    write_png_rgba(path, mask.height, mask.width, rgba.data());
}

void write_band_png(const std::string& path, const MultispectralImage& img, BandId band) {
    const int bi = img.index_of(band);
    if (bi < 0) throw MissingBand(std::string("image lacks band ") + band_name(band));
    const float* plane = img.band_plane(bi);
    std::vector<std::uint8_t> rgba(img.plane_size() * 4);
    for (std::size_t i = 0; i < img.plane_size(); ++i) {
        float v = plane[i];
        v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
        const auto g = static_cast<std::uint8_t>(v * 255.0f + 0.5f);
        rgba[i * 4 + 0] = g;
        rgba[i * 4 + 1] = g;
        rgba[i * 4 + 2] = g;
        rgba[i * 4 + 3] = 255;
    }
    write_png_rgba(path, img.height, img.width, rgba.data());
}

}  // namespace progseg
