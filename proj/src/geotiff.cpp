#include "progseg/geotiff.hpp"

#include <cstring>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

namespace progseg {

namespace {

enum : std::uint16_t {
    kTagImageWidth = 256,
    kTagImageLength = 257,
    kTagBitsPerSample = 258,
    kTagCompression = 259,
    kTagPhotometric = 262,
    kTagImageDescription = 270,
    kTagStripOffsets = 273,
    kTagSamplesPerPixel = 277,
    kTagRowsPerStrip = 278,
    kTagStripByteCounts = 279,
    kTagPlanarConfig = 284,
    kTagSampleFormat = 339,
    kTagModelPixelScale = 33550,
};

enum : std::uint16_t {
    kTypeByte = 1,
    kTypeAscii = 2,
    kTypeShort = 3,
    kTypeLong = 4,
    kTypeFloat = 11,
    kTypeDouble = 12,
};

struct IfdEntry {
    std::uint16_t tag = 0;
    std::uint16_t type = 0;
    std::uint32_t count = 0;
    std::uint32_t value = 0;  // inline value or file offset
};

class TiffWriter {
public:
    explicit TiffWriter(const std::string& path) : os_(path, std::ios::binary | std::ios::trunc) {
        if (!os_) throw IoError("cannot open for writing: " + path);
    }

    void add_short(std::uint16_t tag, std::uint16_t v) { entries_[tag] = {tag, kTypeShort, 1, v}; }
    void add_long(std::uint16_t tag, std::uint32_t v) { entries_[tag] = {tag, kTypeLong, 1, v}; }

    void add_shorts(std::uint16_t tag, const std::vector<std::uint16_t>& v) {
        if (v.size() == 1) {
            add_short(tag, v[0]);
        } else if (v.size() == 2) {
            entries_[tag] = {tag, kTypeShort, 2,
                             static_cast<std::uint32_t>(v[0]) |
                                 (static_cast<std::uint32_t>(v[1]) << 16)};
        } else {
            entries_[tag] = {tag, kTypeShort, static_cast<std::uint32_t>(v.size()),
                             defer(v.data(), v.size() * 2)};
        }
    }

    void add_longs(std::uint16_t tag, const std::vector<std::uint32_t>& v) {
        if (v.size() == 1)
            add_long(tag, v[0]);
        else
            entries_[tag] = {tag, kTypeLong, static_cast<std::uint32_t>(v.size()),
                             defer(v.data(), v.size() * 4)};
    }

    void add_ascii(std::uint16_t tag, const std::string& s) {
        std::string z = s;
        z.push_back('\0');
        entries_[tag] = {tag, kTypeAscii, static_cast<std::uint32_t>(z.size()),
                         defer(z.data(), z.size())};
    }

    void add_doubles(std::uint16_t tag, const std::vector<double>& v) {
        entries_[tag] = {tag, kTypeDouble, static_cast<std::uint32_t>(v.size()),
                         defer(v.data(), v.size() * 8)};
    }

    // Reserves space for pixel data and returns its file offset.
    std::uint32_t reserve_pixels(std::size_t bytes) {
        const std::uint32_t off = cursor_;
        cursor_ += static_cast<std::uint32_t>((bytes + 1) & ~std::size_t{1});
        return off;
    }

    void finish(const void* pixels, std::size_t pixel_bytes, std::uint32_t pixel_offset) {
        const std::uint32_t ifd_offset = cursor_;
        char header[8] = {'I', 'I', 42, 0, 0, 0, 0, 0};
        std::memcpy(header + 4, &ifd_offset, 4);
        os_.write(header, 8);
        os_.write(heap_.data(), static_cast<std::streamsize>(heap_.size()));
        // Heap is padded so pixel data starts exactly at pixel_offset.
        if (8 + heap_.size() != pixel_offset) throw IoError("tiff layout bug");
        os_.write(reinterpret_cast<const char*>(pixels), static_cast<std::streamsize>(pixel_bytes));
        if (pixel_bytes & 1) os_.put('\0');

        const std::uint16_t n = static_cast<std::uint16_t>(entries_.size());
        os_.write(reinterpret_cast<const char*>(&n), 2);
        for (const auto& [tag, e] : entries_) {
            os_.write(reinterpret_cast<const char*>(&e.tag), 2);
            os_.write(reinterpret_cast<const char*>(&e.type), 2);
            os_.write(reinterpret_cast<const char*>(&e.count), 4);
            os_.write(reinterpret_cast<const char*>(&e.value), 4);
        }
        const std::uint32_t next = 0;
        os_.write(reinterpret_cast<const char*>(&next), 4);
        if (!os_) throw IoError("tiff write failed");
    }

private:
    std::uint32_t defer(const void* data, std::size_t bytes) {
        const std::uint32_t off = cursor_;
        heap_.insert(heap_.end(), static_cast<const char*>(data),
                     static_cast<const char*>(data) + bytes);
        if (bytes & 1) heap_.push_back('\0');
        cursor_ += static_cast<std::uint32_t>((bytes + 1) & ~std::size_t{1});
        return off;
    }

    std::ofstream os_;
    std::map<std::uint16_t, IfdEntry> entries_;  // tags must be ascending
    std::vector<char> heap_;
    std::uint32_t cursor_ = 8;
};

struct TiffInfo {
    std::uint32_t width = 0, height = 0;
    std::uint16_t samples = 1;
    std::uint16_t bits = 8;
    std::uint16_t sample_format = 1;
    std::uint16_t planar = 1;
    std::uint32_t rows_per_strip = 0;
    std::vector<std::uint32_t> strip_offsets, strip_counts;
    std::string description;
    double pixel_scale = 0.0;
};

class TiffReader {
public:
    explicit TiffReader(const std::string& path) : is_(path, std::ios::binary) {
        if (!is_) throw IoError("cannot open: " + path);
        char header[8];
        is_.read(header, 8);
        if (!is_ || header[0] != 'I' || header[1] != 'I' || header[2] != 42)
            throw CorruptFile("not a little-endian TIFF: " + path);
        std::uint32_t ifd;
        std::memcpy(&ifd, header + 4, 4);
        parse_ifd(ifd);
    }

    const TiffInfo& info() const { return info_; }

    std::vector<char> read_strips() {
        std::vector<char> out;
        for (std::size_t i = 0; i < info_.strip_offsets.size(); ++i) {
            const std::size_t pos = out.size();
            out.resize(pos + info_.strip_counts[i]);
            is_.seekg(info_.strip_offsets[i]);
            is_.read(out.data() + pos, info_.strip_counts[i]);
            if (!is_) throw CorruptFile("tiff strip truncated");
        }
        return out;
    }

private:
    void parse_ifd(std::uint32_t offset) {
        is_.seekg(offset);
        std::uint16_t n;
        is_.read(reinterpret_cast<char*>(&n), 2);
        if (!is_) throw CorruptFile("tiff IFD truncated");
        for (int i = 0; i < n; ++i) {
            IfdEntry e;
            is_.read(reinterpret_cast<char*>(&e.tag), 2);
            is_.read(reinterpret_cast<char*>(&e.type), 2);
            is_.read(reinterpret_cast<char*>(&e.count), 4);
            is_.read(reinterpret_cast<char*>(&e.value), 4);
            if (!is_) throw CorruptFile("tiff IFD truncated");
            const auto pos = is_.tellg();
            apply(e);
            is_.seekg(pos);
        }
    }

    std::vector<std::uint32_t> read_ints(const IfdEntry& e) {
        const std::size_t elem = e.type == kTypeShort ? 2 : 4;
        std::vector<std::uint32_t> vals(e.count);
        std::vector<char> raw(elem * e.count);
        if (raw.size() <= 4) {
            std::memcpy(raw.data(), &e.value, raw.size());
        } else {
            is_.seekg(e.value);
            is_.read(raw.data(), static_cast<std::streamsize>(raw.size()));
            if (!is_) throw CorruptFile("tiff tag data truncated");
        }
        for (std::uint32_t i = 0; i < e.count; ++i) {
            if (e.type == kTypeShort) {
                std::uint16_t v;
                std::memcpy(&v, raw.data() + i * 2, 2);
                vals[i] = v;
            } else {
                std::memcpy(&vals[i], raw.data() + i * 4, 4);
            }
        }
        return vals;
    }

    void apply(const IfdEntry& e) {
        switch (e.tag) {
            case kTagImageWidth: info_.width = read_ints(e)[0]; break;
            case kTagImageLength: info_.height = read_ints(e)[0]; break;
            case kTagBitsPerSample: info_.bits = static_cast<std::uint16_t>(read_ints(e)[0]); break;
            case kTagCompression:
                if (read_ints(e)[0] != 1) throw CorruptFile("compressed TIFF not supported");
                break;
            case kTagImageDescription: {
                std::string s(e.count, '\0');
                if (e.count <= 4) {
                    std::memcpy(s.data(), &e.value, e.count);
                } else {
                    is_.seekg(e.value);
                    is_.read(s.data(), e.count);
                }
                while (!s.empty() && s.back() == '\0') s.pop_back();
                info_.description = s;
                break;
            }
            case kTagStripOffsets: info_.strip_offsets = read_ints(e); break;
            case kTagSamplesPerPixel:
                info_.samples = static_cast<std::uint16_t>(read_ints(e)[0]);
                break;
            case kTagRowsPerStrip: info_.rows_per_strip = read_ints(e)[0]; break;
            case kTagStripByteCounts: info_.strip_counts = read_ints(e); break;
            case kTagPlanarConfig:
                info_.planar = static_cast<std::uint16_t>(read_ints(e)[0]);
                break;
            case kTagSampleFormat:
                info_.sample_format = static_cast<std::uint16_t>(read_ints(e)[0]);
                break;
            case kTagModelPixelScale: {
                if (e.type == kTypeDouble && e.count >= 1) {
                    is_.seekg(e.value);
                    double v;
                    is_.read(reinterpret_cast<char*>(&v), 8);
                    if (is_) info_.pixel_scale = v;
                }
                break;
            }
            default: break;
        }
    }

    std::ifstream is_;
    TiffInfo info_;
};

std::string describe(const MultispectralImage& img) {
    nlohmann::ordered_json j;
    j["bands"] = band_names(img.bands);
    j["value_domain"] =
        img.value_domain == ValueDomain::UNIT_NORMALIZED ? "UNIT_NORMALIZED" : "RAW_REFLECTANCE";
    return j.dump();
}

}  // namespace

void save_geotiff(const std::string& path, const MultispectralImage& image) {
    image.validate();
    const std::uint32_t h = static_cast<std::uint32_t>(image.height);
    const std::uint32_t w = static_cast<std::uint32_t>(image.width);
    const std::uint16_t c = static_cast<std::uint16_t>(image.channels());
    const std::size_t plane_bytes = image.plane_size() * sizeof(float);

    TiffWriter tw(path);
    tw.add_long(kTagImageWidth, w);
    tw.add_long(kTagImageLength, h);
    tw.add_shorts(kTagBitsPerSample, std::vector<std::uint16_t>(c, 32));
    tw.add_short(kTagCompression, 1);
    tw.add_short(kTagPhotometric, 1);
    tw.add_ascii(kTagImageDescription, describe(image));
    tw.add_short(kTagSamplesPerPixel, c);
    tw.add_long(kTagRowsPerStrip, h);
    tw.add_short(kTagPlanarConfig, 2);  // one strip per band plane
    tw.add_shorts(kTagSampleFormat, std::vector<std::uint16_t>(c, 3));
    tw.add_doubles(kTagModelPixelScale,
                   {static_cast<double>(image.resolution_m),
                    static_cast<double>(image.resolution_m), 0.0});
    std::vector<std::uint32_t> counts(c, static_cast<std::uint32_t>(plane_bytes));
    tw.add_longs(kTagStripByteCounts, counts);
    const std::uint32_t pix = tw.reserve_pixels(plane_bytes * c);
    std::vector<std::uint32_t> offsets(c);
    for (std::uint16_t i = 0; i < c; ++i)
        offsets[i] = pix + static_cast<std::uint32_t>(i * plane_bytes);
    tw.add_longs(kTagStripOffsets, offsets);
    tw.finish(image.data.data(), plane_bytes * c, pix);
}

MultispectralImage load_geotiff(const std::string& path) {
    TiffReader tr(path);
    const TiffInfo& ti = tr.info();
    if (ti.width == 0 || ti.height == 0) throw CorruptFile("tiff missing dimensions");
    if (ti.bits != 32 || ti.sample_format != 3)
        throw CorruptFile("raster TIFF must be float32 samples");
    if (ti.strip_offsets.size() != ti.strip_counts.size() || ti.strip_offsets.empty())
        throw CorruptFile("tiff strip tables inconsistent");

    const int c = ti.samples;
    const std::size_t plane = static_cast<std::size_t>(ti.width) * ti.height;
    std::vector<char> raw = tr.read_strips();
    if (raw.size() != plane * c * sizeof(float))
        throw DimensionMismatch("tiff payload size does not match declared shape");

    // Band identities and value domain ride in ImageDescription; files from
    // other producers default to the canonical prefix and raw reflectance.
    std::vector<BandId> bands;
    ValueDomain domain = ValueDomain::RAW_REFLECTANCE;
    if (!ti.description.empty() && ti.description.front() == '{') {
        auto j = nlohmann::json::parse(ti.description, nullptr, false);
        if (!j.is_discarded()) {
            if (j.contains("bands"))
                for (const auto& b : j["bands"]) bands.push_back(band_from_name(b));
            if (j.value("value_domain", "") == "UNIT_NORMALIZED")
                domain = ValueDomain::UNIT_NORMALIZED;
        }
    }
    if (bands.empty()) {
        if (c > kNumBands) throw CorruptFile("tiff has more samples than known bands");
        bands.assign(kCanonicalBands.begin(), kCanonicalBands.begin() + c);
    }
    if (static_cast<int>(bands.size()) != c)
        throw DimensionMismatch("band list does not match sample count");

    std::vector<BandId> canonical = canonicalize_bands(bands);
    MultispectralImage img(static_cast<int>(ti.height), static_cast<int>(ti.width), canonical,
                           domain);
    if (ti.pixel_scale > 0.0) img.resolution_m = static_cast<float>(ti.pixel_scale);

    const float* src = reinterpret_cast<const float*>(raw.data());
    if (ti.planar == 2) {
        for (int i = 0; i < c; ++i)
            std::memcpy(img.band_plane(img.index_of(bands[i])), src + i * plane,
                        plane * sizeof(float));
    } else {
        for (std::size_t p = 0; p < plane; ++p)
            for (int i = 0; i < c; ++i)
                img.band_plane(img.index_of(bands[i]))[p] = src[p * c + i];
    }
    return img;
}

void save_geotiff_mask(const std::string& path, const LabelMask& mask, float resolution_m) {
    mask.validate();
    TiffWriter tw(path);
    const std::size_t bytes = mask.data.size();
    tw.add_long(kTagImageWidth, static_cast<std::uint32_t>(mask.width));
    tw.add_long(kTagImageLength, static_cast<std::uint32_t>(mask.height));
    tw.add_short(kTagBitsPerSample, 8);
    tw.add_short(kTagCompression, 1);
    tw.add_short(kTagPhotometric, 1);
    tw.add_short(kTagSamplesPerPixel, 1);
    tw.add_long(kTagRowsPerStrip, static_cast<std::uint32_t>(mask.height));
    tw.add_short(kTagPlanarConfig, 1);
    tw.add_short(kTagSampleFormat, 1);
    tw.add_doubles(kTagModelPixelScale,
                   {static_cast<double>(resolution_m), static_cast<double>(resolution_m), 0.0});
    tw.add_longs(kTagStripByteCounts, {static_cast<std::uint32_t>(bytes)});
    const std::uint32_t pix = tw.reserve_pixels(bytes);
    tw.add_longs(kTagStripOffsets, {pix});
    tw.finish(mask.data.data(), bytes, pix);
}

LabelMask load_geotiff_mask(const std::string& path) {
    TiffReader tr(path);
    const TiffInfo& ti = tr.info();
    if (ti.samples != 1 || ti.bits != 8 || ti.sample_format != 1)
        throw CorruptFile("mask TIFF must be single-band uint8");
    std::vector<char> raw = tr.read_strips();
    const std::size_t plane = static_cast<std::size_t>(ti.width) * ti.height;
    if (raw.size() != plane) throw DimensionMismatch("mask payload size mismatch");
    LabelMask m(static_cast<int>(ti.height), static_cast<int>(ti.width));
    std::memcpy(m.data.data(), raw.data(), plane);
    m.validate();
    return m;
}

bool is_tiff_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return false;
    char h[4];
    is.read(h, 4);
    return is && h[0] == 'I' && h[1] == 'I' && h[2] == 42 && h[3] == 0;
}

}  // namespace progseg
