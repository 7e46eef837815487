#include "progseg/archive.hpp"

#include <cstring>
#include <fstream>

namespace progseg {

namespace {

constexpr char kMagic[4] = {'P', 'S', 'E', 'G'};
constexpr std::uint32_t kVersion = 1;

// The container is defined little-endian; this codebase targets
// little-endian hosts and writes scalars directly.
template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw CorruptFile("archive truncated");
    return v;
}

}  // namespace

void save_archive(const std::string& path, const MultispectralImage& image,
                  const LabelMask* mask) {
    image.validate();
    if (mask) {
        mask->validate();
        if (mask->height != image.height || mask->width != image.width)
            throw DimensionMismatch("mask dimensions do not match image");
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.write(kMagic, 4);
    put<std::uint32_t>(os, kVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(image.height));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(image.width));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(image.channels()));
    for (BandId b : image.bands) put<std::uint8_t>(os, static_cast<std::uint8_t>(b));
    put<std::uint8_t>(os, static_cast<std::uint8_t>(image.value_domain));
    put<std::uint8_t>(os, mask ? 1 : 0);
    put<float>(os, image.resolution_m);
    os.write(reinterpret_cast<const char*>(image.data.data()),
             static_cast<std::streamsize>(image.data.size() * sizeof(float)));
    if (mask)
        os.write(reinterpret_cast<const char*>(mask->data.data()),
                 static_cast<std::streamsize>(mask->data.size()));
    if (!os) throw IoError("write failed: " + path);
}

ArchiveContent load_archive(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw CorruptFile("not a PSEG archive: " + path);
    const auto version = get<std::uint32_t>(is);
    if (version != kVersion) throw CorruptFile("unsupported PSEG version");
    const auto h = get<std::uint32_t>(is);
    const auto w = get<std::uint32_t>(is);
    const auto c = get<std::uint32_t>(is);
    if (h == 0 || w == 0 || c == 0 || c > 64 ||
        static_cast<std::uint64_t>(h) * w > (1ull << 32))
        throw CorruptFile("implausible PSEG dimensions");
    std::vector<BandId> bands;
    bands.reserve(c);
    for (std::uint32_t i = 0; i < c; ++i) {
        const auto code = get<std::uint8_t>(is);
        if (code >= kNumBands) throw CorruptFile("invalid band code in PSEG header");
        bands.push_back(static_cast<BandId>(code));
    }
    const auto domain = get<std::uint8_t>(is);
    if (domain > 1) throw CorruptFile("invalid value-domain flag");
    const auto has_mask = get<std::uint8_t>(is);
    if (has_mask > 1) throw CorruptFile("invalid mask flag");
    const float resolution = get<float>(is);

    ArchiveContent out;
    // Stored band order may be arbitrary; planes are shuffled into canonical
    // order on load.
    std::vector<BandId> canonical = canonicalize_bands(bands);
    out.image = MultispectralImage(static_cast<int>(h), static_cast<int>(w), canonical,
                                   static_cast<ValueDomain>(domain));
    out.image.resolution_m = resolution;
    const std::size_t plane = out.image.plane_size();
    std::vector<float> buf(plane);
    for (std::uint32_t i = 0; i < c; ++i) {
        is.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(plane * sizeof(float)));
        if (!is) throw CorruptFile("PSEG payload truncated");
        const int dst = out.image.index_of(bands[i]);
        std::memcpy(out.image.band_plane(dst), buf.data(), plane * sizeof(float));
    }
    if (has_mask) {
        LabelMask m(static_cast<int>(h), static_cast<int>(w));
        is.read(reinterpret_cast<char*>(m.data.data()), static_cast<std::streamsize>(plane));
        if (!is) throw CorruptFile("PSEG mask payload truncated");
        m.validate();
        out.mask = std::move(m);
    }
    return out;
}

bool is_archive_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return false;
    char magic[4];
    is.read(magic, 4);
    return is && std::memcmp(magic, kMagic, 4) == 0;
}

}  // namespace progseg
