#include "progseg/bands.hpp"

#include <algorithm>
#include <cctype>

#include "progseg/errors.hpp"

namespace progseg {

const char* band_name(BandId b) {
    switch (b) {
        case BandId::BLUE: return "BLUE";
        case BandId::GREEN: return "GREEN";
        case BandId::RED: return "RED";
        case BandId::SWIR1: return "SWIR1";
        case BandId::SWIR2: return "SWIR2";
        case BandId::NIR: return "NIR";
        case BandId::THERMAL: return "THERMAL";
    }
    return "?";
}

const char* band_letter(BandId b) {
    switch (b) {
        case BandId::BLUE: return "B";
        case BandId::GREEN: return "G";
        case BandId::RED: return "R";
        case BandId::SWIR1: return "S1";
        case BandId::SWIR2: return "S2";
        case BandId::NIR: return "N";
        case BandId::THERMAL: return "Th";
    }
    return "?";
}

BandId band_from_name(const std::string& name) {
    std::string u;
    for (char ch : name) u.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    for (BandId b : kCanonicalBands)
        if (u == band_name(b)) return b;
    if (u == "B") return BandId::BLUE;
    if (u == "G") return BandId::GREEN;
    if (u == "R") return BandId::RED;
    if (u == "N") return BandId::NIR;
    if (u == "S1") return BandId::SWIR1;
    if (u == "S2") return BandId::SWIR2;
    if (u == "T" || u == "TH") return BandId::THERMAL;
    throw InvalidArgument("unknown band name: " + name);
}

std::vector<BandId> canonicalize_bands(std::vector<BandId> bands) {
    std::sort(bands.begin(), bands.end());
    for (std::size_t i = 1; i < bands.size(); ++i)
        if (bands[i] == bands[i - 1])
            throw InvalidArgument(std::string("duplicate band: ") + band_name(bands[i]));
    return bands;
}

std::vector<BandId> parse_band_set(const std::string& text) {
    std::vector<BandId> out;
    if (text.find(',') != std::string::npos) {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t comma = text.find(',', pos);
            if (comma == std::string::npos) comma = text.size();
            std::string tok = text.substr(pos, comma - pos);
            if (!tok.empty()) out.push_back(band_from_name(tok));
            pos = comma + 1;
        }
        return canonicalize_bands(out);
    }
    // Compact letter form; greedy over two-letter tokens first.
    std::size_t i = 0;
    while (i < text.size()) {
        char ch = static_cast<char>(std::toupper(static_cast<unsigned char>(text[i])));
        if (ch == ' ') { ++i; continue; }
        if (ch == 'S' && i + 1 < text.size() && (text[i + 1] == '1' || text[i + 1] == '2')) {
            out.push_back(text[i + 1] == '1' ? BandId::SWIR1 : BandId::SWIR2);
            i += 2;
            continue;
        }
        if (ch == 'T') {
            i += (i + 1 < text.size() &&
                  std::toupper(static_cast<unsigned char>(text[i + 1])) == 'H') ? 2 : 1;
            out.push_back(BandId::THERMAL);
            continue;
        }
        switch (ch) {
            case 'R': out.push_back(BandId::RED); break;
            case 'G': out.push_back(BandId::GREEN); break;
            case 'B': out.push_back(BandId::BLUE); break;
            case 'N': out.push_back(BandId::NIR); break;
            default: throw InvalidArgument("unknown band letter in: " + text);
        }
        ++i;
    }
    if (out.empty()) throw InvalidArgument("empty band set: " + text);
    return canonicalize_bands(out);
}

std::string band_set_label(const std::vector<BandId>& bands) {
    static constexpr std::array<BandId, kNumBands> display_order = {
        BandId::RED,   BandId::GREEN, BandId::BLUE,    BandId::NIR,
        BandId::SWIR1, BandId::SWIR2, BandId::THERMAL,
    };
    std::string s;
    for (BandId b : display_order)
        if (std::find(bands.begin(), bands.end(), b) != bands.end()) s += band_letter(b);
    return s;
}

std::vector<std::string> band_names(const std::vector<BandId>& bands) {
    std::vector<std::string> out;
    out.reserve(bands.size());
    for (BandId b : bands) out.emplace_back(band_name(b));
    return out;
}

}  // namespace progseg
