#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace progseg {

// splitmix64 step; the basis for every random draw in the toolkit.
// Keeping the generator self-contained makes results identical across
// standard libraries and platforms.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64(s);
}

inline std::uint64_t hash_str(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Deterministic stream of uniforms/normals derived from a key. Streams for
// independent purposes are derived by hashing the parent key with a tag, so
// draw order in one consumer never perturbs another.
class Rng {
public:
    explicit Rng(std::uint64_t key) : state_(splitmix64(key)) {}

    static Rng from(std::uint64_t seed, std::string_view tag) {
        return Rng(hash_combine(seed, hash_str(tag)));
    }

    Rng derive(std::uint64_t index) const {
        return Rng(hash_combine(state_, index));
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    bool coin() { return (next_u64() & 1u) != 0; }

    // Box-Muller; one value per call, the sibling draw is discarded to keep
    // the stream position independent of consumption parity.
    double normal() {
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace progseg
