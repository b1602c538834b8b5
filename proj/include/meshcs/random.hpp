#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace meshcs {

/// Seeded generator with platform-independent derived draws.
///
/// std::mt19937_64 output is fully specified by the standard but the
/// <random> distributions are not, so uniform reals and integers are derived
/// here directly from the raw 64-bit stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1].
    double uniform_open0() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

    /// Uniform integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t r;
        do r = engine_();
        while (r >= limit);
        return r % n;
    }

private:
    std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// FNV-1a over bytes, finalized with splitmix64.
class StableHash {
public:
    StableHash& add(std::string_view bytes) {
        for (unsigned char c : bytes) {
            h_ ^= c;
            h_ *= 0x100000001b3ull;
        }
        // Length delimiter keeps ("ab","c") distinct from ("a","bc").
        return add_u64_raw(bytes.size());
    }
    StableHash& add(std::uint64_t v) { return add_u64_raw(v); }
    std::uint64_t value() const { return splitmix64(h_); }

private:
    StableHash& add_u64_raw(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h_ ^= (v >> (8 * i)) & 0xffu;
            h_ *= 0x100000001b3ull;
        }
        return *this;
    }
    std::uint64_t h_ = 0xcbf29ce484222325ull;
};

}  // namespace meshcs
