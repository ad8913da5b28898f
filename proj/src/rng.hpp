#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace bansa {

// Counter-based stream RNG in the SplitMix64 family.
//
// A stream is a pure value: (key, counter). Output n is mix64(key + n*gamma),
// so the sequence is a function of the key alone and never touches global
// state. Sub-streams are derived from the key, not the counter, which makes
// split(i) stable no matter how much the parent has been consumed.

inline constexpr std::uint64_t kSplitMixGamma = 0x9e3779b97f4a7c15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

class RngStream {
public:
    explicit RngStream(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() {
        counter_ += 1;
        return mix64(key_ + counter_ * kSplitMixGamma);
    }

    // Uniform in [0, 1) with 53 significant bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller. Spelled out explicitly so draws are
    // identical across standard libraries (std::normal_distribution is not).
    double next_gaussian() {
        const double u1 = 1.0 - next_unit();  // (0, 1]
        const double u2 = next_unit();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    // Child stream number `index`; independent of the parent's position.
    RngStream split(std::uint64_t index) const {
        return RngStream(mix64(key_ ^ mix64((index + 1) * kSplitMixGamma)));
    }

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// All randomness in the library is keyed by (base seed, role tag, index).
inline RngStream make_stream(std::uint64_t base_seed, std::string_view role,
                             std::uint64_t index = 0) {
    const std::uint64_t role_key = mix64(base_seed ^ fnv1a64(role));
    return RngStream(mix64(role_key ^ ((index + 1) * kSplitMixGamma)));
}

}  // namespace bansa
