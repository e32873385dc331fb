#ifndef RECODYN_RNG_HPP
#define RECODYN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <vector>

namespace recodyn {

// Counter-based randomness: every draw is a pure function of
// (seed, stream, counter), so results do not depend on evaluation order
// or on how work is split across threads.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    h = splitmix64(h ^ stream);
    return splitmix64(h ^ counter);
}

// uniform in [0, 1), 53-bit mantissa
inline double u01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(mix(seed, stream, counter) >> 11) * 0x1.0p-53;
}

// standard normal via Box-Muller; one value per (stream, counter)
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const double u1 = static_cast<double>((mix(seed, stream, counter * 2) >> 11) + 1) * 0x1.0p-53;
    const double u2 = u01(seed, stream, counter * 2 + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
}

// Deterministic Fisher-Yates permutation of [0, n)
inline std::vector<std::uint32_t> permutation(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
    std::vector<std::uint32_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = n; i > 1; --i) {
        const std::uint64_t j = mix(seed, stream, i) % i;
        std::swap(p[i - 1], p[j]);
    }
    return p;
}

// Stable 64-bit hash of a byte string (FNV-1a), for deriving stream ids
// from names without relying on std::hash.
inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace rng
} // namespace recodyn

#endif
