#ifndef GSR_RANDOM_HPP
#define GSR_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gsr {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a tag sequence.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) noexcept
{
    std::uint64_t h = splitmix64(seed);
    for (auto t : tags) {
        h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
    }
    return h;
}

/// Uniform draw in [lo, hi] from the top 53 bits; identical on every platform.
inline double uniform(Rng& rng, double lo, double hi) noexcept
{
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) noexcept
{
    return static_cast<std::size_t>((rng() >> 11) % n);
}

} // namespace gsr

#endif
