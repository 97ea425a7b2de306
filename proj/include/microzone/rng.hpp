#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace microzone {

// SplitMix64 finalizer. Used both to derive substream seeds and as the
// per-stream engine itself.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Hashes an ordered tuple of keys into a 64-bit seed. Distinct key tuples give
// statistically unrelated seeds; the same tuple always gives the same seed.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys) noexcept
{
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto k : keys)
        h = mix64(h ^ mix64(k + 0x9e3779b97f4a7c15ULL));
    return h;
}

// Small counter-style generator satisfying UniformRandomBitGenerator. One
// instance is cheap enough to construct per link, which lets any link's draws
// be computed without knowing the draws of any other link.
class StreamRng
{
  public:
    using result_type = std::uint64_t;

    explicit constexpr StreamRng(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept
    {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform() noexcept
    {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
};

// Tags separating the independent randomness consumers inside one drop.
namespace stream {
inline constexpr std::uint64_t positions = 1;
inline constexpr std::uint64_t link = 2;
inline constexpr std::uint64_t matched = 3;
}  // namespace stream

}  // namespace microzone
