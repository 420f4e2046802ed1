#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace deepc {

/// Seeded random source with a portable uniform mapping.
///
/// Draws are built from raw mt19937_64 output instead of
/// std::uniform_real_distribution, whose sequence differs between standard
/// library implementations. Reports that embed a seed also embed kAlgorithm
/// so runs can be replayed elsewhere.
class Rng
{
 public:
    static constexpr std::string_view kAlgorithm = "mt19937_64/canonical53";

    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0,1) with 53 random bits.
    double canonical()
    {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * canonical(); }

    int uniform_int(int lo, int hi)  // inclusive bounds
    {
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    /// Independent child stream, stable under the parent's draw history.
    Rng fork(std::uint64_t stream) const
    {
        return Rng(splitmix64(seed_ + 0x9E3779B97F4A7C15ull * (stream + 1)));
    }

    static std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

 private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

}  // namespace deepc
