#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace gepbench {

// Deterministic splittable PRNG built on SplitMix64 (Steele, Lea & Flood 2014).
//
// Stream:  state += 0x9E3779B97F4A7C15 per draw, output = finalizer(state).
// Split:   child seed = finalizer(seed ^ finalizer(index + 0xA0761D6478BD642F)).
//          Children depend only on the construction seed and the split index,
//          never on how many draws the parent has made.
//
// All derived conveniences (doubles, gaussians, shuffles) consume a fixed,
// documented number of raw 64-bit draws so recipes can be replayed exactly.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return finalize(state_);
    }

    // Uniform in [0, 1), 53-bit resolution. One raw draw.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi). One raw draw.
    double uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * next_double();
    }

    // Standard normal via Box-Muller, no caching: every call consumes exactly
    // two raw draws (u1 in (0,1], u2 in [0,1)).
    double gaussian() noexcept {
        double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform integer in [0, n). One raw draw (modulo; n is tiny in this
    // codebase so the bias is far below every tolerance used).
    std::uint64_t below(std::uint64_t n) noexcept {
        return next_u64() % n;
    }

    // Fisher-Yates from the back: i = n-1..1, j = below(i+1), swap(v[i], v[j]).
    template <typename T>
    void shuffle(std::vector<T>& v) noexcept {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::uint64_t split_seed(std::uint64_t index) const noexcept {
        return finalize(seed_ ^ finalize(index + 0xA0761D6478BD642FULL));
    }

    Rng split(std::uint64_t index) const noexcept {
        return Rng(split_seed(index));
    }

private:
    static std::uint64_t finalize(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t state_;
};

} // namespace gepbench
