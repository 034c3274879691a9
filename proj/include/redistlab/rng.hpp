#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace redistlab {

/// Seeded random source shared by every randomized algorithm.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard) and
/// implements its own bounded-integer and unit-interval draws, so a seed
/// replays bit-identically regardless of which standard library built it.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n). Rejection sampling on the top bits.
    std::size_t index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("Rng::index: empty range");
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

    /// Uniform real in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    template <typename T>
    const T& pick(std::span<const T> items) {
        return items[index(items.size())];
    }

    template <typename Container>
    const auto& pick(const Container& items) {
        return items[index(items.size())];
    }

    /// Derive an independent stream, e.g. one per parallel run.
    Rng split(std::uint64_t stream) {
        std::uint64_t z = seed_ + 0x9E3779B97F4A7C15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return Rng(z ^ (z >> 31));
    }

    // UniformRandomBitGenerator interface, for std::shuffle and friends.
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return UINT64_MAX; }
    result_type operator()() { return engine_(); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// Fisher-Yates with Rng::index, replayable across standard libraries.
template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = rng.index(i);
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace redistlab
