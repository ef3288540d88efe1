#pragma once

#include <cstdint>
#include <span>

namespace taustar {

// Counter-based pseudo-random stream built on the splitmix64 finalizer.
// A substream is keyed by (seed, index); draws from different substreams are
// independent of evaluation order, which is what makes parallel resampling
// reproducible.
class SubstreamRng {
public:
    explicit SubstreamRng(std::uint64_t seed) noexcept : state_(mix(seed)) {}

    static SubstreamRng substream(std::uint64_t seed, std::uint64_t index) noexcept {
        SubstreamRng r(0);
        r.state_ = mix(mix(seed) + 0x9e3779b97f4a7c15ULL * (index + 1));
        return r;
    }

    std::uint64_t next() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Unbiased draw from {0, ..., n-1}; n >= 1.
    std::uint64_t bounded(std::uint64_t n) noexcept {
        // rejection on the top of the range keeps the draw exactly uniform
        const std::uint64_t threshold = -n % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    /// Uniform double in [0, 1).
    double uniform01() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

/// Fisher-Yates shuffle driven by an unbiased bounded draw.
template <typename T>
void shuffle_span(std::span<T> values, SubstreamRng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace taustar
