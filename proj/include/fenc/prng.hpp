#pragma once

// Deterministic PRNG: splitmix64 expands the seed, xoshiro256** generates
// the stream. Integer-only state, so sequences are bit-identical on every
// platform. std::mt19937 & friends are avoided on purpose -- the standard
// distributions are implementation-defined.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace fenc {

class Prng {
public:
    explicit Prng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 bits of randomness.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Laplace(0, scale) via inverse CDF.
    double laplace(double scale) {
        const double u = uniform() - 0.5;
        const double s = u < 0.0 ? -1.0 : 1.0;
        return -scale * s * std::log(1.0 - 2.0 * std::fabs(u));
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Independent stream for a sub-task; distinct ids give distinct streams.
    Prng derive(std::uint64_t stream_id) const {
        std::uint64_t x = state_[0] ^ (0x9e3779b97f4a7c15ULL + stream_id);
        std::uint64_t y = splitmix64(x) ^ state_[3];
        return Prng(splitmix64(y) ^ stream_id);
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace fenc
