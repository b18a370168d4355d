#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace udd {

// Deterministic random source used everywhere randomness is needed.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// C++ standard, and every derived draw below is defined directly on the
// raw 64-bit stream (no std::*_distribution, whose results vary across
// standard libraries). Same seed, same platform-independent values.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0,1) with 53 random bits.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). Unbiased via rejection of the tail range.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Uniform double in [-a, a].
    double next_symmetric(double a) { return (2.0 * next_double() - 1.0) * a; }

    bool next_bool() { return (engine_() >> 63) != 0; }

    // Index sampled from a finite distribution given as probabilities
    // (cumulative inversion; the final bucket absorbs rounding residue).
    int next_categorical(std::span<const double> probs) {
        const double u = next_double();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

    // In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[next_below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// splitmix64 mix step, used to derive decorrelated sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Sub-seed for a named purpose ("noise", "train", ...) under a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return mix_seed(base ^ h);
}

}  // namespace udd
