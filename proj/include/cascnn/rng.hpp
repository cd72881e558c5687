#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace cascnn {

/// Mixes a base seed with up to three stream indices into a new 64-bit seed.
/// Used to derive independent, order-free seeds for folds/stages/purposes so
/// parallel schedules cannot change any result.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a = 0,
                              std::uint64_t b = 0, std::uint64_t c = 0) {
    auto splitmix = [](std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t s = base;
    std::uint64_t h = splitmix(s);
    s ^= a + 0x9e3779b97f4a7c15ULL;
    h ^= splitmix(s);
    s ^= b + 0x7f4a7c15f39cc060ULL;
    h ^= splitmix(s);
    s ^= c + 0x1bf58476d1ce4e5bULL;
    h ^= splitmix(s);
    return h;
}

/// Deterministic random source. Wraps mt19937_64 but performs all value
/// conversion (uniforms, normals, bounded ints, shuffles) itself, so streams
/// are bit-reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; caches the spare draw.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Uniform integer in [0, n). Rejection sampling keeps it exactly uniform.
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t span = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t r = next_u64();
        while (r >= limit) r = next_u64();
        return static_cast<std::size_t>(r % span);
    }

    /// Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace cascnn
