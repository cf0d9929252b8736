#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace depthmark {

// Deterministic random source. std::mt19937_64 has a fixed algorithm, but
// the standard distributions do not, so uniform/gaussian sampling is done
// by hand here. Identical seeds give bit-identical streams on every
// platform, which the reproducibility contract depends on.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1), 53 mantissa bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; the second value of each pair is
    // cached so the stream advances two words per two samples.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

    // Uniform index in [0, n). Modulo bias is irrelevant at the sizes used
    // here; determinism is what matters.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

    // Decorrelated child seed for stream `n` (splitmix64 finalizer).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t n) {
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (n + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace depthmark
