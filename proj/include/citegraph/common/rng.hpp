#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace citegraph {

// FNV-1a, 64 bit. Used for dedup keys, seed derivation and config hashes.
// All reproducibility contracts in this project assume this exact function,
// so it must not change.
inline uint64_t fnv1a64(std::string_view s, uint64_t h = 14695981039346656037ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline uint64_t splitmix64_step(uint64_t& s) {
    uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-friendly seed derivation: independent streams are obtained by
// folding labels/indices into the base seed. Platform independent.
inline uint64_t derive_seed(uint64_t base, uint64_t a) {
    uint64_t s = base ^ (a * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    return splitmix64_step(s);
}
inline uint64_t derive_seed(uint64_t base, std::string_view label) {
    return derive_seed(base, fnv1a64(label));
}
inline uint64_t derive_seed(uint64_t base, std::string_view label, uint64_t a) {
    return derive_seed(derive_seed(base, label), a);
}

// Deterministic RNG (splitmix64 core). std::mt19937 + std::shuffle /
// std::uniform_* are implementation-defined, so every sampled artifact in
// this project goes through this struct instead.
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next() { return splitmix64_step(state); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform in [0, bound) without modulo bias.
    uint64_t below(uint64_t bound) {
        if (bound <= 1) return 0;
        uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // Standard normal via Box-Muller (deterministic given the stream).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Fisher-Yates with our own bounded sampling, so shuffles are
    // byte-identical across platforms.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace citegraph
