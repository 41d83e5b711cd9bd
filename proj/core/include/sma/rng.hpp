#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sma {

// 64-bit mixer used for seed derivation (splitmix64 finalizer).
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t hash_label(std::string_view label) {
    uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Deterministic random stream. All randomness in the project flows through
// this class so that results are reproducible bit-for-bit from a master seed.
// Child streams are derived by label (and optional index), never by sharing
// engine state, so adding parallelism cannot change results.
class Rng {
  public:
    explicit Rng(uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

    uint64_t seed() const { return seed_; }

    uint64_t next_u64() { return engine_(); }

    // Uniform over [0, n). Multiply-shift bounding; bias is < n / 2^64.
    uint64_t uniform_int(uint64_t n) {
        return static_cast<uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Uniform over [lo, hi] inclusive.
    int64_t uniform_range(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(uniform_int(static_cast<uint64_t>(hi - lo + 1)));
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Child stream independent of this stream's draw position.
    Rng derive(std::string_view label, uint64_t index = 0) const {
        uint64_t s = mix64(seed_ ^ mix64(hash_label(label)));
        s = mix64(s ^ mix64(index + 0x51ed2701ULL));
        return Rng(s);
    }

  private:
    uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace sma
