#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "offcbdc/field.hpp"

namespace offcbdc {

// Deterministic generator (splitmix64). Every piece of protocol randomness
// flows through one of these so a seeded run is reproducible byte for byte.
class rng {
  public:
    explicit rng(std::uint64_t seed) : state_(seed) {}

    static rng from_entropy() {
        std::random_device rd;
        return rng((std::uint64_t(rd()) << 32) ^ rd());
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    void fill(std::span<std::uint8_t> out) {
        std::size_t i = 0;
        while (i < out.size()) {
            std::uint64_t w = next_u64();
            for (int b = 0; b < 8 && i < out.size(); ++b, ++i)
                out[i] = static_cast<std::uint8_t>(w >> (8 * b));
        }
    }

    // Uniform field element by rejection sampling.
    template <const field_params& P>
    fp<P> next_field() {
        for (;;) {
            std::array<std::uint8_t, 32> buf{};
            fill(buf);
            buf[0] &= 0x3f;  // both moduli are below 2^254
            if (auto v = fp<P>::from_bytes_be(buf)) return *v;
        }
    }

    fr next_fr() { return next_field<bn254_scalar_params>(); }
    jj_scalar next_scalar() { return next_field<jubjub_subgroup_params>(); }

    // Uniform in [0, n)
    std::uint64_t next_below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

  private:
    std::uint64_t state_;
};

}  // namespace offcbdc
