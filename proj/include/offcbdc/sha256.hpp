#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "offcbdc/bytes.hpp"

namespace offcbdc {

using digest32 = std::array<std::uint8_t, 32>;

// FIPS 180-4 SHA-256. Used for MACs, deterministic nonces, and round-constant
// derivation; protocol values hash with the field-native hash instead.
class sha256 {
  public:
    sha256() { reset(); }

    void reset();
    void update(std::span<const std::uint8_t> data);
    digest32 finish();

    static digest32 hash(std::span<const std::uint8_t> data) {
        sha256 h;
        h.update(data);
        return h.finish();
    }

  private:
    void compress(const std::uint8_t* block);

    std::array<std::uint32_t, 8> state_{};
    std::array<std::uint8_t, 64> buf_{};
    std::size_t buf_len_ = 0;
    std::uint64_t total_ = 0;
};

digest32 hmac_sha256(std::span<const std::uint8_t> key,
                     std::span<const std::uint8_t> message);

}  // namespace offcbdc
