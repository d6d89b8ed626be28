#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>

#include "offcbdc/bytes.hpp"

namespace offcbdc {

// 256-bit little-endian limb vector with the Montgomery constants of one
// prime field.
struct field_params {
    std::array<std::uint64_t, 4> modulus;
    std::array<std::uint64_t, 4> r;    // 2^256 mod modulus
    std::array<std::uint64_t, 4> r2;   // (2^256)^2 mod modulus
    std::uint64_t inv;                 // -modulus^{-1} mod 2^64
};

// Scalar field of BN254: every protocol value (keys, commitments, serial
// numbers, tags, balances) lives here. 254-bit prime.
inline constexpr field_params bn254_scalar_params{
    {0x43e1f593f0000001ULL, 0x2833e84879b97091ULL, 0xb85045b68181585dULL,
     0x30644e72e131a029ULL},
    {0xac96341c4ffffffbULL, 0x36fc76959f60cd29ULL, 0x666ea36f7879462eULL,
     0x0e0a77c19a07df2fULL},
    {0x1bb8e645ae216da7ULL, 0x53fe3ab1e35c59e3ULL, 0x8c49833d53bb8085ULL,
     0x0216d0b17f4e44a5ULL},
    0xc2e1f593efffffffULL,
};

// Prime order of the Baby Jubjub subgroup used by the signature scheme.
inline constexpr field_params jubjub_subgroup_params{
    {0x677297dc392126f1ULL, 0xab3eedb83920ee0aULL, 0x370a08b6d0302b0bULL,
     0x060c89ce5c263405ULL},
    {0x073315dea08f9c76ULL, 0xe7acffc6a098f24bULL, 0xf85a9201d818f015ULL,
     0x01f16424e1bb7724ULL},
    {0x35e44abee7ecb21eULL, 0x74646cacf5f84ec4ULL, 0xe472df203faa158fULL,
     0x0445b524f1ba50a8ULL},
    0x532ce5aebc48f5efULL,
};

namespace detail {

using limbs = std::array<std::uint64_t, 4>;

inline bool geq(const limbs& a, const limbs& b) {
    for (int i = 3; i >= 0; --i) {
        if (a[i] > b[i]) return true;
        if (a[i] < b[i]) return false;
    }
    return true;
}

inline limbs add_raw(const limbs& a, const limbs& b) {
    limbs r{};
    unsigned __int128 carry = 0;
    for (int i = 0; i < 4; ++i) {
        unsigned __int128 s = carry + a[i] + b[i];
        r[i] = static_cast<std::uint64_t>(s);
        carry = s >> 64;
    }
    return r;
}

inline limbs sub_raw(const limbs& a, const limbs& b) {
    limbs r{};
    std::uint64_t borrow = 0;
    for (int i = 0; i < 4; ++i) {
        unsigned __int128 d = (unsigned __int128)a[i] - b[i] - borrow;
        r[i] = static_cast<std::uint64_t>(d);
        borrow = (d >> 127) ? 1 : 0;
    }
    return r;
}

}  // namespace detail

// Prime-field element in Montgomery form.
template <const field_params& P>
class fp {
  public:
    constexpr fp() : v_{0, 0, 0, 0} {}

    static fp zero() { return fp(); }

    static fp one() {
        fp r;
        r.v_ = P.r;
        return r;
    }

    static fp from_u64(std::uint64_t x) {
        fp r;
        r.v_ = {x, 0, 0, 0};
        r.v_ = mont_mul(r.v_, P.r2);
        return r;
    }

    // Strict canonical decoding: 32 bytes big-endian, must be < modulus.
    static std::optional<fp> from_bytes_be(std::span<const std::uint8_t> in) {
        if (in.size() != 32) return std::nullopt;
        detail::limbs raw{};
        for (int limb = 0; limb < 4; ++limb) {
            std::uint64_t w = 0;
            for (int i = 0; i < 8; ++i)
                w = (w << 8) | in[static_cast<std::size_t>((3 - limb) * 8 + i)];
            raw[static_cast<std::size_t>(limb)] = w;
        }
        if (detail::geq(raw, P.modulus)) return std::nullopt;
        fp r;
        r.v_ = mont_mul(raw, P.r2);
        return r;
    }

    // Reduces an arbitrary 32-byte string mod the field order. Used for
    // hash-to-field, never on the wire.
    static fp from_bytes_be_reduced(std::span<const std::uint8_t> in) {
        detail::limbs raw{};
        std::size_t n = in.size() < 32 ? in.size() : 32;
        bytes padded(32, 0);
        std::memcpy(padded.data() + (32 - n), in.data(), n);
        for (int limb = 0; limb < 4; ++limb) {
            std::uint64_t w = 0;
            for (int i = 0; i < 8; ++i)
                w = (w << 8) | padded[static_cast<std::size_t>((3 - limb) * 8 + i)];
            raw[static_cast<std::size_t>(limb)] = w;
        }
        while (detail::geq(raw, P.modulus)) raw = detail::sub_raw(raw, P.modulus);
        fp r;
        r.v_ = mont_mul(raw, P.r2);
        return r;
    }

    std::array<std::uint8_t, 32> to_bytes_be() const {
        detail::limbs raw = from_mont(v_);
        std::array<std::uint8_t, 32> out{};
        for (int limb = 0; limb < 4; ++limb)
            for (int i = 0; i < 8; ++i)
                out[static_cast<std::size_t>((3 - limb) * 8 + i)] =
                    static_cast<std::uint8_t>(raw[static_cast<std::size_t>(limb)] >>
                                              (8 * (7 - i)));
        return out;
    }

    // Canonical integer value if it fits in 64 bits.
    std::optional<std::uint64_t> to_u64() const {
        detail::limbs raw = from_mont(v_);
        if (raw[1] != 0 || raw[2] != 0 || raw[3] != 0) return std::nullopt;
        return raw[0];
    }

    bool is_zero() const { return v_[0] == 0 && v_[1] == 0 && v_[2] == 0 && v_[3] == 0; }

    fp operator+(const fp& o) const {
        fp r;
        r.v_ = detail::add_raw(v_, o.v_);
        if (detail::geq(r.v_, P.modulus)) r.v_ = detail::sub_raw(r.v_, P.modulus);
        return r;
    }

    fp operator-(const fp& o) const {
        fp r;
        if (detail::geq(v_, o.v_)) {
            r.v_ = detail::sub_raw(v_, o.v_);
        } else {
            r.v_ = detail::sub_raw(detail::add_raw(v_, P.modulus), o.v_);
        }
        return r;
    }

    fp operator*(const fp& o) const {
        fp r;
        r.v_ = mont_mul(v_, o.v_);
        return r;
    }

    fp& operator+=(const fp& o) { return *this = *this + o; }
    fp& operator-=(const fp& o) { return *this = *this - o; }
    fp& operator*=(const fp& o) { return *this = *this * o; }

    fp neg() const { return zero() - *this; }
    fp square() const { return *this * *this; }

    fp pow(const detail::limbs& exp) const {
        fp acc = one();
        fp base = *this;
        for (int bit = 0; bit < 256; ++bit) {
            if ((exp[static_cast<std::size_t>(bit / 64)] >> (bit % 64)) & 1)
                acc = acc * base;
            base = base.square();
        }
        return acc;
    }

    // Fermat inversion; inverse of zero is zero.
    fp inverse() const {
        detail::limbs e = detail::sub_raw(P.modulus, {2, 0, 0, 0});
        return pow(e);
    }

    bool operator==(const fp& o) const { return v_ == o.v_; }
    bool operator!=(const fp& o) const { return v_ != o.v_; }

    // Stable but non-numeric order (compares the internal representation);
    // fine for map keys.
    bool raw_less(const fp& o) const {
        for (int i = 3; i >= 0; --i) {
            if (v_[i] != o.v_[i]) return v_[i] < o.v_[i];
        }
        return false;
    }

    std::string to_hex() const {
        static const char* digits = "0123456789abcdef";
        auto b = to_bytes_be();
        std::string s;
        s.reserve(64);
        for (auto byte : b) {
            s.push_back(digits[byte >> 4]);
            s.push_back(digits[byte & 0xf]);
        }
        return s;
    }

  private:
    static detail::limbs mont_mul(const detail::limbs& a, const detail::limbs& b) {
        std::uint64_t t[8] = {0};
        for (int i = 0; i < 4; ++i) {
            std::uint64_t carry = 0;
            for (int j = 0; j < 4; ++j) {
                unsigned __int128 p =
                    (unsigned __int128)a[static_cast<std::size_t>(i)] *
                        b[static_cast<std::size_t>(j)] +
                    t[i + j] + carry;
                t[i + j] = static_cast<std::uint64_t>(p);
                carry = static_cast<std::uint64_t>(p >> 64);
            }
            t[i + 4] += carry;
        }
        // reduction
        for (int i = 0; i < 4; ++i) {
            std::uint64_t m = t[i] * P.inv;
            std::uint64_t carry = 0;
            for (int j = 0; j < 4; ++j) {
                unsigned __int128 p =
                    (unsigned __int128)m * P.modulus[static_cast<std::size_t>(j)] +
                    t[i + j] + carry;
                t[i + j] = static_cast<std::uint64_t>(p);
                carry = static_cast<std::uint64_t>(p >> 64);
            }
            for (int j = i + 4; j < 8 && carry; ++j) {
                unsigned __int128 s = (unsigned __int128)t[j] + carry;
                t[j] = static_cast<std::uint64_t>(s);
                carry = static_cast<std::uint64_t>(s >> 64);
            }
        }
        detail::limbs r{t[4], t[5], t[6], t[7]};
        if (detail::geq(r, P.modulus)) r = detail::sub_raw(r, P.modulus);
        return r;
    }

    static detail::limbs from_mont(const detail::limbs& a) {
        return mont_mul(a, {1, 0, 0, 0});
    }

    detail::limbs v_;
};

using fr = fp<bn254_scalar_params>;
using jj_scalar = fp<jubjub_subgroup_params>;

struct fr_raw_less {
    bool operator()(const fr& a, const fr& b) const { return a.raw_less(b); }
};

inline void write_fr(byte_writer& w, const fr& x) { w.raw(x.to_bytes_be()); }

inline fr read_fr(byte_reader& r) {
    std::size_t at = r.offset();
    auto s = r.raw(32);
    auto v = fr::from_bytes_be(s);
    if (!v) throw decode_error(at, "non-canonical field element");
    return *v;
}

}  // namespace offcbdc
