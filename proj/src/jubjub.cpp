#include "offcbdc/jubjub.hpp"

namespace offcbdc::jubjub {

namespace {

fr fr_from_limbs(std::uint64_t l0, std::uint64_t l1, std::uint64_t l2,
                 std::uint64_t l3) {
    std::array<std::uint8_t, 32> be{};
    std::uint64_t limbs[4] = {l0, l1, l2, l3};
    for (int limb = 0; limb < 4; ++limb)
        for (int i = 0; i < 8; ++i)
            be[static_cast<std::size_t>((3 - limb) * 8 + i)] =
                static_cast<std::uint8_t>(limbs[limb] >> (8 * (7 - i)));
    return *fr::from_bytes_be(be);
}

// Projective coordinates keep point addition inversion-free; one inversion
// per scalar multiplication at normalization.
struct proj {
    fr x, y, z;

    static proj identity() { return {fr::zero(), fr::one(), fr::one()}; }
};

proj lift(const jj_point& p) { return {p.x, p.y, fr::one()}; }

jj_point normalize(const proj& p) {
    fr zi = p.z.inverse();
    return {p.x * zi, p.y * zi};
}

// Unified projective addition on a*x^2 + y^2 = 1 + d*x^2*y^2; also doubles.
proj padd(const proj& p, const proj& q) {
    fr a = p.z * q.z;
    fr b = a.square();
    fr c = p.x * q.x;
    fr d = p.y * q.y;
    fr e = curve_d * c * d;
    fr f = b - e;
    fr g = b + e;
    fr x3 = a * f * ((p.x + p.y) * (q.x + q.y) - c - d);
    fr y3 = a * g * (d - curve_a * c);
    return {x3, y3, f * g};
}

}  // namespace

const jj_point& base_point() {
    static const jj_point g{
        fr_from_limbs(0x2893f3f6bb957051ULL, 0x2ab8d8010534e0b6ULL,
                      0x4eacb2e09d6277c1ULL, 0x0bb77a6ad63e739bULL),
        fr_from_limbs(0x4b3c257a872d7d8bULL, 0xfce0051fb9e13377ULL,
                      0x25572e1cd16bf9edULL, 0x25797203f7a0b249ULL)};
    return g;
}

bool on_curve(const jj_point& p) {
    fr x2 = p.x.square();
    fr y2 = p.y.square();
    return curve_a * x2 + y2 == fr::one() + curve_d * x2 * y2;
}

jj_point add(const jj_point& p, const jj_point& q) {
    return normalize(padd(lift(p), lift(q)));
}

jj_point negate(const jj_point& p) { return {p.x.neg(), p.y}; }

jj_point mul(const jj_scalar& k, const jj_point& p) {
    auto bits = k.to_bytes_be();
    proj acc = proj::identity();
    proj base = lift(p);
    bool started = false;  // skip leading zeros
    for (auto byte : bits) {
        for (int i = 7; i >= 0; --i) {
            if (started) acc = padd(acc, acc);
            if ((byte >> i) & 1) {
                acc = padd(acc, base);
                started = true;
            }
        }
    }
    return normalize(acc);
}

namespace {

// table[w][d-1] = d * 16^w * G for 4-bit windows: 64 window positions,
// nonzero digits 1..15
using base_window_table = std::array<std::array<proj, 15>, 64>;

const base_window_table& base_table() {
    static const base_window_table table = [] {
        base_window_table t{};
        proj window_base = lift(base_point());
        for (int w = 0; w < 64; ++w) {
            proj cur = window_base;
            for (int d = 1; d <= 15; ++d) {
                t[static_cast<std::size_t>(w)][static_cast<std::size_t>(d - 1)] =
                    cur;
                cur = padd(cur, window_base);
            }
            window_base = cur;  // 16 * previous window base
        }
        return t;
    }();
    return table;
}

}  // namespace

jj_point mul_base(const jj_scalar& k) {
    const auto& table = base_table();
    auto be = k.to_bytes_be();
    proj acc = proj::identity();
    for (int w = 0; w < 64; ++w) {
        // window w covers bits [4w, 4w+4); byte 31 holds windows 0 and 1
        std::uint8_t byte = be[static_cast<std::size_t>(31 - w / 2)];
        std::uint8_t digit = (w % 2) ? (byte >> 4) : (byte & 0x0f);
        if (digit)
            acc = padd(acc, table[static_cast<std::size_t>(w)]
                                 [static_cast<std::size_t>(digit - 1)]);
    }
    return normalize(acc);
}

}  // namespace offcbdc::jubjub
