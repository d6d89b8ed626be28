#pragma once

#include "offcbdc/field.hpp"

namespace offcbdc {

// Baby Jubjub: twisted Edwards curve a*x^2 + y^2 = 1 + d*x^2*y^2 over the
// BN254 scalar field. Group operations stay in the protocol field, which is
// what makes the signature scheme provable inside the payment relations.
struct jj_point {
    fr x;
    fr y;

    static jj_point identity() { return {fr::zero(), fr::one()}; }

    bool is_identity() const { return x.is_zero() && y == fr::one(); }
    bool operator==(const jj_point& o) const { return x == o.x && y == o.y; }
};

namespace jubjub {

inline const fr curve_a = fr::from_u64(168700);
inline const fr curve_d = fr::from_u64(168696);

// Generator of the prime-order subgroup (cofactor 8 already cleared).
const jj_point& base_point();

bool on_curve(const jj_point& p);
jj_point add(const jj_point& p, const jj_point& q);
jj_point negate(const jj_point& p);

// Double-and-add over the scalar's canonical bits.
jj_point mul(const jj_scalar& k, const jj_point& p);

// Fixed-base multiplication of the subgroup generator via a precomputed
// window table; the hot path of signing.
jj_point mul_base(const jj_scalar& k);

}  // namespace jubjub

}  // namespace offcbdc
