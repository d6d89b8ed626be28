#pragma once

#include <optional>

#include "offcbdc/bytes.hpp"
#include "offcbdc/jubjub.hpp"
#include "offcbdc/rng.hpp"

namespace offcbdc {

// Schnorr signature over Baby Jubjub on a single field-element message.
// Encoding: R.x || R.y || s, 96 bytes.
struct signature {
    fr r_x;
    fr r_y;
    jj_scalar s;

    bool operator==(const signature& o) const {
        return r_x == o.r_x && r_y == o.r_y && s == o.s;
    }
};

struct verifying_key {
    jj_point point;

    bool operator==(const verifying_key& o) const { return point == o.point; }
};

struct signing_key {
    jj_scalar secret;

    verifying_key to_verifying() const;
};

struct signature_keypair {
    signing_key sk;
    verifying_key vk;

    static signature_keypair generate(rng& r);
};

// Deterministic nonce (derived from the secret and the message), so repeated
// signing of one message yields identical bytes.
signature sign(const signing_key& key, const fr& message);

// False on any malformed input; never throws.
bool verify(const verifying_key& key, const fr& message, const signature& sig);

void write_signature(byte_writer& w, const signature& sig);
signature read_signature(byte_reader& r);

void write_verifying_key(byte_writer& w, const verifying_key& vk);
verifying_key read_verifying_key(byte_reader& r);

}  // namespace offcbdc
