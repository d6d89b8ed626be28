#include "offcbdc/schnorr.hpp"

#include "offcbdc/sha256.hpp"

namespace offcbdc {

namespace {

jj_scalar challenge_scalar(const jj_point& r, const jj_point& pk, const fr& m) {
    sha256 h;
    const char* tag = "offcbdc/schnorr/v1";
    h.update({reinterpret_cast<const std::uint8_t*>(tag), 18});
    h.update(r.x.to_bytes_be());
    h.update(r.y.to_bytes_be());
    h.update(pk.x.to_bytes_be());
    h.update(pk.y.to_bytes_be());
    h.update(m.to_bytes_be());
    return jj_scalar::from_bytes_be_reduced(h.finish());
}

}  // namespace

verifying_key signing_key::to_verifying() const {
    return {jubjub::mul_base(secret)};
}

signature_keypair signature_keypair::generate(rng& r) {
    signing_key sk{r.next_scalar()};
    while (sk.secret.is_zero()) sk.secret = r.next_scalar();
    return {sk, sk.to_verifying()};
}

signature sign(const signing_key& key, const fr& message) {
    sha256 h;
    const char* tag = "offcbdc/schnorr-nonce/v1";
    h.update({reinterpret_cast<const std::uint8_t*>(tag), 24});
    h.update(key.secret.to_bytes_be());
    h.update(message.to_bytes_be());
    jj_scalar nonce = jj_scalar::from_bytes_be_reduced(h.finish());
    if (nonce.is_zero()) nonce = jj_scalar::one();

    jj_point r = jubjub::mul_base(nonce);
    jj_point pk = jubjub::mul_base(key.secret);
    jj_scalar e = challenge_scalar(r, pk, message);
    return {r.x, r.y, nonce + e * key.secret};
}

bool verify(const verifying_key& key, const fr& message, const signature& sig) {
    jj_point r{sig.r_x, sig.r_y};
    if (!jubjub::on_curve(r) || !jubjub::on_curve(key.point)) return false;
    jj_scalar e = challenge_scalar(r, key.point, message);
    jj_point lhs = jubjub::mul_base(sig.s);
    jj_point rhs = jubjub::add(r, jubjub::mul(e, key.point));
    return lhs == rhs;
}

void write_signature(byte_writer& w, const signature& sig) {
    w.raw(sig.r_x.to_bytes_be());
    w.raw(sig.r_y.to_bytes_be());
    w.raw(sig.s.to_bytes_be());
}

signature read_signature(byte_reader& r) {
    signature sig;
    sig.r_x = read_fr(r);
    sig.r_y = read_fr(r);
    std::size_t at = r.offset();
    auto s = jj_scalar::from_bytes_be(r.raw(32));
    if (!s) throw decode_error(at, "signature scalar out of range");
    sig.s = *s;
    return sig;
}

void write_verifying_key(byte_writer& w, const verifying_key& vk) {
    w.raw(vk.point.x.to_bytes_be());
    w.raw(vk.point.y.to_bytes_be());
}

verifying_key read_verifying_key(byte_reader& r) {
    verifying_key vk;
    vk.point.x = read_fr(r);
    vk.point.y = read_fr(r);
    return vk;
}

}  // namespace offcbdc
