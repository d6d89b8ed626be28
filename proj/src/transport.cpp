#include "offcbdc/transport.hpp"

namespace offcbdc {

namespace {

void write_bundle(byte_writer& w, const proof_bundle& b) { w.var_bytes(b.encode()); }

proof_bundle read_bundle(byte_reader& r) {
    bytes enc = r.var_bytes();
    byte_reader br(enc);
    auto b = proof_bundle::decode(br);
    br.expect_done();
    return b;
}

}  // namespace

bytes payment_request::encode() const {
    byte_writer w;
    write_fr(w, rcm);
    w.u64(value);
    return w.take();
}

payment_request payment_request::decode(byte_reader& r) {
    payment_request out;
    out.rcm = read_fr(r);
    out.value = r.u64();
    return out;
}

void payment_message::write(byte_writer& w) const {
    write_fr(w, scm_new);
    w.u64(value);
    w.u32(sender_epoch);
    write_fr(w, blind_pm);
    write_bundle(w, zkp_pm);
}

payment_message payment_message::read(byte_reader& r) {
    payment_message m;
    m.scm_new = read_fr(r);
    m.value = r.u64();
    m.sender_epoch = r.u32();
    m.blind_pm = read_fr(r);
    m.zkp_pm = read_bundle(r);
    return m;
}

bytes payment_package::encode() const {
    byte_writer w;
    write_related_history(w, history);
    pm.write(w);
    return w.take();
}

payment_package payment_package::decode(byte_reader& r) {
    payment_package p;
    p.history = read_related_history(r);
    p.pm = payment_message::read(r);
    return p;
}

bytes enroll_message::encode() const {
    byte_writer w;
    write_bundle(w, zkp_enroll);
    write_fr(w, id);
    write_fr(w, scm0);
    w.u32(epoch);
    w.u64(holding_limit);
    write_fr(w, challenge);
    return w.take();
}

enroll_message enroll_message::decode(byte_reader& r) {
    enroll_message m;
    m.zkp_enroll = read_bundle(r);
    m.id = read_fr(r);
    m.scm0 = read_fr(r);
    m.epoch = r.u32();
    m.holding_limit = r.u64();
    m.challenge = read_fr(r);
    return m;
}

bytes sync_message::encode() const {
    byte_writer w;
    write_fr(w, scm_new);
    w.u32(epoch);
    write_fr(w, challenge);
    write_bundle(w, zkp_sync);
    return w.take();
}

sync_message sync_message::decode(byte_reader& r) {
    sync_message m;
    m.scm_new = read_fr(r);
    m.epoch = r.u32();
    m.challenge = read_fr(r);
    m.zkp_sync = read_bundle(r);
    return m;
}

bytes encode_sig_request(const sig_request& req) {
    byte_writer w;
    if (const auto* c = std::get_if<creation_sig_request>(&req)) {
        w.u8(0);
        write_fr(w, c->scm);
        write_fr(w, c->dcm);
        write_fr(w, c->sn);
        write_fr(w, c->ds);
        write_bundle(w, c->zkp_state);
        write_bundle(w, c->zkp_dep);
    } else {
        const auto& comp = std::get<completion_sig_request>(req);
        w.u8(1);
        write_fr(w, comp.scm);
        write_fr(w, comp.dcm);
        write_fr(w, comp.pcm);
        write_bundle(w, comp.zkp_state);
        write_bundle(w, comp.zkp_dep);
        write_bundle(w, comp.zkp_pm);
    }
    return w.take();
}

sig_request decode_sig_request(byte_reader& r) {
    std::size_t at = r.offset();
    std::uint8_t tag = r.u8();
    if (tag == 0) {
        creation_sig_request c;
        c.scm = read_fr(r);
        c.dcm = read_fr(r);
        c.sn = read_fr(r);
        c.ds = read_fr(r);
        c.zkp_state = read_bundle(r);
        c.zkp_dep = read_bundle(r);
        return c;
    }
    if (tag == 1) {
        completion_sig_request c;
        c.scm = read_fr(r);
        c.dcm = read_fr(r);
        c.pcm = read_fr(r);
        c.zkp_state = read_bundle(r);
        c.zkp_dep = read_bundle(r);
        c.zkp_pm = read_bundle(r);
        return c;
    }
    throw decode_error(at, "unknown signature request tag");
}

bytes recovery_message::encode() const {
    byte_writer w;
    write_fr(w, scm);
    write_fr(w, id);
    w.u64(value);
    write_bundle(w, zkp_recovery);
    write_related_history(w, history);
    return w.take();
}

recovery_message recovery_message::decode(byte_reader& r) {
    recovery_message m;
    m.scm = read_fr(r);
    m.id = read_fr(r);
    m.value = r.u64();
    m.zkp_recovery = read_bundle(r);
    m.history = read_related_history(r);
    return m;
}

bytes bank_response::encode() const {
    byte_writer w;
    w.u8(static_cast<std::uint8_t>(status));
    w.u8(sigma ? 1 : 0);
    if (sigma) write_signature(w, *sigma);
    w.var_bytes({reinterpret_cast<const std::uint8_t*>(reason.data()), reason.size()});
    return w.take();
}

bank_response bank_response::decode(byte_reader& r) {
    bank_response out;
    std::size_t at = r.offset();
    std::uint8_t s = r.u8();
    if (s > 2) throw decode_error(at, "unknown bank status");
    out.status = static_cast<bank_status>(s);
    if (r.u8() != 0) out.sigma = read_signature(r);
    bytes reason = r.var_bytes(1u << 16);
    out.reason.assign(reason.begin(), reason.end());
    return out;
}

bytes ledger_entry::encode() const {
    byte_writer w;
    std::uint8_t flags = 0;
    if (sn) flags |= 1;
    if (ds) flags |= 2;
    if (sigma) flags |= 4;
    w.u8(flags);
    if (sn) write_fr(w, *sn);
    if (ds) write_fr(w, *ds);
    write_fr(w, scm);
    if (sigma) write_signature(w, *sigma);
    return w.take();
}

ledger_entry ledger_entry::decode(byte_reader& r) {
    ledger_entry e;
    std::size_t at = r.offset();
    std::uint8_t flags = r.u8();
    if (flags & ~std::uint8_t{7}) throw decode_error(at, "unknown ledger entry flags");
    if (flags & 1) e.sn = read_fr(r);
    if (flags & 2) e.ds = read_fr(r);
    e.scm = read_fr(r);
    if (flags & 4) e.sigma = read_signature(r);
    return e;
}

bytes encode_frame(const frame& f) {
    byte_writer w;
    w.u8(static_cast<std::uint8_t>(f.type));
    w.var_bytes(f.payload);
    return w.take();
}

frame decode_frame(byte_reader& r) {
    std::size_t at = r.offset();
    std::uint8_t t = r.u8();
    bool known =
        (t >= 0x01 && t <= 0x07) || (t >= 0x81 && t <= 0x84) || t == 0xff;
    if (!known) throw decode_error(at, "unknown frame type");
    frame f;
    f.type = static_cast<frame_type>(t);
    f.payload = r.var_bytes(1u << 26);
    return f;
}

}  // namespace offcbdc
