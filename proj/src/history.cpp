#include "offcbdc/history.hpp"

#include <stdexcept>

namespace offcbdc {

namespace {

enum element_tag : std::uint8_t {
    tag_signed_leaf = 0,
    tag_creation_with_dep = 1,
    tag_creation_with_openings = 2,
    tag_completion_with_dep = 3,
    tag_completion_with_openings = 4,
};

void write_bundle(byte_writer& w, const proof_bundle& b) {
    bytes enc = b.encode();
    w.var_bytes(enc);
}

proof_bundle read_bundle(byte_reader& r) {
    bytes enc = r.var_bytes();
    byte_reader br(enc);
    auto b = proof_bundle::decode(br);
    br.expect_done();
    return b;
}

}  // namespace

fr element_scm(const history_element& e) {
    return std::visit([](const auto& v) { return v.scm; }, e);
}

bool element_is_completion_shape(const history_element& e) {
    return std::holds_alternative<completion_with_dep>(e) ||
           std::holds_alternative<completion_with_openings>(e);
}

void insert_element(related_history& h, const history_element& e) {
    h.emplace(element_scm(e), e);
}

void write_element(byte_writer& w, const history_element& e) {
    if (const auto* leaf = std::get_if<signed_leaf>(&e)) {
        w.u8(tag_signed_leaf);
        write_fr(w, leaf->scm);
        write_signature(w, leaf->sigma);
    } else if (const auto* c = std::get_if<creation_with_dep>(&e)) {
        w.u8(tag_creation_with_dep);
        write_fr(w, c->sn);
        write_fr(w, c->ds);
        write_fr(w, c->scm);
        write_fr(w, c->dcm);
        write_bundle(w, c->zkp_state);
        write_bundle(w, c->zkp_dep);
    } else if (const auto* c = std::get_if<creation_with_openings>(&e)) {
        w.u8(tag_creation_with_openings);
        write_fr(w, c->sn);
        write_fr(w, c->ds);
        write_fr(w, c->scm);
        write_bundle(w, c->zkp_state);
        write_fr(w, c->blind_dep);
        write_fr(w, c->scm_prev);
    } else if (const auto* c = std::get_if<completion_with_dep>(&e)) {
        w.u8(tag_completion_with_dep);
        write_fr(w, c->scm);
        write_fr(w, c->dcm);
        write_fr(w, c->pcm);
        write_bundle(w, c->zkp_state);
        write_bundle(w, c->zkp_pm);
        write_bundle(w, c->zkp_dep);
    } else if (const auto* c = std::get_if<completion_with_openings>(&e)) {
        w.u8(tag_completion_with_openings);
        write_fr(w, c->scm);
        write_fr(w, c->pcm);
        write_bundle(w, c->zkp_state);
        write_bundle(w, c->zkp_pm);
        write_fr(w, c->blind_dep);
        write_fr(w, c->scm_prev);
        write_fr(w, c->ccm);
    }
}

history_element read_element(byte_reader& r) {
    std::size_t at = r.offset();
    std::uint8_t tag = r.u8();
    switch (tag) {
        case tag_signed_leaf: {
            signed_leaf leaf;
            leaf.scm = read_fr(r);
            leaf.sigma = read_signature(r);
            return leaf;
        }
        case tag_creation_with_dep: {
            creation_with_dep c;
            c.sn = read_fr(r);
            c.ds = read_fr(r);
            c.scm = read_fr(r);
            c.dcm = read_fr(r);
            c.zkp_state = read_bundle(r);
            c.zkp_dep = read_bundle(r);
            return c;
        }
        case tag_creation_with_openings: {
            creation_with_openings c;
            c.sn = read_fr(r);
            c.ds = read_fr(r);
            c.scm = read_fr(r);
            c.zkp_state = read_bundle(r);
            c.blind_dep = read_fr(r);
            c.scm_prev = read_fr(r);
            return c;
        }
        case tag_completion_with_dep: {
            completion_with_dep c;
            c.scm = read_fr(r);
            c.dcm = read_fr(r);
            c.pcm = read_fr(r);
            c.zkp_state = read_bundle(r);
            c.zkp_pm = read_bundle(r);
            c.zkp_dep = read_bundle(r);
            return c;
        }
        case tag_completion_with_openings: {
            completion_with_openings c;
            c.scm = read_fr(r);
            c.pcm = read_fr(r);
            c.zkp_state = read_bundle(r);
            c.zkp_pm = read_bundle(r);
            c.blind_dep = read_fr(r);
            c.scm_prev = read_fr(r);
            c.ccm = read_fr(r);
            return c;
        }
        default:
            throw decode_error(at, "unknown history element tag");
    }
}

void write_related_history(byte_writer& w, const related_history& h) {
    w.u32(static_cast<std::uint32_t>(h.size()));
    for (const auto& [scm, e] : h) write_element(w, e);
}

related_history read_related_history(byte_reader& r) {
    std::size_t at = r.offset();
    std::uint32_t n = r.u32();
    if (n > 100000) throw decode_error(at, "related history too large");
    related_history h;
    for (std::uint32_t i = 0; i < n; ++i) insert_element(h, read_element(r));
    return h;
}

std::size_t unsigned_entry_count(const history_stores& h) {
    std::size_t n = 0;
    for (const auto& [scm, e] : h.external)
        if (!e.sigma) ++n;
    return n;
}

history_element make_element(const fr& scm, const external_entry& entry) {
    if (entry.sigma) return signed_leaf{scm, *entry.sigma};
    switch (entry.kind) {
        case state_kind::creation:
            if (!entry.sn || !entry.ds || !entry.zkp_state)
                throw std::logic_error("creation entry missing request material");
            if (entry.zkp_dep) {
                if (!entry.dcm) throw std::logic_error("creation entry missing dcm");
                return creation_with_dep{*entry.sn, *entry.ds,      scm,
                                         *entry.dcm, *entry.zkp_state,
                                         *entry.zkp_dep};
            }
            if (!entry.blind_dep || !entry.scm_prev)
                throw std::logic_error("creation entry missing openings");
            return creation_with_openings{*entry.sn,        *entry.ds, scm,
                                          *entry.zkp_state, *entry.blind_dep,
                                          *entry.scm_prev};
        case state_kind::completion:
            if (!entry.pcm || !entry.zkp_state || !entry.zkp_pm)
                throw std::logic_error("completion entry missing request material");
            if (entry.zkp_dep) {
                if (!entry.dcm) throw std::logic_error("completion entry missing dcm");
                return completion_with_dep{scm,
                                           *entry.dcm,
                                           *entry.pcm,
                                           *entry.zkp_state,
                                           *entry.zkp_pm,
                                           *entry.zkp_dep};
            }
            if (!entry.blind_dep || !entry.scm_prev || !entry.ccm)
                throw std::logic_error("completion entry missing openings");
            return completion_with_openings{
                scm,          *entry.pcm,       *entry.zkp_state, *entry.zkp_pm,
                *entry.blind_dep, *entry.scm_prev, *entry.ccm};
        case state_kind::enrollment:
        case state_kind::synchronization:
            // always signed in honest operation, handled by the sigma branch
            throw std::logic_error("unsigned enrollment/synchronization state");
    }
    throw std::logic_error("unknown state kind");
}

void merge_element(history_stores& stores, const history_element& e) {
    fr scm = element_scm(e);
    external_entry& entry = stores.external[scm];
    if (const auto* leaf = std::get_if<signed_leaf>(&e)) {
        if (!entry.sigma) entry.sigma = leaf->sigma;
        return;
    }
    if (const auto* c = std::get_if<creation_with_dep>(&e)) {
        entry.kind = state_kind::creation;
        entry.sn = c->sn;
        entry.ds = c->ds;
        entry.dcm = c->dcm;
        if (!entry.zkp_state) entry.zkp_state = c->zkp_state;
        if (!entry.zkp_dep) entry.zkp_dep = c->zkp_dep;
        return;
    }
    if (const auto* c = std::get_if<creation_with_openings>(&e)) {
        entry.kind = state_kind::creation;
        entry.sn = c->sn;
        entry.ds = c->ds;
        if (!entry.zkp_state) entry.zkp_state = c->zkp_state;
        entry.blind_dep = c->blind_dep;
        entry.scm_prev = c->scm_prev;
        if (!entry.dcm) entry.dcm = commit(c->blind_dep, {c->scm_prev});
        return;
    }
    if (const auto* c = std::get_if<completion_with_dep>(&e)) {
        entry.kind = state_kind::completion;
        entry.dcm = c->dcm;
        entry.pcm = c->pcm;
        if (!entry.zkp_state) entry.zkp_state = c->zkp_state;
        if (!entry.zkp_pm) entry.zkp_pm = c->zkp_pm;
        if (!entry.zkp_dep) entry.zkp_dep = c->zkp_dep;
        return;
    }
    const auto& c = std::get<completion_with_openings>(e);
    entry.kind = state_kind::completion;
    entry.pcm = c.pcm;
    if (!entry.zkp_state) entry.zkp_state = c.zkp_state;
    if (!entry.zkp_pm) entry.zkp_pm = c.zkp_pm;
    entry.blind_dep = c.blind_dep;
    entry.scm_prev = c.scm_prev;
    entry.ccm = c.ccm;
    if (!entry.dcm) entry.dcm = commit(c.blind_dep, {c.scm_prev, c.ccm});
}

namespace {

void write_opt_fr(byte_writer& w, const std::optional<fr>& v) {
    w.u8(v ? 1 : 0);
    if (v) write_fr(w, *v);
}

std::optional<fr> read_opt_fr(byte_reader& r) {
    if (r.u8() == 0) return std::nullopt;
    return read_fr(r);
}

void write_opt_bundle(byte_writer& w, const std::optional<proof_bundle>& v) {
    w.u8(v ? 1 : 0);
    if (v) write_bundle(w, *v);
}

std::optional<proof_bundle> read_opt_bundle(byte_reader& r) {
    if (r.u8() == 0) return std::nullopt;
    return read_bundle(r);
}

}  // namespace

void write_external_entry(byte_writer& w, const fr& scm, const external_entry& e) {
    write_fr(w, scm);
    w.u8(static_cast<std::uint8_t>(e.kind));
    w.u8(e.sigma ? 1 : 0);
    if (e.sigma) write_signature(w, *e.sigma);
    write_opt_fr(w, e.dcm);
    write_opt_fr(w, e.sn);
    write_opt_fr(w, e.ds);
    write_opt_fr(w, e.pcm);
    write_opt_fr(w, e.blind_dep);
    write_opt_fr(w, e.scm_prev);
    write_opt_fr(w, e.ccm);
    write_opt_bundle(w, e.zkp_state);
    write_opt_bundle(w, e.zkp_dep);
    write_opt_bundle(w, e.zkp_pm);
}

std::pair<fr, external_entry> read_external_entry(byte_reader& r) {
    fr scm = read_fr(r);
    external_entry e;
    std::size_t at = r.offset();
    std::uint8_t kind = r.u8();
    if (kind > 3) throw decode_error(at, "unknown state kind");
    e.kind = static_cast<state_kind>(kind);
    if (r.u8() != 0) e.sigma = read_signature(r);
    e.dcm = read_opt_fr(r);
    e.sn = read_opt_fr(r);
    e.ds = read_opt_fr(r);
    e.pcm = read_opt_fr(r);
    e.blind_dep = read_opt_fr(r);
    e.scm_prev = read_opt_fr(r);
    e.ccm = read_opt_fr(r);
    e.zkp_state = read_opt_bundle(r);
    e.zkp_dep = read_opt_bundle(r);
    e.zkp_pm = read_opt_bundle(r);
    return {scm, e};
}

}  // namespace offcbdc
