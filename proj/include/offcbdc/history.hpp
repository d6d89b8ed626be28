#pragma once

#include <map>
#include <optional>
#include <variant>

#include "offcbdc/proof.hpp"
#include "offcbdc/schnorr.hpp"

namespace offcbdc {

enum class state_kind : std::uint8_t {
    enrollment = 0,
    creation = 1,
    completion = 2,
    synchronization = 3,
};

// --- related-history elements ----------------------------------------------
// The five shapes a history element can take. A state that already has a
// bank signature travels as a bare leaf; unsigned states carry the material
// to request one, either with a ready dependency proof or with the openings
// that let the recipient build that proof after the dependencies are signed.

struct signed_leaf {
    fr scm;
    signature sigma;
};

struct creation_with_dep {
    fr sn, ds, scm, dcm;
    proof_bundle zkp_state, zkp_dep;
};

struct creation_with_openings {
    fr sn, ds, scm;
    proof_bundle zkp_state;
    fr blind_dep, scm_prev;
};

struct completion_with_dep {
    fr scm, dcm, pcm;
    proof_bundle zkp_state, zkp_pm, zkp_dep;
};

struct completion_with_openings {
    fr scm, pcm;
    proof_bundle zkp_state, zkp_pm;
    fr blind_dep, scm_prev, ccm;
};

using history_element =
    std::variant<signed_leaf, creation_with_dep, creation_with_openings,
                 completion_with_dep, completion_with_openings>;

fr element_scm(const history_element& e);
bool element_is_completion_shape(const history_element& e);

using related_history = std::map<fr, history_element, fr_raw_less>;

void insert_element(related_history& h, const history_element& e);

void write_element(byte_writer& w, const history_element& e);
history_element read_element(byte_reader& r);
void write_related_history(byte_writer& w, const related_history& h);
related_history read_related_history(byte_reader& r);

// --- wallet-side stores ------------------------------------------------------

// Openings of one own state commitment. Integer-typed where the value domain
// is an integer; converted to field elements at the commitment boundary.
struct state_opening {
    fr sk;
    std::uint64_t holding_limit = 0;
    std::uint64_t counter = 0;
    std::uint64_t balance = 0;
    std::uint32_t epoch = 0;
    fr scm_prev;
    fr ccm;
    fr blind;

    state_values to_values() const {
        return {sk,
                fr::from_u64(holding_limit),
                fr::from_u64(counter),
                fr::from_u64(balance),
                fr::from_u64(epoch),
                scm_prev,
                ccm};
    }

    fr commitment() const { return state_commitment(blind, to_values()); }
};

struct internal_entry {
    state_opening opening;
    state_kind kind = state_kind::creation;
    std::optional<fr> blind_req;  // outstanding payment request, at most one
};

// Forwardable signature-request material for one state (own or foreign).
struct external_entry {
    state_kind kind = state_kind::creation;
    std::optional<signature> sigma;
    std::optional<fr> dcm, sn, ds, pcm, blind_dep, scm_prev, ccm;
    std::optional<proof_bundle> zkp_state, zkp_dep, zkp_pm;
};

struct recovery_entry {
    fr blind_pm;
    std::uint64_t value = 0;
    std::uint32_t sender_epoch = 0;
};

struct history_stores {
    std::map<fr, internal_entry, fr_raw_less> internal;
    std::map<fr, external_entry, fr_raw_less> external;
    std::map<fr, recovery_entry, fr_raw_less> recovery;
};

// Number of known states still waiting for a bank signature.
std::size_t unsigned_entry_count(const history_stores& h);

// Element for `scm` in the shape the related history ships it (bank-signed
// leaf, or unsigned state material). Throws if scm is unknown.
history_element make_element(const fr& scm, const external_entry& entry);

// Folds a received element into the store, never downgrading (an existing
// signature or dependency proof is kept). Recomputes dcm from openings so
// later signature requests can name it.
void merge_element(history_stores& stores, const history_element& e);

void write_external_entry(byte_writer& w, const fr& scm, const external_entry& e);
std::pair<fr, external_entry> read_external_entry(byte_reader& r);

}  // namespace offcbdc
