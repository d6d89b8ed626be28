#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "offcbdc/commit.hpp"
#include "offcbdc/schnorr.hpp"

namespace offcbdc {

// The eight statements that can be proven. Everything a wallet or the bank
// ever verifies is an instance of one of these.
enum class relation_id : std::uint8_t {
    enroll = 0,
    payment = 1,
    create_state = 2,
    create_dep = 3,
    complete_state = 4,
    complete_dep = 5,
    sync = 6,
    recovery = 7,
};

inline constexpr int relation_count = 8;

std::string_view relation_name(relation_id rel);

struct public_inputs {
    std::vector<fr> slots;

    bool operator==(const public_inputs& o) const { return slots == o.slots; }
};

struct witness {
    std::vector<fr> slots;
};

std::size_t public_arity(relation_id rel);
std::size_t witness_arity(relation_id rel);

// Declared integer domains, embedded in the field: amounts and balances are
// minor units below 2^64, epochs are below 2^32.
inline constexpr std::uint64_t max_epoch = 0xffffffffULL;

// Ground-truth predicate: true iff every constraint of the relation holds on
// (public, witness). Throws std::invalid_argument on arity mismatch.
bool relation_satisfied(relation_id rel, const public_inputs& pub, const witness& wit);

// Name of the first violated constraint, or nullopt if satisfied.
std::optional<std::string_view> first_violation(relation_id rel,
                                                const public_inputs& pub,
                                                const witness& wit);

// The seven openings of a state commitment, in commitment order.
struct state_values {
    fr sk;
    fr holding_limit;
    fr counter;
    fr balance;
    fr epoch;
    fr scm_prev;
    fr ccm;
};

inline fr state_commitment(const fr& blind, const state_values& v) {
    return commit(blind, {v.sk, v.holding_limit, v.counter, v.balance, v.epoch,
                          v.scm_prev, v.ccm});
}

// --- instance builders -----------------------------------------------------
// One struct per relation with the slots spelled out; wallets and tests build
// these and convert to the flat slot vectors.

struct enroll_instance {
    // public
    fr id;
    fr scm0;
    fr epoch;
    fr holding_limit;
    fr challenge;
    // witness
    fr sk;
    fr blind_state;

    public_inputs to_public() const;
    witness to_witness() const;
};

struct payment_instance {
    // public
    fr pcm;
    // witness
    fr sk, holding_limit, counter, balance, epoch, value;
    fr scm_prev_prev, scm_new, ccm_old, ccm_new;
    fr blind_old, blind_new, blind_pm;

    public_inputs to_public() const;
    witness to_witness() const;
};

struct create_state_instance {
    // public
    fr scm_new, dcm_new, sn_new, ds_new;
    // witness
    fr sk, holding_limit, counter, balance, epoch, value;
    fr scm_prev_prev, ccm_old, ccm_new;
    fr blind_old, blind_new, blind_dep;

    public_inputs to_public() const;
    witness to_witness() const;
};

struct create_dep_instance {
    // public
    verifying_key bank_key;
    fr dcm;
    // witness
    fr scm_prev;
    signature sigma;
    fr blind_dep;

    public_inputs to_public() const;
    witness to_witness() const;
};

struct complete_state_instance {
    // public
    fr delta_sync, scm_new, dcm_new, pcm;
    // witness
    fr sk, holding_limit, counter, balance, epoch, sender_epoch, value;
    fr scm_prev_prev, ccm_old, ccm_new;
    fr blind_req, blind_old, blind_new, blind_dep, blind_pm;

    public_inputs to_public() const;
    witness to_witness() const;
};

struct complete_dep_instance {
    // public
    verifying_key bank_key;
    fr dcm;
    // witness
    fr scm_prev, ccm;
    signature sigma_prev, sigma_counterparty;
    fr blind_dep;

    public_inputs to_public() const;
    witness to_witness() const;
};

struct sync_instance {
    // public
    verifying_key bank_key;
    fr scm_new, epoch, challenge;
    // witness
    fr sk, holding_limit, counter, balance, epoch_old;
    fr scm_prev_prev, ccm_old, blind_old, blind_new;
    signature sigma_prev;

    public_inputs to_public() const;
    witness to_witness() const;
};

struct recovery_instance {
    // public
    verifying_key bank_key;
    fr id, value, scm, pcm;
    // witness
    fr sk, holding_limit, counter, balance, epoch, sender_epoch;
    fr scm_prev, ccm, blind_state, blind_req, blind_pm;
    signature sigma_prev;

    public_inputs to_public() const;
    witness to_witness() const;
};

}  // namespace offcbdc
