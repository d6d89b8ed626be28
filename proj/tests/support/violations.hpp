#pragma once

// One targeted violation per listed constraint of every relation. Each case
// perturbs exactly one quantity; `expect` names the constraint the oracle
// must report first (empty when the perturbation cascades through derived
// values and the first report is implementation-defined but must exist).

#include <vector>

#include "support/instances.hpp"

namespace offcbdc::testsupport {

struct violation_case {
    relation_id rel;
    std::string label;
    std::string expect;  // constraint name, or "" for any
    public_inputs pub;
    witness wit;
};

// Honest-by-construction instance except for the out-of-range amounts.
inline create_state_instance create_state_with_amounts(rng& r, std::uint64_t bal,
                                                       std::uint64_t val) {
    auto c = random_create_state(r);
    c.balance = fr::from_u64(bal);
    c.value = fr::from_u64(val);
    fr scm_old = state_commitment(c.blind_old,
                                  {c.sk, c.holding_limit, c.counter, c.balance,
                                   c.epoch, c.scm_prev_prev, c.ccm_old});
    fr next_counter = c.counter + fr::one();
    c.scm_new = state_commitment(
        c.blind_new, {c.sk, c.holding_limit, next_counter, c.balance - c.value,
                      c.epoch, scm_old, c.ccm_new});
    c.sn_new = prf_sn(c.sk, next_counter);
    c.ds_new = prf_id(c.sk) + c.scm_new * prf_ds(c.sk, next_counter);
    c.dcm_new = commit(c.blind_dep, {scm_old});
    return c;
}

inline complete_state_instance complete_state_with(rng& r, std::uint64_t limit,
                                                   std::uint64_t bal,
                                                   std::uint64_t val,
                                                   std::uint64_t epoch,
                                                   std::uint64_t sender_epoch,
                                                   std::uint64_t delta) {
    auto c = random_complete_state(r, delta);
    c.holding_limit = fr::from_u64(limit);
    c.balance = fr::from_u64(bal);
    c.value = fr::from_u64(val);
    c.epoch = fr::from_u64(epoch);
    c.sender_epoch = fr::from_u64(sender_epoch);
    c.delta_sync = fr::from_u64(delta);
    fr scm_old = state_commitment(c.blind_old,
                                  {c.sk, c.holding_limit, c.counter, c.balance,
                                   c.epoch, c.scm_prev_prev, c.ccm_old});
    fr rcm = commit(c.blind_req, {scm_old});
    c.scm_new = state_commitment(
        c.blind_new, {c.sk, c.holding_limit, c.counter, c.balance + c.value,
                      c.epoch, scm_old, c.ccm_new});
    c.pcm = commit(c.blind_pm, {c.value, rcm, c.ccm_new, c.sender_epoch});
    c.dcm_new = commit(c.blind_dep, {scm_old, c.ccm_new});
    return c;
}

inline std::vector<violation_case> all_violation_cases(rng& r,
                                                       const signature_keypair& bank) {
    std::vector<violation_case> out;
    auto push = [&](relation_id rel, std::string label, std::string expect,
                    public_inputs pub, witness wit) {
        out.push_back({rel, std::move(label), std::move(expect), std::move(pub),
                       std::move(wit)});
    };
    fr one = fr::one();

    // enroll: 2 listed constraints
    {
        auto i = random_enroll(r);
        auto p = i.to_public();
        p.slots[1] += one;
        push(relation_id::enroll, "enroll: tampered initial commitment",
             "initial state recomputation", p, i.to_witness());
    }
    {
        auto i = random_enroll(r);
        auto p = i.to_public();
        p.slots[0] += one;
        push(relation_id::enroll, "enroll: tampered id", "id recomputation", p,
             i.to_witness());
    }

    // payment: 3 listed constraints (old-state opening, new-state, pcm)
    {
        auto i = random_payment(r);
        i.blind_old += one;
        push(relation_id::payment, "payment: perturbed old-state opening",
             "new state recomputation", i.to_public(), i.to_witness());
    }
    {
        auto i = random_payment(r);
        i.scm_new += one;
        push(relation_id::payment, "payment: tampered new state",
             "new state recomputation", i.to_public(), i.to_witness());
    }
    {
        auto i = random_payment(r);
        auto p = i.to_public();
        p.slots[0] += one;
        push(relation_id::payment, "payment: tampered pcm", "pcm recomputation",
             p, i.to_witness());
    }

    // create-state: 7 listed constraints
    {
        auto i = random_create_state(r);
        i.sk += one;
        push(relation_id::create_state, "create-state: wrong sk (id derivation)",
             "", i.to_public(), i.to_witness());
    }
    {
        auto i = random_create_state(r);
        i.blind_old += one;
        push(relation_id::create_state, "create-state: perturbed old-state opening",
             "new state recomputation", i.to_public(), i.to_witness());
    }
    {
        auto i = random_create_state(r);
        auto p = i.to_public();
        p.slots[0] += one;
        push(relation_id::create_state, "create-state: tampered new state", "",
             p, i.to_witness());
    }
    {
        auto i = random_create_state(r);
        auto p = i.to_public();
        p.slots[2] += one;
        push(relation_id::create_state, "create-state: tampered sn",
             "sn recomputation", p, i.to_witness());
    }
    {
        auto i = random_create_state(r);
        auto p = i.to_public();
        p.slots[3] += one;
        push(relation_id::create_state, "create-state: tampered ds",
             "ds recomputation", p, i.to_witness());
    }
    {
        auto i = random_create_state(r);
        auto p = i.to_public();
        p.slots[1] += one;
        push(relation_id::create_state, "create-state: tampered dcm",
             "dcm recomputation", p, i.to_witness());
    }
    {
        auto i = create_state_with_amounts(r, 90, 100);
        push(relation_id::create_state, "create-state: value exceeds balance",
             "balance covers value", i.to_public(), i.to_witness());
    }

    // create-dep: 2 listed constraints
    {
        auto i = random_create_dep(r, bank);
        auto p = i.to_public();
        p.slots[2] += one;
        push(relation_id::create_dep, "create-dep: tampered dcm",
             "dcm recomputation", p, i.to_witness());
    }
    {
        auto i = random_create_dep(r, bank);
        auto w = i.to_witness();
        w.slots[1] += one;  // R.x of the signature
        push(relation_id::create_dep, "create-dep: tampered signature",
             "previous state signature", i.to_public(), w);
    }

    // complete-state: 7 listed constraints
    {
        auto i = random_complete_state(r, 30);
        i.blind_old += one;
        push(relation_id::complete_state,
             "complete-state: perturbed old-state opening",
             "new state recomputation", i.to_public(), i.to_witness());
    }
    {
        auto i = random_complete_state(r, 30);
        i.blind_req += one;
        push(relation_id::complete_state,
             "complete-state: perturbed request opening", "pcm recomputation",
             i.to_public(), i.to_witness());
    }
    {
        auto i = random_complete_state(r, 30);
        auto p = i.to_public();
        p.slots[1] += one;
        push(relation_id::complete_state, "complete-state: tampered new state",
             "new state recomputation", p, i.to_witness());
    }
    {
        auto i = random_complete_state(r, 30);
        auto p = i.to_public();
        p.slots[3] += one;
        push(relation_id::complete_state, "complete-state: tampered pcm",
             "pcm recomputation", p, i.to_witness());
    }
    {
        auto i = random_complete_state(r, 30);
        auto p = i.to_public();
        p.slots[2] += one;
        push(relation_id::complete_state, "complete-state: tampered dcm",
             "dcm recomputation", p, i.to_witness());
    }
    {
        auto i = complete_state_with(r, 100, 90, 20, 50, 50, 30);
        push(relation_id::complete_state,
             "complete-state: balance plus value exceeds limit", "holding limit",
             i.to_public(), i.to_witness());
    }
    {
        auto i = complete_state_with(r, 1000, 10, 10, 100, 200, 30);
        push(relation_id::complete_state, "complete-state: stale sender epoch",
             "epoch distance", i.to_public(), i.to_witness());
    }

    // complete-dep: 3 listed constraints
    {
        auto i = random_complete_dep(r, bank);
        auto p = i.to_public();
        p.slots[2] += one;
        push(relation_id::complete_dep, "complete-dep: tampered dcm",
             "dcm recomputation", p, i.to_witness());
    }
    {
        auto i = random_complete_dep(r, bank);
        auto w = i.to_witness();
        w.slots[2] += one;
        push(relation_id::complete_dep, "complete-dep: tampered own signature",
             "previous state signature", i.to_public(), w);
    }
    {
        auto i = random_complete_dep(r, bank);
        auto w = i.to_witness();
        w.slots[5] += one;
        push(relation_id::complete_dep,
             "complete-dep: tampered counterparty signature",
             "counterparty signature", i.to_public(), w);
    }

    // sync: 3 listed constraints
    {
        auto i = random_sync(r, bank);
        i.blind_old += one;
        push(relation_id::sync, "sync: perturbed old-state opening", "",
             i.to_public(), i.to_witness());
    }
    {
        auto i = random_sync(r, bank);
        auto p = i.to_public();
        p.slots[2] += one;
        push(relation_id::sync, "sync: tampered new state",
             "new state recomputation", p, i.to_witness());
    }
    {
        auto i = random_sync(r, bank);
        auto w = i.to_witness();
        w.slots[9] += one;
        push(relation_id::sync, "sync: tampered signature",
             "previous state signature", i.to_public(), w);
    }

    // recovery: 5 listed constraints
    {
        auto i = random_recovery(r, bank);
        i.blind_req += one;
        push(relation_id::recovery, "recovery: perturbed request opening",
             "pcm recomputation", i.to_public(), i.to_witness());
    }
    {
        auto i = random_recovery(r, bank);
        auto p = i.to_public();
        p.slots[4] += one;
        push(relation_id::recovery, "recovery: tampered state commitment",
             "state recomputation", p, i.to_witness());
    }
    {
        auto i = random_recovery(r, bank);
        auto p = i.to_public();
        p.slots[2] += one;
        push(relation_id::recovery, "recovery: tampered id", "id recomputation",
             p, i.to_witness());
    }
    {
        auto i = random_recovery(r, bank);
        auto w = i.to_witness();
        w.slots[11] += one;
        push(relation_id::recovery, "recovery: tampered signature",
             "previous state signature", i.to_public(), w);
    }
    {
        auto i = random_recovery(r, bank);
        auto p = i.to_public();
        p.slots[3] -= one;  // misreported value
        push(relation_id::recovery, "recovery: misreported value",
             "pcm recomputation", p, i.to_witness());
    }

    return out;
}

}  // namespace offcbdc::testsupport
