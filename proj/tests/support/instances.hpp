#pragma once

// Random honest instances for every relation, built directly from the
// primitives. Test-only: keeps the oracle checks independent of the wallet
// implementation.

#include "offcbdc/relations.hpp"
#include "offcbdc/rng.hpp"
#include "offcbdc/schnorr.hpp"

namespace offcbdc::testsupport {

inline std::uint64_t random_value(rng& r, std::uint64_t lo, std::uint64_t hi) {
    return lo + r.next_below(hi - lo + 1);
}

inline enroll_instance random_enroll(rng& r) {
    enroll_instance e;
    e.sk = r.next_fr();
    e.blind_state = r.next_fr();
    e.epoch = fr::from_u64(random_value(r, 0, 1000));
    e.holding_limit = fr::from_u64(random_value(r, 1, 100000));
    e.challenge = r.next_fr();
    e.id = prf_id(e.sk);
    e.scm0 = state_commitment(e.blind_state,
                              {e.sk, e.holding_limit, fr::zero(), fr::zero(),
                               e.epoch, fr::zero(), e.challenge});
    return e;
}

inline payment_instance random_payment(rng& r) {
    payment_instance p;
    p.sk = r.next_fr();
    std::uint64_t bal = random_value(r, 1, 1u << 20);
    std::uint64_t val = random_value(r, 0, bal);
    p.holding_limit = fr::from_u64(bal + random_value(r, 0, 1000));
    p.counter = fr::from_u64(random_value(r, 0, 500));
    p.balance = fr::from_u64(bal);
    p.value = fr::from_u64(val);
    p.epoch = fr::from_u64(random_value(r, 0, 1000));
    p.scm_prev_prev = r.next_fr();
    p.ccm_old = r.next_fr();
    p.ccm_new = r.next_fr();
    p.blind_old = r.next_fr();
    p.blind_new = r.next_fr();
    p.blind_pm = r.next_fr();
    fr scm_old = state_commitment(p.blind_old,
                                  {p.sk, p.holding_limit, p.counter, p.balance,
                                   p.epoch, p.scm_prev_prev, p.ccm_old});
    p.scm_new = state_commitment(
        p.blind_new, {p.sk, p.holding_limit, p.counter + fr::one(),
                      p.balance - p.value, p.epoch, scm_old, p.ccm_new});
    p.pcm = commit(p.blind_pm, {p.value, p.ccm_new, p.scm_new, p.epoch});
    return p;
}

inline create_state_instance random_create_state(rng& r) {
    create_state_instance c;
    c.sk = r.next_fr();
    std::uint64_t bal = random_value(r, 1, 1u << 20);
    std::uint64_t val = random_value(r, 0, bal);
    c.holding_limit = fr::from_u64(bal + random_value(r, 0, 1000));
    c.counter = fr::from_u64(random_value(r, 0, 500));
    c.balance = fr::from_u64(bal);
    c.value = fr::from_u64(val);
    c.epoch = fr::from_u64(random_value(r, 0, 1000));
    c.scm_prev_prev = r.next_fr();
    c.ccm_old = r.next_fr();
    c.ccm_new = r.next_fr();
    c.blind_old = r.next_fr();
    c.blind_new = r.next_fr();
    c.blind_dep = r.next_fr();
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

inline create_dep_instance random_create_dep(rng& r,
                                             const signature_keypair& bank) {
    create_dep_instance d;
    d.bank_key = bank.vk;
    d.scm_prev = r.next_fr();
    d.sigma = sign(bank.sk, d.scm_prev);
    d.blind_dep = r.next_fr();
    d.dcm = commit(d.blind_dep, {d.scm_prev});
    return d;
}

inline complete_state_instance random_complete_state(rng& r,
                                                     std::uint64_t delta_sync) {
    complete_state_instance c;
    c.sk = r.next_fr();
    std::uint64_t bal = random_value(r, 0, 1u << 20);
    std::uint64_t val = random_value(r, 0, 1u << 20);
    c.holding_limit = fr::from_u64(bal + val + random_value(r, 0, 1000));
    c.counter = fr::from_u64(random_value(r, 0, 500));
    c.balance = fr::from_u64(bal);
    c.value = fr::from_u64(val);
    std::uint64_t e = random_value(r, delta_sync, delta_sync + 1000);
    c.epoch = fr::from_u64(e);
    c.sender_epoch = fr::from_u64(random_value(r, e - delta_sync, e + delta_sync));
    c.delta_sync = fr::from_u64(delta_sync);
    c.scm_prev_prev = r.next_fr();
    c.ccm_old = r.next_fr();
    c.ccm_new = r.next_fr();
    c.blind_req = r.next_fr();
    c.blind_old = r.next_fr();
    c.blind_new = r.next_fr();
    c.blind_dep = r.next_fr();
    c.blind_pm = r.next_fr();
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

inline complete_dep_instance random_complete_dep(rng& r,
                                                 const signature_keypair& bank) {
    complete_dep_instance d;
    d.bank_key = bank.vk;
    d.scm_prev = r.next_fr();
    d.ccm = r.next_fr();
    d.sigma_prev = sign(bank.sk, d.scm_prev);
    d.sigma_counterparty = sign(bank.sk, d.ccm);
    d.blind_dep = r.next_fr();
    d.dcm = commit(d.blind_dep, {d.scm_prev, d.ccm});
    return d;
}

inline sync_instance random_sync(rng& r, const signature_keypair& bank) {
    sync_instance s;
    s.bank_key = bank.vk;
    s.sk = r.next_fr();
    s.holding_limit = fr::from_u64(random_value(r, 1, 100000));
    s.counter = fr::from_u64(random_value(r, 0, 500));
    s.balance = fr::from_u64(random_value(r, 0, 100000));
    std::uint64_t e_old = random_value(r, 0, 1000);
    s.epoch_old = fr::from_u64(e_old);
    s.epoch = fr::from_u64(e_old + random_value(r, 0, 50));
    s.challenge = r.next_fr();
    s.scm_prev_prev = r.next_fr();
    s.ccm_old = r.next_fr();
    s.blind_old = r.next_fr();
    s.blind_new = r.next_fr();
    fr scm_old = state_commitment(s.blind_old,
                                  {s.sk, s.holding_limit, s.counter, s.balance,
                                   s.epoch_old, s.scm_prev_prev, s.ccm_old});
    s.sigma_prev = sign(bank.sk, scm_old);
    s.scm_new = state_commitment(s.blind_new,
                                 {s.sk, s.holding_limit, s.counter, s.balance,
                                  s.epoch, scm_old, s.challenge});
    return s;
}

inline recovery_instance random_recovery(rng& r, const signature_keypair& bank) {
    recovery_instance rec;
    rec.bank_key = bank.vk;
    rec.sk = r.next_fr();
    std::uint64_t val = random_value(r, 0, 1u << 20);
    rec.holding_limit = fr::from_u64(val + random_value(r, 0, 1000));
    rec.counter = fr::from_u64(random_value(r, 0, 500));
    rec.balance = fr::from_u64(val + random_value(r, 0, 100));
    rec.epoch = fr::from_u64(random_value(r, 0, 1000));
    rec.sender_epoch = fr::from_u64(random_value(r, 0, 1000));
    rec.value = fr::from_u64(val);
    rec.scm_prev = r.next_fr();
    rec.ccm = r.next_fr();
    rec.blind_state = r.next_fr();
    rec.blind_req = r.next_fr();
    rec.blind_pm = r.next_fr();
    rec.sigma_prev = sign(bank.sk, rec.scm_prev);
    rec.id = prf_id(rec.sk);
    rec.scm = state_commitment(rec.blind_state,
                               {rec.sk, rec.holding_limit, rec.counter,
                                rec.balance, rec.epoch, rec.scm_prev, rec.ccm});
    fr rcm = commit(rec.blind_req, {rec.scm_prev});
    rec.pcm = commit(rec.blind_pm, {rec.value, rcm, rec.ccm, rec.sender_epoch});
    return rec;
}

// (public, witness) pair for relation `rel` built from a fresh honest
// instance.
inline std::pair<public_inputs, witness> random_honest(relation_id rel, rng& r,
                                                       const signature_keypair& bank) {
    switch (rel) {
        case relation_id::enroll: {
            auto i = random_enroll(r);
            return {i.to_public(), i.to_witness()};
        }
        case relation_id::payment: {
            auto i = random_payment(r);
            return {i.to_public(), i.to_witness()};
        }
        case relation_id::create_state: {
            auto i = random_create_state(r);
            return {i.to_public(), i.to_witness()};
        }
        case relation_id::create_dep: {
            auto i = random_create_dep(r, bank);
            return {i.to_public(), i.to_witness()};
        }
        case relation_id::complete_state: {
            auto i = random_complete_state(r, 30);
            return {i.to_public(), i.to_witness()};
        }
        case relation_id::complete_dep: {
            auto i = random_complete_dep(r, bank);
            return {i.to_public(), i.to_witness()};
        }
        case relation_id::sync: {
            auto i = random_sync(r, bank);
            return {i.to_public(), i.to_witness()};
        }
        case relation_id::recovery: {
            auto i = random_recovery(r, bank);
            return {i.to_public(), i.to_witness()};
        }
    }
    throw std::logic_error("unknown relation");
}

}  // namespace offcbdc::testsupport
