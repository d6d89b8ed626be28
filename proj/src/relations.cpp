#include "offcbdc/relations.hpp"

#include <stdexcept>

namespace offcbdc {

namespace {

// Slot indices, one namespace per relation so reading code can name them.
namespace enroll_slot {
enum pub { id, scm0, epoch, holding_limit, challenge, pub_count };
enum wit { sk, blind_state, wit_count };
}  // namespace enroll_slot

namespace payment_slot {
enum pub { pcm, pub_count };
enum wit {
    sk, holding_limit, counter, balance, epoch, value,
    scm_prev_prev, scm_new, ccm_old, ccm_new,
    blind_old, blind_new, blind_pm, wit_count
};
}  // namespace payment_slot

namespace create_state_slot {
enum pub { scm_new, dcm_new, sn_new, ds_new, pub_count };
enum wit {
    sk, holding_limit, counter, balance, epoch, value,
    scm_prev_prev, ccm_old, ccm_new,
    blind_old, blind_new, blind_dep, wit_count
};
}  // namespace create_state_slot

namespace create_dep_slot {
enum pub { pk_x, pk_y, dcm, pub_count };
enum wit { scm_prev, sig_rx, sig_ry, sig_s, blind_dep, wit_count };
}  // namespace create_dep_slot

namespace complete_state_slot {
enum pub { delta_sync, scm_new, dcm_new, pcm, pub_count };
enum wit {
    sk, holding_limit, counter, balance, epoch, sender_epoch, value,
    scm_prev_prev, ccm_old, ccm_new,
    blind_req, blind_old, blind_new, blind_dep, blind_pm, wit_count
};
}  // namespace complete_state_slot

namespace complete_dep_slot {
enum pub { pk_x, pk_y, dcm, pub_count };
enum wit {
    scm_prev, ccm,
    sig_prev_rx, sig_prev_ry, sig_prev_s,
    sig_cp_rx, sig_cp_ry, sig_cp_s,
    blind_dep, wit_count
};
}  // namespace complete_dep_slot

namespace sync_slot {
enum pub { pk_x, pk_y, scm_new, epoch, challenge, pub_count };
enum wit {
    sk, holding_limit, counter, balance, epoch_old,
    scm_prev_prev, ccm_old, blind_old, blind_new,
    sig_rx, sig_ry, sig_s, wit_count
};
}  // namespace sync_slot

namespace recovery_slot {
enum pub { pk_x, pk_y, id, value, scm, pcm, pub_count };
enum wit {
    sk, holding_limit, counter, balance, epoch, sender_epoch,
    scm_prev, ccm, blind_state, blind_req, blind_pm,
    sig_rx, sig_ry, sig_s, wit_count
};
}  // namespace recovery_slot

bool check_signature_slots(const fr& pk_x, const fr& pk_y, const fr& message,
                           const fr& rx, const fr& ry, const fr& s) {
    verifying_key vk{{pk_x, pk_y}};
    auto s_bytes = s.to_bytes_be();
    auto scalar = jj_scalar::from_bytes_be(s_bytes);
    if (!scalar) return false;  // witness value outside the signature scalar field
    return verify(vk, message, signature{rx, ry, *scalar});
}

// |a - b| <= bound on the declared epoch domain.
bool epoch_distance_ok(const fr& a, const fr& b, const fr& bound) {
    auto av = a.to_u64(), bv = b.to_u64(), dv = bound.to_u64();
    if (!av || !bv || !dv) return false;
    if (*av > max_epoch || *bv > max_epoch || *dv > max_epoch) return false;
    std::uint64_t diff = *av > *bv ? *av - *bv : *bv - *av;
    return diff <= *dv;
}

struct constraint {
    std::string_view name;
    bool ok;
};

std::optional<std::string_view> first_failed(std::initializer_list<constraint> cs) {
    for (const auto& c : cs)
        if (!c.ok) return c.name;
    return std::nullopt;
}

std::optional<std::string_view> check_enroll(const public_inputs& pub,
                                             const witness& wit) {
    namespace ps = enroll_slot;
    const auto& p = pub.slots;
    const auto& w = wit.slots;
    // previous state commitment and balance are fixed to zero at enrollment,
    // the challenge takes the counterparty slot
    fr scm0 = state_commitment(
        w[ps::blind_state],
        {w[ps::sk], p[ps::holding_limit], fr::zero(), fr::zero(), p[ps::epoch],
         fr::zero(), p[ps::challenge]});
    return first_failed({
        {"initial state recomputation", p[ps::scm0] == scm0},
        {"id recomputation", p[ps::id] == prf_id(w[ps::sk])},
    });
}

std::optional<std::string_view> check_payment(const public_inputs& pub,
                                              const witness& wit) {
    namespace ps = payment_slot;
    const auto& p = pub.slots;
    const auto& w = wit.slots;
    fr scm_old = state_commitment(
        w[ps::blind_old], {w[ps::sk], w[ps::holding_limit], w[ps::counter],
                           w[ps::balance], w[ps::epoch], w[ps::scm_prev_prev],
                           w[ps::ccm_old]});
    fr scm_new = state_commitment(
        w[ps::blind_new],
        {w[ps::sk], w[ps::holding_limit], w[ps::counter] + fr::one(),
         w[ps::balance] - w[ps::value], w[ps::epoch], scm_old, w[ps::ccm_new]});
    fr pcm = commit(w[ps::blind_pm],
                    {w[ps::value], w[ps::ccm_new], w[ps::scm_new], w[ps::epoch]});
    return first_failed({
        {"new state recomputation", w[ps::scm_new] == scm_new},
        {"pcm recomputation", p[ps::pcm] == pcm},
    });
}

std::optional<std::string_view> check_create_state(const public_inputs& pub,
                                                   const witness& wit) {
    namespace ps = create_state_slot;
    const auto& p = pub.slots;
    const auto& w = wit.slots;
    fr id = prf_id(w[ps::sk]);
    fr scm_old = state_commitment(
        w[ps::blind_old], {w[ps::sk], w[ps::holding_limit], w[ps::counter],
                           w[ps::balance], w[ps::epoch], w[ps::scm_prev_prev],
                           w[ps::ccm_old]});
    fr next_counter = w[ps::counter] + fr::one();
    fr scm_new = state_commitment(
        w[ps::blind_new],
        {w[ps::sk], w[ps::holding_limit], next_counter,
         w[ps::balance] - w[ps::value], w[ps::epoch], scm_old, w[ps::ccm_new]});

    auto bal = w[ps::balance].to_u64();
    auto val = w[ps::value].to_u64();
    bool balance_ok = bal && val && *bal >= *val;

    return first_failed({
        {"new state recomputation", p[ps::scm_new] == scm_new},
        {"sn recomputation", p[ps::sn_new] == prf_sn(w[ps::sk], next_counter)},
        {"ds recomputation",
         p[ps::ds_new] == id + p[ps::scm_new] * prf_ds(w[ps::sk], next_counter)},
        {"dcm recomputation",
         p[ps::dcm_new] == commit(w[ps::blind_dep], {scm_old})},
        {"balance covers value", balance_ok},
    });
}

std::optional<std::string_view> check_create_dep(const public_inputs& pub,
                                                 const witness& wit) {
    namespace ps = create_dep_slot;
    const auto& p = pub.slots;
    const auto& w = wit.slots;
    return first_failed({
        {"dcm recomputation",
         p[ps::dcm] == commit(w[ps::blind_dep], {w[ps::scm_prev]})},
        {"previous state signature",
         check_signature_slots(p[ps::pk_x], p[ps::pk_y], w[ps::scm_prev],
                               w[ps::sig_rx], w[ps::sig_ry], w[ps::sig_s])},
    });
}

std::optional<std::string_view> check_complete_state(const public_inputs& pub,
                                                     const witness& wit) {
    namespace ps = complete_state_slot;
    const auto& p = pub.slots;
    const auto& w = wit.slots;
    fr scm_old = state_commitment(
        w[ps::blind_old], {w[ps::sk], w[ps::holding_limit], w[ps::counter],
                           w[ps::balance], w[ps::epoch], w[ps::scm_prev_prev],
                           w[ps::ccm_old]});
    fr rcm = commit(w[ps::blind_req], {scm_old});
    fr scm_new = state_commitment(
        w[ps::blind_new],
        {w[ps::sk], w[ps::holding_limit], w[ps::counter],
         w[ps::balance] + w[ps::value], w[ps::epoch], scm_old, w[ps::ccm_new]});
    fr pcm = commit(w[ps::blind_pm], {w[ps::value], rcm, w[ps::ccm_new],
                                      w[ps::sender_epoch]});

    auto bal = w[ps::balance].to_u64();
    auto val = w[ps::value].to_u64();
    auto lim = w[ps::holding_limit].to_u64();
    bool holding_ok =
        bal && val && lim &&
        (unsigned __int128)*bal + (unsigned __int128)*val <= (unsigned __int128)*lim;

    return first_failed({
        {"new state recomputation", p[ps::scm_new] == scm_new},
        {"pcm recomputation", p[ps::pcm] == pcm},
        {"dcm recomputation",
         p[ps::dcm_new] == commit(w[ps::blind_dep], {scm_old, w[ps::ccm_new]})},
        {"holding limit", holding_ok},
        {"epoch distance",
         epoch_distance_ok(w[ps::sender_epoch], w[ps::epoch], p[ps::delta_sync])},
    });
}

std::optional<std::string_view> check_complete_dep(const public_inputs& pub,
                                                   const witness& wit) {
    namespace ps = complete_dep_slot;
    const auto& p = pub.slots;
    const auto& w = wit.slots;
    return first_failed({
        {"dcm recomputation",
         p[ps::dcm] == commit(w[ps::blind_dep], {w[ps::scm_prev], w[ps::ccm]})},
        {"previous state signature",
         check_signature_slots(p[ps::pk_x], p[ps::pk_y], w[ps::scm_prev],
                               w[ps::sig_prev_rx], w[ps::sig_prev_ry],
                               w[ps::sig_prev_s])},
        {"counterparty signature",
         check_signature_slots(p[ps::pk_x], p[ps::pk_y], w[ps::ccm],
                               w[ps::sig_cp_rx], w[ps::sig_cp_ry],
                               w[ps::sig_cp_s])},
    });
}

std::optional<std::string_view> check_sync(const public_inputs& pub,
                                           const witness& wit) {
    namespace ps = sync_slot;
    const auto& p = pub.slots;
    const auto& w = wit.slots;
    fr scm_old = state_commitment(
        w[ps::blind_old], {w[ps::sk], w[ps::holding_limit], w[ps::counter],
                           w[ps::balance], w[ps::epoch_old], w[ps::scm_prev_prev],
                           w[ps::ccm_old]});
    fr scm_new = state_commitment(
        w[ps::blind_new],
        {w[ps::sk], w[ps::holding_limit], w[ps::counter], w[ps::balance],
         p[ps::epoch], scm_old, p[ps::challenge]});
    return first_failed({
        {"new state recomputation", p[ps::scm_new] == scm_new},
        {"previous state signature",
         check_signature_slots(p[ps::pk_x], p[ps::pk_y], scm_old, w[ps::sig_rx],
                               w[ps::sig_ry], w[ps::sig_s])},
    });
}

std::optional<std::string_view> check_recovery(const public_inputs& pub,
                                               const witness& wit) {
    namespace ps = recovery_slot;
    const auto& p = pub.slots;
    const auto& w = wit.slots;
    fr rcm_prev = commit(w[ps::blind_req], {w[ps::scm_prev]});
    fr scm = state_commitment(
        w[ps::blind_state], {w[ps::sk], w[ps::holding_limit], w[ps::counter],
                             w[ps::balance], w[ps::epoch], w[ps::scm_prev],
                             w[ps::ccm]});
    fr pcm = commit(w[ps::blind_pm],
                    {p[ps::value], rcm_prev, w[ps::ccm], w[ps::sender_epoch]});
    return first_failed({
        {"state recomputation", p[ps::scm] == scm},
        {"id recomputation", p[ps::id] == prf_id(w[ps::sk])},
        {"previous state signature",
         check_signature_slots(p[ps::pk_x], p[ps::pk_y], w[ps::scm_prev],
                               w[ps::sig_rx], w[ps::sig_ry], w[ps::sig_s])},
        {"pcm recomputation", p[ps::pcm] == pcm},
    });
}

}  // namespace

std::string_view relation_name(relation_id rel) {
    switch (rel) {
        case relation_id::enroll: return "enroll";
        case relation_id::payment: return "payment";
        case relation_id::create_state: return "create-state";
        case relation_id::create_dep: return "create-dep";
        case relation_id::complete_state: return "complete-state";
        case relation_id::complete_dep: return "complete-dep";
        case relation_id::sync: return "sync";
        case relation_id::recovery: return "recovery";
    }
    return "unknown";
}

std::size_t public_arity(relation_id rel) {
    switch (rel) {
        case relation_id::enroll: return enroll_slot::pub_count;
        case relation_id::payment: return payment_slot::pub_count;
        case relation_id::create_state: return create_state_slot::pub_count;
        case relation_id::create_dep: return create_dep_slot::pub_count;
        case relation_id::complete_state: return complete_state_slot::pub_count;
        case relation_id::complete_dep: return complete_dep_slot::pub_count;
        case relation_id::sync: return sync_slot::pub_count;
        case relation_id::recovery: return recovery_slot::pub_count;
    }
    throw std::invalid_argument("unknown relation");
}

std::size_t witness_arity(relation_id rel) {
    switch (rel) {
        case relation_id::enroll: return enroll_slot::wit_count;
        case relation_id::payment: return payment_slot::wit_count;
        case relation_id::create_state: return create_state_slot::wit_count;
        case relation_id::create_dep: return create_dep_slot::wit_count;
        case relation_id::complete_state: return complete_state_slot::wit_count;
        case relation_id::complete_dep: return complete_dep_slot::wit_count;
        case relation_id::sync: return sync_slot::wit_count;
        case relation_id::recovery: return recovery_slot::wit_count;
    }
    throw std::invalid_argument("unknown relation");
}

std::optional<std::string_view> first_violation(relation_id rel,
                                                const public_inputs& pub,
                                                const witness& wit) {
    if (pub.slots.size() != public_arity(rel))
        throw std::invalid_argument("public input arity mismatch for " +
                                    std::string(relation_name(rel)));
    if (wit.slots.size() != witness_arity(rel))
        throw std::invalid_argument("witness arity mismatch for " +
                                    std::string(relation_name(rel)));
    switch (rel) {
        case relation_id::enroll: return check_enroll(pub, wit);
        case relation_id::payment: return check_payment(pub, wit);
        case relation_id::create_state: return check_create_state(pub, wit);
        case relation_id::create_dep: return check_create_dep(pub, wit);
        case relation_id::complete_state: return check_complete_state(pub, wit);
        case relation_id::complete_dep: return check_complete_dep(pub, wit);
        case relation_id::sync: return check_sync(pub, wit);
        case relation_id::recovery: return check_recovery(pub, wit);
    }
    throw std::invalid_argument("unknown relation");
}

bool relation_satisfied(relation_id rel, const public_inputs& pub,
                        const witness& wit) {
    return !first_violation(rel, pub, wit).has_value();
}

public_inputs enroll_instance::to_public() const {
    return {{id, scm0, epoch, holding_limit, challenge}};
}
witness enroll_instance::to_witness() const { return {{sk, blind_state}}; }

public_inputs payment_instance::to_public() const { return {{pcm}}; }
witness payment_instance::to_witness() const {
    return {{sk, holding_limit, counter, balance, epoch, value, scm_prev_prev,
             scm_new, ccm_old, ccm_new, blind_old, blind_new, blind_pm}};
}

public_inputs create_state_instance::to_public() const {
    return {{scm_new, dcm_new, sn_new, ds_new}};
}
witness create_state_instance::to_witness() const {
    return {{sk, holding_limit, counter, balance, epoch, value, scm_prev_prev,
             ccm_old, ccm_new, blind_old, blind_new, blind_dep}};
}

public_inputs create_dep_instance::to_public() const {
    return {{bank_key.point.x, bank_key.point.y, dcm}};
}
witness create_dep_instance::to_witness() const {
    return {{scm_prev, sigma.r_x, sigma.r_y,
             *fr::from_bytes_be(sigma.s.to_bytes_be()), blind_dep}};
}

public_inputs complete_state_instance::to_public() const {
    return {{delta_sync, scm_new, dcm_new, pcm}};
}
witness complete_state_instance::to_witness() const {
    return {{sk, holding_limit, counter, balance, epoch, sender_epoch, value,
             scm_prev_prev, ccm_old, ccm_new, blind_req, blind_old, blind_new,
             blind_dep, blind_pm}};
}

public_inputs complete_dep_instance::to_public() const {
    return {{bank_key.point.x, bank_key.point.y, dcm}};
}
witness complete_dep_instance::to_witness() const {
    return {{scm_prev, ccm, sigma_prev.r_x, sigma_prev.r_y,
             *fr::from_bytes_be(sigma_prev.s.to_bytes_be()),
             sigma_counterparty.r_x, sigma_counterparty.r_y,
             *fr::from_bytes_be(sigma_counterparty.s.to_bytes_be()), blind_dep}};
}

public_inputs sync_instance::to_public() const {
    return {{bank_key.point.x, bank_key.point.y, scm_new, epoch, challenge}};
}
witness sync_instance::to_witness() const {
    return {{sk, holding_limit, counter, balance, epoch_old, scm_prev_prev,
             ccm_old, blind_old, blind_new, sigma_prev.r_x, sigma_prev.r_y,
             *fr::from_bytes_be(sigma_prev.s.to_bytes_be())}};
}

public_inputs recovery_instance::to_public() const {
    return {{bank_key.point.x, bank_key.point.y, id, value, scm, pcm}};
}
witness recovery_instance::to_witness() const {
    return {{sk, holding_limit, counter, balance, epoch, sender_epoch, scm_prev,
             ccm, blind_state, blind_req, blind_pm, sigma_prev.r_x,
             sigma_prev.r_y, *fr::from_bytes_be(sigma_prev.s.to_bytes_be())}};
}

}  // namespace offcbdc
