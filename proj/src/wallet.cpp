#include "offcbdc/wallet.hpp"

#include <cstring>
#include <set>

namespace offcbdc {

namespace {
constexpr int max_walk_depth = 4096;
constexpr char wallet_magic[8] = {'O', 'C', 'W', 'L', 'T', '0', '0', '1'};
constexpr char secrets_marker[8] = {'S', 'E', 'C', 'R', 'E', 'T', 'S', '!'};
}  // namespace

wallet::wallet(wallet_config cfg, std::uint64_t seed,
               std::shared_ptr<const proof_backend> backend)
    : cfg_(cfg), backend_(std::move(backend)), rng_(seed), sk_(rng_.next_fr()) {}

const state_opening& wallet::current_state() const {
    auto it = hist_.internal.find(current_scm_);
    if (it == hist_.internal.end()) throw wallet_error("wallet not enrolled");
    return it->second.opening;
}

state_kind wallet::current_kind() const {
    return hist_.internal.at(current_scm_).kind;
}

bool wallet::latest_signed() const {
    auto it = hist_.external.find(current_scm_);
    return it != hist_.external.end() && it->second.sigma.has_value();
}

void wallet::observe_epoch(std::uint32_t epoch_estimate) {
    if (epoch_estimate > epoch_estimate_) epoch_estimate_ = epoch_estimate;
}

bool wallet::expired() const {
    if (!enrolled_) return false;
    std::uint32_t synced = current_state().epoch;
    return epoch_estimate_ > synced &&
           epoch_estimate_ - synced > cfg_.delta_sync;
}

verify_context wallet::vctx() const {
    return {backend_.get(), cfg_.bank_key, fr::from_u64(cfg_.delta_sync)};
}

const external_entry& wallet::ext(const fr& scm) const {
    auto it = hist_.external.find(scm);
    if (it == hist_.external.end())
        throw std::invalid_argument("unknown state commitment " + scm.to_hex());
    return it->second;
}

// --- enrollment ----------------------------------------------------------------

enroll_message wallet::make_enroll(std::uint64_t holding_limit,
                                   const epoch_challenge& ec) {
    if (enrolled_) throw wallet_error("already enrolled");
    state_opening opening;
    opening.sk = sk_;
    opening.holding_limit = holding_limit;
    opening.counter = 0;
    opening.balance = 0;
    opening.epoch = ec.epoch;
    opening.scm_prev = fr::zero();
    opening.ccm = ec.challenge;
    opening.blind = rng_.next_fr();
    fr scm0 = opening.commitment();

    enroll_instance inst;
    inst.sk = sk_;
    inst.blind_state = opening.blind;
    inst.id = prf_id(sk_);
    inst.scm0 = scm0;
    inst.epoch = fr::from_u64(ec.epoch);
    inst.holding_limit = fr::from_u64(holding_limit);
    inst.challenge = ec.challenge;
    proof_bundle zkp = backend_->prove(relation_id::enroll, inst.to_public(),
                                       inst.to_witness());

    hist_.internal[scm0] = {opening, state_kind::enrollment, std::nullopt};
    current_scm_ = scm0;
    epoch_estimate_ = std::max(epoch_estimate_, ec.epoch);
    return {zkp, inst.id, scm0, ec.epoch, holding_limit, ec.challenge};
}

void wallet::complete_enroll(const signature& sigma) {
    if (enrolled_) throw wallet_error("already enrolled");
    if (hist_.internal.find(current_scm_) == hist_.internal.end())
        throw wallet_error("no pending enrollment");
    if (!verify(cfg_.bank_key, current_scm_, sigma))
        throw wallet_error("invalid enrollment signature");
    external_entry e;
    e.kind = hist_.internal.at(current_scm_).kind;
    e.sigma = sigma;
    hist_.external[current_scm_] = e;
    enrolled_ = true;
}

fr wallet::make_issued_state(std::uint64_t balance, std::uint32_t epoch) {
    if (enrolled_) throw wallet_error("already enrolled");
    state_opening opening;
    opening.sk = sk_;
    opening.holding_limit = balance;
    opening.counter = 0;
    opening.balance = balance;
    opening.epoch = epoch;
    opening.scm_prev = fr::zero();
    opening.ccm = fr::zero();
    opening.blind = rng_.next_fr();
    fr scm = opening.commitment();
    hist_.internal[scm] = {opening, state_kind::enrollment, std::nullopt};
    current_scm_ = scm;
    epoch_estimate_ = std::max(epoch_estimate_, epoch);
    return scm;
}

// --- offline payment --------------------------------------------------------------

payment_request wallet::make_payment_request(std::uint64_t value) {
    if (!enrolled_) throw wallet_error("not enrolled");
    if (expired()) throw wallet_error("wallet expired: synchronize first");
    fr blind_req = rng_.next_fr();
    fr rcm = commit(blind_req, {current_scm_});
    hist_.internal.at(current_scm_).blind_req = blind_req;
    return {rcm, value};
}

payment_package wallet::create_payment(const payment_request& req) {
    if (!enrolled_) throw wallet_error("not enrolled");
    if (expired()) throw wallet_error("wallet expired: synchronize first");
    const state_opening old = current_state();
    if (old.balance < req.value) throw wallet_error("insufficient balance");

    fr old_scm = current_scm_;
    state_opening next;
    next.sk = sk_;
    next.holding_limit = old.holding_limit;
    next.counter = old.counter + 1;
    next.balance = old.balance - req.value;
    next.epoch = old.epoch;
    next.scm_prev = old_scm;
    next.ccm = req.rcm;
    next.blind = rng_.next_fr();
    fr new_scm = next.commitment();

    fr blind_dep = rng_.next_fr();
    fr dcm = commit(blind_dep, {old_scm});
    fr counter_fr = fr::from_u64(next.counter);
    fr sn = prf_sn(sk_, counter_fr);
    fr ds = prf_id(sk_) + new_scm * prf_ds(sk_, counter_fr);

    create_state_instance state_inst;
    state_inst.scm_new = new_scm;
    state_inst.dcm_new = dcm;
    state_inst.sn_new = sn;
    state_inst.ds_new = ds;
    state_inst.sk = sk_;
    state_inst.holding_limit = fr::from_u64(old.holding_limit);
    state_inst.counter = fr::from_u64(old.counter);
    state_inst.balance = fr::from_u64(old.balance);
    state_inst.epoch = fr::from_u64(old.epoch);
    state_inst.value = fr::from_u64(req.value);
    state_inst.scm_prev_prev = old.scm_prev;
    state_inst.ccm_old = old.ccm;
    state_inst.ccm_new = req.rcm;
    state_inst.blind_old = old.blind;
    state_inst.blind_new = next.blind;
    state_inst.blind_dep = blind_dep;
    proof_bundle zkp_state = backend_->prove(
        relation_id::create_state, state_inst.to_public(), state_inst.to_witness());

    hist_.internal[new_scm] = {next, state_kind::creation, std::nullopt};

    external_entry e;
    e.kind = state_kind::creation;
    e.dcm = dcm;
    e.sn = sn;
    e.ds = ds;
    e.blind_dep = blind_dep;
    e.scm_prev = old_scm;
    e.zkp_state = zkp_state;
    if (auto prev_it = hist_.external.find(old_scm);
        prev_it != hist_.external.end() && prev_it->second.sigma) {
        create_dep_instance dep;
        dep.bank_key = cfg_.bank_key;
        dep.dcm = dcm;
        dep.scm_prev = old_scm;
        dep.sigma = *prev_it->second.sigma;
        dep.blind_dep = blind_dep;
        e.zkp_dep = backend_->prove(relation_id::create_dep, dep.to_public(),
                                    dep.to_witness());
    }
    hist_.external[new_scm] = e;
    current_scm_ = new_scm;

    related_history hist_rel = get_related_history(new_scm);

    fr blind_pm = rng_.next_fr();
    fr pcm = commit(blind_pm, {fr::from_u64(req.value), req.rcm, new_scm,
                               fr::from_u64(old.epoch)});
    payment_instance pm_inst;
    pm_inst.pcm = pcm;
    pm_inst.sk = sk_;
    pm_inst.holding_limit = fr::from_u64(old.holding_limit);
    pm_inst.counter = fr::from_u64(old.counter);
    pm_inst.balance = fr::from_u64(old.balance);
    pm_inst.epoch = fr::from_u64(old.epoch);
    pm_inst.value = fr::from_u64(req.value);
    pm_inst.scm_prev_prev = old.scm_prev;
    pm_inst.scm_new = new_scm;
    pm_inst.ccm_old = old.ccm;
    pm_inst.ccm_new = req.rcm;
    pm_inst.blind_old = old.blind;
    pm_inst.blind_new = next.blind;
    pm_inst.blind_pm = blind_pm;
    proof_bundle zkp_pm = backend_->prove(relation_id::payment, pm_inst.to_public(),
                                          pm_inst.to_witness());

    payment_message pm{new_scm, req.value, old.epoch, blind_pm, zkp_pm};
    return {std::move(hist_rel), pm};
}

wallet::accept_result wallet::accept_payment(const payment_package& pkg) const {
    if (!enrolled_) return {false, "not enrolled"};
    if (expired()) return {false, "wallet expired"};
    auto it = hist_.internal.find(current_scm_);
    if (it == hist_.internal.end() || !it->second.blind_req)
        return {false, "no outstanding request"};

    const payment_message& pm = pkg.pm;
    std::uint32_t own_epoch = it->second.opening.epoch;
    std::uint32_t diff = own_epoch > pm.sender_epoch ? own_epoch - pm.sender_epoch
                                                     : pm.sender_epoch - own_epoch;
    if (diff > cfg_.delta_sync) return {false, "epoch distance"};

    fr rcm = commit(*it->second.blind_req, {current_scm_});
    fr pcm = commit(pm.blind_pm, {fr::from_u64(pm.value), rcm, pm.scm_new,
                                  fr::from_u64(pm.sender_epoch)});
    if (!verify_bundle_against(vctx(), pm.zkp_pm, relation_id::payment, {pcm}))
        return {false, "payment proof"};

    if (!verify_offline_creation(vctx(), pkg.history, pm.scm_new))
        return {false, "incomplete related history"};
    return {true, {}};
}

void wallet::complete_payment(const payment_package& pkg) {
    auto accepted = accept_payment(pkg);
    if (!accepted.ok)
        throw wallet_error("cannot complete unaccepted payment: " + accepted.reason);

    const payment_message& pm = pkg.pm;
    const state_opening old = current_state();
    if (old.balance + pm.value > old.holding_limit)
        throw wallet_error("holding limit exceeded");
    fr blind_req = *hist_.internal.at(current_scm_).blind_req;

    fr old_scm = current_scm_;
    state_opening next;
    next.sk = sk_;
    next.holding_limit = old.holding_limit;
    next.counter = old.counter;
    next.balance = old.balance + pm.value;
    next.epoch = old.epoch;
    next.scm_prev = old_scm;
    next.ccm = pm.scm_new;
    next.blind = rng_.next_fr();
    fr new_scm = next.commitment();

    hist_.internal[new_scm] = {next, state_kind::completion, std::nullopt};
    for (const auto& [scm, element] : pkg.history) merge_element(hist_, element);
    fr rcm = commit(blind_req, {old_scm});
    fr pcm = commit(pm.blind_pm, {fr::from_u64(pm.value), rcm, pm.scm_new,
                                  fr::from_u64(pm.sender_epoch)});
    hist_.recovery[new_scm] = {pm.blind_pm, pm.value, pm.sender_epoch};

    fr blind_dep = rng_.next_fr();
    fr dcm = commit(blind_dep, {old_scm, pm.scm_new});

    complete_state_instance inst;
    inst.delta_sync = fr::from_u64(cfg_.delta_sync);
    inst.scm_new = new_scm;
    inst.dcm_new = dcm;
    inst.pcm = pcm;
    inst.sk = sk_;
    inst.holding_limit = fr::from_u64(old.holding_limit);
    inst.counter = fr::from_u64(old.counter);
    inst.balance = fr::from_u64(old.balance);
    inst.epoch = fr::from_u64(old.epoch);
    inst.sender_epoch = fr::from_u64(pm.sender_epoch);
    inst.value = fr::from_u64(pm.value);
    inst.scm_prev_prev = old.scm_prev;
    inst.ccm_old = old.ccm;
    inst.ccm_new = pm.scm_new;
    inst.blind_req = blind_req;
    inst.blind_old = old.blind;
    inst.blind_new = next.blind;
    inst.blind_dep = blind_dep;
    inst.blind_pm = pm.blind_pm;
    proof_bundle zkp_state = backend_->prove(relation_id::complete_state,
                                             inst.to_public(), inst.to_witness());

    external_entry e;
    e.kind = state_kind::completion;
    e.dcm = dcm;
    e.pcm = pcm;
    e.zkp_pm = pm.zkp_pm;
    e.blind_dep = blind_dep;
    e.scm_prev = old_scm;
    e.ccm = pm.scm_new;
    e.zkp_state = zkp_state;

    // the dependency proof needs both the predecessor and the sender's state
    // signed; build it now only if both signatures are already here
    auto prev_it = hist_.external.find(old_scm);
    auto cp_it = hist_.external.find(pm.scm_new);
    if (prev_it != hist_.external.end() && prev_it->second.sigma &&
        cp_it != hist_.external.end() && cp_it->second.sigma) {
        complete_dep_instance dep;
        dep.bank_key = cfg_.bank_key;
        dep.dcm = dcm;
        dep.scm_prev = old_scm;
        dep.ccm = pm.scm_new;
        dep.sigma_prev = *prev_it->second.sigma;
        dep.sigma_counterparty = *cp_it->second.sigma;
        dep.blind_dep = blind_dep;
        e.zkp_dep = backend_->prove(relation_id::complete_dep, dep.to_public(),
                                    dep.to_witness());
    }
    hist_.external[new_scm] = e;
    current_scm_ = new_scm;
}

// --- related history -------------------------------------------------------------

history_element wallet::get_element(const fr& scm) const {
    return make_element(scm, ext(scm));
}

related_history wallet::get_related_history(const fr& scm) const {
    related_history out;
    std::set<fr, fr_raw_less> pending{scm};
    while (!pending.empty()) {
        fr next = *pending.begin();
        pending.erase(pending.begin());
        if (out.count(next)) continue;
        const external_entry& entry = ext(next);
        history_element element = make_element(next, entry);
        insert_element(out, element);
        // signed or provably-dependent elements terminate the recursion
        if (entry.sigma || entry.zkp_dep) continue;
        pending.insert(*entry.scm_prev);
        if (entry.kind == state_kind::completion) pending.insert(*entry.ccm);
    }
    return out;
}

// --- online operations --------------------------------------------------------------

bool wallet::query_signature(bank_connection& bank, const fr& scm,
                             reconnect_result& stats) {
    auto it = hist_.external.find(scm);
    if (it != hist_.external.end() && it->second.sigma) return true;
    stats.ledger_queries += 1;
    auto entry = bank.query_ledger(scm);
    if (entry && entry->sigma && verify(cfg_.bank_key, scm, *entry->sigma)) {
        hist_.external[scm].sigma = entry->sigma;
        return true;
    }
    return false;
}

std::optional<sig_request> wallet::create_sig_request(const fr& scm) {
    external_entry& entry = hist_.external.at(scm);
    if (!entry.zkp_dep) {
        if (!entry.scm_prev || !entry.blind_dep)
            throw wallet_error("missing dependency openings for " + scm.to_hex());
        auto prev_it = hist_.external.find(*entry.scm_prev);
        if (prev_it == hist_.external.end() || !prev_it->second.sigma)
            return std::nullopt;
        if (entry.kind == state_kind::creation) {
            create_dep_instance dep;
            dep.bank_key = cfg_.bank_key;
            dep.dcm = *entry.dcm;
            dep.scm_prev = *entry.scm_prev;
            dep.sigma = *prev_it->second.sigma;
            dep.blind_dep = *entry.blind_dep;
            entry.zkp_dep = backend_->prove(relation_id::create_dep,
                                            dep.to_public(), dep.to_witness());
        } else if (entry.kind == state_kind::completion) {
            auto cp_it = hist_.external.find(*entry.ccm);
            if (cp_it == hist_.external.end() || !cp_it->second.sigma)
                return std::nullopt;
            complete_dep_instance dep;
            dep.bank_key = cfg_.bank_key;
            dep.dcm = *entry.dcm;
            dep.scm_prev = *entry.scm_prev;
            dep.ccm = *entry.ccm;
            dep.sigma_prev = *prev_it->second.sigma;
            dep.sigma_counterparty = *cp_it->second.sigma;
            dep.blind_dep = *entry.blind_dep;
            entry.zkp_dep = backend_->prove(relation_id::complete_dep,
                                            dep.to_public(), dep.to_witness());
        } else {
            throw wallet_error("state needs no signature request");
        }
    }
    if (entry.kind == state_kind::creation) {
        return creation_sig_request{scm,        *entry.dcm,      *entry.sn,
                                    *entry.ds,  *entry.zkp_state, *entry.zkp_dep};
    }
    return completion_sig_request{scm,
                                  *entry.dcm,
                                  *entry.pcm,
                                  *entry.zkp_state,
                                  *entry.zkp_dep,
                                  *entry.zkp_pm};
}

wallet::walk_outcome wallet::walk(bank_connection& bank, const fr& scm,
                                  reconnect_result& stats, int depth) {
    if (depth > max_walk_depth) throw wallet_error("dependency chain too deep");
    if (query_signature(bank, scm, stats)) return {};

    auto it = hist_.external.find(scm);
    if (it == hist_.external.end())
        throw wallet_error("no request material for " + scm.to_hex());
    external_entry& entry = it->second;

    if (!entry.zkp_dep) {
        auto prev = walk(bank, *entry.scm_prev, stats, depth + 1);
        if (prev.flag) return prev;
        if (entry.kind == state_kind::completion) {
            auto cp = walk(bank, *entry.ccm, stats, depth + 1);
            if (cp.flag) {
                if (owns(scm)) return {true, scm};
                return {true, cp.recovery_scm};
            }
        }
    }

    auto req = create_sig_request(scm);
    if (!req) return {true, std::nullopt};
    stats.requests_sent += 1;
    bank_response resp = bank.submit_sig_request(*req);
    if (resp.status == bank_status::ok && resp.sigma &&
        verify(cfg_.bank_key, scm, *resp.sigma)) {
        entry.sigma = resp.sigma;
        return {};
    }
    return {true, std::nullopt};
}

wallet::reconnect_result wallet::reconnect(bank_connection& bank) {
    if (!enrolled_) throw wallet_error("not enrolled");
    reconnect_result result;
    auto outcome = walk(bank, current_scm_, result, 0);
    result.fully_signed = !outcome.flag;
    result.recovery_scm = outcome.recovery_scm;
    return result;
}

void wallet::synchronize(bank_connection& bank) {
    if (!enrolled_) throw wallet_error("not enrolled");
    if (!latest_signed())
        throw wallet_error("latest state unsigned: reconnect first");
    epoch_challenge ec = bank.get_epoch_challenge();

    const state_opening old = current_state();
    fr old_scm = current_scm_;
    state_opening next = old;
    next.epoch = ec.epoch;
    next.scm_prev = old_scm;
    next.ccm = ec.challenge;
    next.blind = rng_.next_fr();
    fr new_scm = next.commitment();

    sync_instance inst;
    inst.bank_key = cfg_.bank_key;
    inst.scm_new = new_scm;
    inst.epoch = fr::from_u64(ec.epoch);
    inst.challenge = ec.challenge;
    inst.sk = sk_;
    inst.holding_limit = fr::from_u64(old.holding_limit);
    inst.counter = fr::from_u64(old.counter);
    inst.balance = fr::from_u64(old.balance);
    inst.epoch_old = fr::from_u64(old.epoch);
    inst.scm_prev_prev = old.scm_prev;
    inst.ccm_old = old.ccm;
    inst.blind_old = old.blind;
    inst.blind_new = next.blind;
    inst.sigma_prev = *hist_.external.at(old_scm).sigma;
    proof_bundle zkp = backend_->prove(relation_id::sync, inst.to_public(),
                                       inst.to_witness());

    bank_response resp =
        bank.submit_sync({new_scm, ec.epoch, ec.challenge, zkp});
    if (resp.status != bank_status::ok || !resp.sigma ||
        !verify(cfg_.bank_key, new_scm, *resp.sigma))
        throw wallet_error("synchronization rejected: " + resp.reason);

    hist_.internal[new_scm] = {next, state_kind::synchronization, std::nullopt};
    external_entry e;
    e.kind = state_kind::synchronization;
    e.sigma = resp.sigma;
    hist_.external[new_scm] = e;
    current_scm_ = new_scm;
    observe_epoch(ec.epoch);
}

wallet::recovery_result wallet::state_recovery(bank_connection& bank,
                                               const fr& scm) {
    auto int_it = hist_.internal.find(scm);
    if (int_it == hist_.internal.end()) return {false, "not an own state"};
    if (int_it->second.kind != state_kind::completion)
        return {false, "not a completion"};
    auto rec_it = hist_.recovery.find(scm);
    if (rec_it == hist_.recovery.end()) return {false, "no recovery openings"};
    const state_opening& opening = int_it->second.opening;

    auto prev_ext = hist_.external.find(opening.scm_prev);
    if (prev_ext == hist_.external.end() || !prev_ext->second.sigma)
        return {false, "predecessor unsigned"};
    auto prev_int = hist_.internal.find(opening.scm_prev);
    if (prev_int == hist_.internal.end() || !prev_int->second.blind_req)
        return {false, "request opening missing"};

    recovery_instance inst;
    inst.bank_key = cfg_.bank_key;
    inst.id = id();
    inst.value = fr::from_u64(rec_it->second.value);
    inst.scm = scm;
    inst.pcm = *ext(scm).pcm;
    inst.sk = sk_;
    inst.holding_limit = fr::from_u64(opening.holding_limit);
    inst.counter = fr::from_u64(opening.counter);
    inst.balance = fr::from_u64(opening.balance);
    inst.epoch = fr::from_u64(opening.epoch);
    inst.sender_epoch = fr::from_u64(rec_it->second.sender_epoch);
    inst.scm_prev = opening.scm_prev;
    inst.ccm = opening.ccm;
    inst.blind_state = opening.blind;
    inst.blind_req = *prev_int->second.blind_req;
    inst.blind_pm = rec_it->second.blind_pm;
    inst.sigma_prev = *prev_ext->second.sigma;
    proof_bundle zkp = backend_->prove(relation_id::recovery, inst.to_public(),
                                       inst.to_witness());

    recovery_message msg;
    msg.scm = scm;
    msg.id = inst.id;
    msg.value = rec_it->second.value;
    msg.zkp_recovery = zkp;
    msg.history = get_related_history(scm);

    bank_response resp = bank.submit_recovery(msg);
    if (resp.status != bank_status::ok || !resp.sigma ||
        !verify(cfg_.bank_key, scm, *resp.sigma))
        return {false, resp.reason.empty() ? "recovery rejected" : resp.reason};
    hist_.external.at(scm).sigma = resp.sigma;
    return {true, {}};
}

void wallet::prune_history() {
    // keep everything reachable from unsigned own states plus the current
    // state, stopping at signed anchors (which stay)
    std::set<fr, fr_raw_less> keep;
    std::vector<fr> stack{current_scm_};
    for (const auto& [scm, entry] : hist_.internal) {
        auto it = hist_.external.find(scm);
        if (it == hist_.external.end() || !it->second.sigma) stack.push_back(scm);
    }
    while (!stack.empty()) {
        fr scm = stack.back();
        stack.pop_back();
        if (!keep.insert(scm).second) continue;
        auto it = hist_.external.find(scm);
        if (it == hist_.external.end()) continue;
        const external_entry& e = it->second;
        if (e.sigma) continue;  // anchor
        if (e.zkp_dep) continue;
        if (e.scm_prev) stack.push_back(*e.scm_prev);
        if (e.kind == state_kind::completion && e.ccm) stack.push_back(*e.ccm);
    }
    for (auto it = hist_.external.begin(); it != hist_.external.end();) {
        if (!keep.count(it->first)) {
            it = hist_.external.erase(it);
        } else {
            ++it;
        }
    }
    for (auto it = hist_.recovery.begin(); it != hist_.recovery.end();) {
        if (!keep.count(it->first)) {
            it = hist_.recovery.erase(it);
        } else {
            ++it;
        }
    }
}

// --- persistence ------------------------------------------------------------------

namespace {

void write_opening(byte_writer& w, const state_opening& o) {
    write_fr(w, o.sk);
    w.u64(o.holding_limit);
    w.u64(o.counter);
    w.u64(o.balance);
    w.u32(o.epoch);
    write_fr(w, o.scm_prev);
    write_fr(w, o.ccm);
    write_fr(w, o.blind);
}

state_opening read_opening(byte_reader& r) {
    state_opening o;
    o.sk = read_fr(r);
    o.holding_limit = r.u64();
    o.counter = r.u64();
    o.balance = r.u64();
    o.epoch = r.u32();
    o.scm_prev = read_fr(r);
    o.ccm = read_fr(r);
    o.blind = read_fr(r);
    return o;
}

}  // namespace

bytes wallet::save() const {
    byte_writer w;
    w.raw({reinterpret_cast<const std::uint8_t*>(wallet_magic), 8});
    w.u8(enrolled_ ? 1 : 0);
    w.u32(cfg_.delta_sync);
    write_verifying_key(w, cfg_.bank_key);
    write_fr(w, current_scm_);
    w.u32(epoch_estimate_);

    w.u32(static_cast<std::uint32_t>(hist_.external.size()));
    for (const auto& [scm, e] : hist_.external) write_external_entry(w, scm, e);

    // everything after this marker opens commitments or derives keys
    w.raw({reinterpret_cast<const std::uint8_t*>(secrets_marker), 8});
    write_fr(w, sk_);
    w.u32(static_cast<std::uint32_t>(hist_.internal.size()));
    for (const auto& [scm, e] : hist_.internal) {
        write_fr(w, scm);
        write_opening(w, e.opening);
        w.u8(static_cast<std::uint8_t>(e.kind));
        w.u8(e.blind_req ? 1 : 0);
        if (e.blind_req) write_fr(w, *e.blind_req);
    }
    w.u32(static_cast<std::uint32_t>(hist_.recovery.size()));
    for (const auto& [scm, e] : hist_.recovery) {
        write_fr(w, scm);
        write_fr(w, e.blind_pm);
        w.u64(e.value);
        w.u32(e.sender_epoch);
    }
    return w.take();
}

wallet wallet::load(std::span<const std::uint8_t> data, wallet_config cfg,
                    std::shared_ptr<const proof_backend> backend) {
    byte_reader r(data);
    auto magic = r.raw(8);
    if (std::memcmp(magic.data(), wallet_magic, 8) != 0)
        throw decode_error(0, "not a wallet file");
    wallet w(cfg, 0, std::move(backend));
    w.enrolled_ = r.u8() != 0;
    w.cfg_.delta_sync = r.u32();
    w.cfg_.bank_key = read_verifying_key(r);
    w.current_scm_ = read_fr(r);
    w.epoch_estimate_ = r.u32();

    std::uint32_t n_ext = r.u32();
    for (std::uint32_t i = 0; i < n_ext; ++i) {
        auto [scm, e] = read_external_entry(r);
        w.hist_.external[scm] = e;
    }

    std::size_t at = r.offset();
    auto marker = r.raw(8);
    if (std::memcmp(marker.data(), secrets_marker, 8) != 0)
        throw decode_error(at, "missing secrets marker");
    w.sk_ = read_fr(r);
    std::uint32_t n_int = r.u32();
    for (std::uint32_t i = 0; i < n_int; ++i) {
        fr scm = read_fr(r);
        internal_entry e;
        e.opening = read_opening(r);
        e.kind = static_cast<state_kind>(r.u8());
        if (r.u8() != 0) e.blind_req = read_fr(r);
        w.hist_.internal[scm] = e;
    }
    std::uint32_t n_rec = r.u32();
    for (std::uint32_t i = 0; i < n_rec; ++i) {
        fr scm = read_fr(r);
        recovery_entry e;
        e.blind_pm = read_fr(r);
        e.value = r.u64();
        e.sender_epoch = r.u32();
        w.hist_.recovery[scm] = e;
    }
    r.expect_done();
    // reseed blinding randomness so a loaded wallet never reuses blinds
    w.rng_ = rng(rng::from_entropy().next_u64());
    return w;
}

}  // namespace offcbdc
