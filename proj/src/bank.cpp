#include "offcbdc/bank.hpp"

#include <fstream>
#include <set>

namespace offcbdc {

namespace {

// Derives the service signing key from the seed so a restarted service keeps
// verifying its own ledger.
signature_keypair derive_keys(std::uint64_t seed) {
    rng r(seed ^ 0x62616e6bULL);  // "bank"
    return signature_keypair::generate(r);
}

void append_record_file(const std::string& path, const bytes& payload) {
    if (path.empty()) return;
    std::ofstream f(path, std::ios::binary | std::ios::app);
    if (!f) throw std::runtime_error("cannot append to " + path);
    byte_writer w;
    w.var_bytes(payload);
    bytes framed = w.take();
    f.write(reinterpret_cast<const char*>(framed.data()),
            static_cast<std::streamsize>(framed.size()));
    f.flush();
}

std::vector<bytes> read_record_file(const std::string& path) {
    std::vector<bytes> records;
    if (path.empty()) return records;
    std::ifstream f(path, std::ios::binary);
    if (!f) return records;  // absent file = fresh service
    bytes data((std::istreambuf_iterator<char>(f)),
               std::istreambuf_iterator<char>());
    byte_reader r(data);
    while (!r.done()) records.push_back(r.var_bytes());
    return records;
}

}  // namespace

central_bank::central_bank(bank_config cfg,
                           std::shared_ptr<const proof_backend> backend,
                           std::uint64_t seed)
    : cfg_(std::move(cfg)),
      backend_(std::move(backend)),
      keys_(derive_keys(seed)),
      rng_(seed ^ 0x6368616cULL) {
    load_persisted();
}

void central_bank::set_epoch(std::uint32_t e) {
    std::lock_guard lock(mu_);
    if (e > epoch_) epoch_ = e;
}

std::uint32_t central_bank::current_epoch() const {
    std::lock_guard lock(mu_);
    return epoch_;
}

// --- persistence -------------------------------------------------------------

void central_bank::persist_record(const ledger_entry& e) {
    append_record_file(cfg_.ledger_path, e.encode());
}

void central_bank::persist_audit(const audit_record& a) {
    byte_writer w;
    write_fr(w, a.id);
    w.u64(a.value);
    write_fr(w, a.scm);
    append_record_file(cfg_.audit_path, w.take());
}

void central_bank::persist_registry(const fr& id) {
    byte_writer w;
    write_fr(w, id);
    w.u64(registry_.at(id).holding_limit);
    w.u32(registry_.at(id).epoch);
    append_record_file(cfg_.registry_path, w.take());
}

void central_bank::load_persisted() {
    for (const bytes& rec : read_record_file(cfg_.ledger_path)) {
        byte_reader r(rec);
        ledger_entry e = ledger_entry::decode(r);
        auto it = by_scm_.find(e.scm);
        if (it == by_scm_.end()) {
            by_scm_[e.scm] = ledger_.size();
            if (e.sn) by_sn_[*e.sn].push_back(ledger_.size());
            ledger_.push_back(e);
        } else if (e.sigma && !ledger_[it->second].sigma) {
            ledger_[it->second].sigma = e.sigma;  // signature fill record
        }
    }
    for (const bytes& rec : read_record_file(cfg_.registry_path)) {
        byte_reader r(rec);
        fr id = read_fr(r);
        std::uint64_t limit = r.u64();
        std::uint32_t epoch = r.u32();
        registry_[id] = {limit, epoch};
    }
    for (const bytes& rec : read_record_file(cfg_.audit_path)) {
        byte_reader r(rec);
        audit_record a;
        a.id = read_fr(r);
        a.value = r.u64();
        a.scm = read_fr(r);
        audit_.push_back(a);
    }
}

// --- internal helpers -----------------------------------------------------------

void central_bank::append_entry(const ledger_entry& e) {
    by_scm_[e.scm] = ledger_.size();
    if (e.sn) by_sn_[*e.sn].push_back(ledger_.size());
    ledger_.push_back(e);
    persist_record(e);
}

signature central_bank::sign_and_fill(const fr& scm) {
    signature sigma = sign(keys_.sk, scm);
    std::size_t idx = by_scm_.at(scm);
    ledger_[idx].sigma = sigma;
    ledger_entry fill = ledger_[idx];
    persist_record(fill);
    return sigma;
}

bool central_bank::challenge_ok(const epoch_challenge& ec) {
    auto it = challenges_.find(ec.challenge);
    if (it == challenges_.end() || it->second.used) return false;
    if (it->second.epoch != ec.epoch) return false;
    if (epoch_ > it->second.epoch &&
        epoch_ - it->second.epoch > cfg_.challenge_ttl_epochs)
        return false;
    return true;
}

void central_bank::consume_challenge(const fr& c) { challenges_.at(c).used = true; }

// --- operations --------------------------------------------------------------------

epoch_challenge central_bank::issue_epoch_challenge() {
    std::lock_guard lock(mu_);
    fr c = rng_.next_fr();
    challenges_[c] = {epoch_, false};
    return {epoch_, c};
}

bank_response central_bank::check_enroll(const enroll_message& m) {
    {
        std::lock_guard lock(mu_);
        auto it = by_scm_.find(m.scm0);
        if (it != by_scm_.end() && ledger_[it->second].sigma)
            return bank_response::accepted(*ledger_[it->second].sigma);
    }
    if (m.holding_limit > cfg_.max_holding_limit)
        return bank_response::reject("holding limit policy");

    enroll_instance expect;
    std::vector<fr> pub = {m.id, m.scm0, fr::from_u64(m.epoch),
                           fr::from_u64(m.holding_limit), m.challenge};
    if (m.zkp_enroll.rel != relation_id::enroll ||
        m.zkp_enroll.pub.slots != pub || !backend_->verify(m.zkp_enroll))
        return bank_response::reject("enroll proof");

    std::lock_guard lock(mu_);
    if (!challenge_ok({m.epoch, m.challenge}))
        return bank_response::reject("challenge");
    if (registry_.count(m.id)) return bank_response::reject("already registered");
    consume_challenge(m.challenge);
    registry_[m.id] = {m.holding_limit, m.epoch};
    persist_registry(m.id);
    append_entry({std::nullopt, std::nullopt, m.scm0, std::nullopt});
    return bank_response::accepted(sign_and_fill(m.scm0));
}

bank_response central_bank::process_signature_request(const sig_request& req) {
    verify_context ctx{backend_.get(), keys_.vk, fr::from_u64(cfg_.delta_sync)};
    std::vector<fr> pk = {keys_.vk.point.x, keys_.vk.point.y};

    if (const auto* c = std::get_if<creation_sig_request>(&req)) {
        if (!verify_bundle_against(ctx, c->zkp_state, relation_id::create_state,
                                   {c->scm, c->dcm, c->sn, c->ds}))
            return bank_response::reject("state proof");
        auto dep_pub = pk;
        dep_pub.push_back(c->dcm);
        if (!verify_bundle_against(ctx, c->zkp_dep, relation_id::create_dep, dep_pub))
            return bank_response::reject("dependency proof");

        // serialization point: lookup, append, conflict check, and signing
        // are atomic with respect to other creations
        std::lock_guard lock(mu_);
        auto it = by_scm_.find(c->scm);
        if (it != by_scm_.end() && ledger_[it->second].sigma)
            return bank_response::accepted(*ledger_[it->second].sigma);
        if (it == by_scm_.end()) append_entry({c->sn, c->ds, c->scm, std::nullopt});
        if (by_sn_[c->sn].size() > 1) return bank_response::bottom();
        return bank_response::accepted(sign_and_fill(c->scm));
    }

    const auto& c = std::get<completion_sig_request>(req);
    if (!verify_bundle_against(ctx, c.zkp_state, relation_id::complete_state,
                               {fr::from_u64(cfg_.delta_sync), c.scm, c.dcm, c.pcm}))
        return bank_response::reject("state proof");
    auto dep_pub = pk;
    dep_pub.push_back(c.dcm);
    if (!verify_bundle_against(ctx, c.zkp_dep, relation_id::complete_dep, dep_pub))
        return bank_response::reject("dependency proof");
    if (!verify_bundle_against(ctx, c.zkp_pm, relation_id::payment, {c.pcm}))
        return bank_response::reject("payment proof");

    // completions carry no double-spend check
    std::lock_guard lock(mu_);
    auto it = by_scm_.find(c.scm);
    if (it != by_scm_.end() && ledger_[it->second].sigma)
        return bank_response::accepted(*ledger_[it->second].sigma);
    if (it == by_scm_.end())
        append_entry({std::nullopt, std::nullopt, c.scm, std::nullopt});
    return bank_response::accepted(sign_and_fill(c.scm));
}

bank_response central_bank::process_sync_request(const sync_message& m) {
    {
        std::lock_guard lock(mu_);
        auto it = by_scm_.find(m.scm_new);
        if (it != by_scm_.end() && ledger_[it->second].sigma)
            return bank_response::accepted(*ledger_[it->second].sigma);
    }
    std::vector<fr> pub = {keys_.vk.point.x, keys_.vk.point.y, m.scm_new,
                           fr::from_u64(m.epoch), m.challenge};
    if (m.zkp_sync.rel != relation_id::sync || m.zkp_sync.pub.slots != pub ||
        !backend_->verify(m.zkp_sync))
        return bank_response::reject("sync proof");

    std::lock_guard lock(mu_);
    if (!challenge_ok({m.epoch, m.challenge}))
        return bank_response::reject("challenge");
    consume_challenge(m.challenge);
    if (!by_scm_.count(m.scm_new))
        append_entry({std::nullopt, std::nullopt, m.scm_new, std::nullopt});
    return bank_response::accepted(sign_and_fill(m.scm_new));
}

bank_response central_bank::process_state_recovery(const recovery_message& m) {
    {
        std::lock_guard lock(mu_);
        auto it = by_scm_.find(m.scm);
        if (it != by_scm_.end() && ledger_[it->second].sigma)
            return bank_response::accepted(*ledger_[it->second].sigma);
    }
    auto elem_it = m.history.find(m.scm);
    if (elem_it == m.history.end())
        return bank_response::reject("recovering state missing from history");
    const history_element& elem = elem_it->second;
    std::optional<fr> pcm;
    if (const auto* d = std::get_if<completion_with_dep>(&elem)) pcm = d->pcm;
    if (const auto* o = std::get_if<completion_with_openings>(&elem)) pcm = o->pcm;
    if (!pcm) return bank_response::reject("recovering state is not a completion");

    std::vector<fr> pub = {keys_.vk.point.x, keys_.vk.point.y, m.id,
                           fr::from_u64(m.value), m.scm, *pcm};
    if (m.zkp_recovery.rel != relation_id::recovery ||
        m.zkp_recovery.pub.slots != pub || !backend_->verify(m.zkp_recovery))
        return bank_response::reject("recovery proof");

    verify_context ctx{backend_.get(), keys_.vk, fr::from_u64(cfg_.delta_sync)};
    if (!verify_offline_completion(ctx, m.history, m.scm))
        return bank_response::reject("incomplete related history");

    std::lock_guard lock(mu_);
    // record every previously unseen state from the history, including the
    // conflicting creation with its serial number and tag, all unsigned
    for (const auto& [scm, e] : m.history) {
        if (by_scm_.count(scm)) continue;
        if (const auto* cd = std::get_if<creation_with_dep>(&e)) {
            append_entry({cd->sn, cd->ds, scm, std::nullopt});
        } else if (const auto* co = std::get_if<creation_with_openings>(&e)) {
            append_entry({co->sn, co->ds, scm, std::nullopt});
        } else if (const auto* leaf = std::get_if<signed_leaf>(&e)) {
            append_entry({std::nullopt, std::nullopt, scm, leaf->sigma});
        } else {
            append_entry({std::nullopt, std::nullopt, scm, std::nullopt});
        }
    }
    audit_record rec{m.id, m.value, m.scm};
    audit_.push_back(rec);
    persist_audit(rec);
    return bank_response::accepted(sign_and_fill(m.scm));
}

std::optional<ledger_entry> central_bank::query_ledger(const fr& scm) const {
    std::lock_guard lock(mu_);
    auto it = by_scm_.find(scm);
    if (it == by_scm_.end()) return std::nullopt;
    return ledger_[it->second];
}

bank_response central_bank::issue_funded_state(const fr& scm) {
    std::lock_guard lock(mu_);
    auto it = by_scm_.find(scm);
    if (it != by_scm_.end() && ledger_[it->second].sigma)
        return bank_response::accepted(*ledger_[it->second].sigma);
    if (it == by_scm_.end())
        append_entry({std::nullopt, std::nullopt, scm, std::nullopt});
    return bank_response::accepted(sign_and_fill(scm));
}

std::vector<fr> central_bank::identify_double_spenders() const {
    std::lock_guard lock(mu_);
    std::vector<fr> ids;
    std::set<std::array<std::uint8_t, 32>> seen;
    for (const auto& [sn, indexes] : by_sn_) {
        for (std::size_t a = 0; a < indexes.size(); ++a) {
            for (std::size_t b = a + 1; b < indexes.size(); ++b) {
                const ledger_entry& ea = ledger_[indexes[a]];
                const ledger_entry& eb = ledger_[indexes[b]];
                if (ea.scm == eb.scm) continue;
                // ds = id + scm*t with a shared t: two tags solve linearly
                fr t = (*ea.ds - *eb.ds) * (ea.scm - eb.scm).inverse();
                fr id = *ea.ds - ea.scm * t;
                if (seen.insert(id.to_bytes_be()).second) ids.push_back(id);
            }
        }
    }
    return ids;
}

std::vector<ledger_entry> central_bank::ledger_snapshot() const {
    std::lock_guard lock(mu_);
    return ledger_;
}

std::vector<audit_record> central_bank::audit_snapshot() const {
    std::lock_guard lock(mu_);
    return audit_;
}

std::size_t central_bank::registered_users() const {
    std::lock_guard lock(mu_);
    return registry_.size();
}

}  // namespace offcbdc
