#include "offcbdc/sim.hpp"

#include <json.hpp>
#include <sstream>

namespace offcbdc {

using nlohmann::json;

scenario scenario::from_json_text(const std::string& text) {
    json j = json::parse(text);
    scenario s;
    s.seed = j.value("seed", std::uint64_t{1});
    s.epoch_seconds = j.value("epoch_seconds", std::uint32_t{86400});
    s.delta_sync = j.value("delta_sync", std::uint32_t{30});
    s.max_holding_limit = j.value("max_holding_limit", std::uint64_t{3000});
    for (const auto& a : j.value("actors", json::array())) {
        scenario_actor actor;
        actor.name = a.at("name").get<std::string>();
        actor.compromised = a.value("compromised", false);
        actor.holding_limit = a.value("holding_limit", std::uint64_t{3000});
        actor.funded = a.value("funded", std::uint64_t{0});
        s.actors.push_back(actor);
    }
    for (const auto& e : j.value("events", json::array())) {
        scenario_event ev;
        ev.op = e.at("op").get<std::string>();
        ev.actor = e.value("actor", "");
        ev.from = e.value("from", "");
        ev.to = e.value("to", "");
        ev.value = e.value("value", std::uint64_t{0});
        ev.seconds = e.value("seconds", 0.0);
        s.events.push_back(ev);
    }
    return s;
}

std::string scenario::to_json_text() const {
    json j;
    j["seed"] = seed;
    j["epoch_seconds"] = epoch_seconds;
    j["delta_sync"] = delta_sync;
    j["max_holding_limit"] = max_holding_limit;
    j["actors"] = json::array();
    for (const auto& a : actors) {
        json ja{{"name", a.name},
                {"compromised", a.compromised},
                {"holding_limit", a.holding_limit},
                {"funded", a.funded}};
        j["actors"].push_back(ja);
    }
    j["events"] = json::array();
    for (const auto& e : events) {
        json je{{"op", e.op}};
        if (!e.actor.empty()) je["actor"] = e.actor;
        if (!e.from.empty()) je["from"] = e.from;
        if (!e.to.empty()) je["to"] = e.to;
        if (e.value) je["value"] = e.value;
        if (e.seconds != 0) je["seconds"] = e.seconds;
        j["events"].push_back(je);
    }
    return j.dump(2);
}

scenario counterfeit_scenario() {
    scenario s;
    s.seed = 20240201;
    s.actors = {
        {"alice", true, 3000, 1200}, {"bob", false, 3000, 0},
        {"carol", false, 3000, 0},   {"david", false, 3000, 0},
        {"eve", false, 3000, 0},     {"fred", false, 3000, 0},
    };
    s.events = {
        {"snapshot", "alice", "", "", 0, 0},
        {"pay", "", "alice", "carol", 1000, 0},
        {"pay_from_snapshot", "", "alice", "bob", 1000, 0},
        {"pay", "", "carol", "david", 500, 0},
        {"pay_from_snapshot", "", "alice", "eve", 1000, 0},
        {"pay", "", "eve", "fred", 1000, 0},
        {"reconnect", "bob", "", "", 0, 0},
        {"recover", "david", "", "", 0, 0},
        {"expect_double_spenders", "", "", "", 1, 0},
        {"recover", "carol", "", "", 0, 0},
        {"recover", "eve", "", "", 0, 0},
        {"reconnect", "fred", "", "", 0, 0},
    };
    return s;
}

// --- metric/trace text -------------------------------------------------------

std::string metrics_report::deterministic_text() const {
    std::ostringstream os;
    os << "payments " << payments.size() << "\n";
    for (const auto& p : payments) {
        os << "  t=" << p.at << " " << p.sender << "->" << p.recipient
           << " value=" << p.value << " request_bytes=" << p.request_bytes
           << " package_bytes=" << p.package_bytes
           << " history_elements=" << p.history_elements
           << " proximity_s=" << p.proximity_seconds << "\n";
    }
    os << "bank_requests " << bank_requests << "\n";
    os << "bank_bytes " << bank_bytes << "\n";
    for (const auto& [name, sizes] : unsigned_history) {
        os << "unsigned_history " << name;
        for (auto v : sizes) os << " " << v;
        os << "\n";
    }
    os << "virtual_duration " << virtual_duration << "\n";
    return os.str();
}

std::string sim_result::trace_text() const {
    std::ostringstream os;
    for (const auto& r : trace) {
        os << "t=" << r.at << " " << r.actor << " " << r.action;
        if (!r.detail.empty()) os << " " << r.detail;
        os << (r.ok ? "" : " FAILED") << "\n";
    }
    return os.str();
}

// --- adversarial primitives -----------------------------------------------------

fork_output fork_state(wallet& w, const payment_request& req1,
                       const payment_request& req2) {
    wallet base = w;  // state fork via snapshot
    fork_output out;
    out.first = w.create_payment(req1);
    wallet branch2 = base;
    out.second = branch2.create_payment(req2);
    w = std::move(branch2);  // continue on the second branch
    return out;
}

// --- simulator -------------------------------------------------------------------

namespace {

// Counts and sizes everything the service receives, and captures every field
// element in honest requests for confidentiality scans.
struct metering_connection final : public bank_connection {
    bank_connection& inner;
    metrics_report& metrics;
    std::vector<fr>* observed = nullptr;  // set while an honest actor talks

    metering_connection(bank_connection& c, metrics_report& m)
        : inner(c), metrics(m) {}

    void note(std::size_t bytes) {
        metrics.bank_requests += 1;
        metrics.bank_bytes += bytes;
    }
    void capture(std::initializer_list<fr> values) {
        if (!observed) return;
        observed->insert(observed->end(), values.begin(), values.end());
    }
    void capture_bundle(const proof_bundle& b) {
        if (!observed) return;
        observed->insert(observed->end(), b.pub.slots.begin(), b.pub.slots.end());
    }

    epoch_challenge get_epoch_challenge() override {
        note(1);
        return inner.get_epoch_challenge();
    }
    std::optional<ledger_entry> query_ledger(const fr& scm) override {
        note(33);
        return inner.query_ledger(scm);
    }
    bank_response submit_enroll(const enroll_message& m) override {
        note(m.encode().size());
        capture({m.id, m.scm0, m.challenge});
        capture_bundle(m.zkp_enroll);
        return inner.submit_enroll(m);
    }
    bank_response submit_sig_request(const sig_request& req) override {
        note(encode_sig_request(req).size());
        if (const auto* c = std::get_if<creation_sig_request>(&req)) {
            capture({c->scm, c->dcm, c->sn, c->ds});
            capture_bundle(c->zkp_state);
            capture_bundle(c->zkp_dep);
        } else {
            const auto& c2 = std::get<completion_sig_request>(req);
            capture({c2.scm, c2.dcm, c2.pcm});
            capture_bundle(c2.zkp_state);
            capture_bundle(c2.zkp_dep);
            capture_bundle(c2.zkp_pm);
        }
        return inner.submit_sig_request(req);
    }
    bank_response submit_sync(const sync_message& m) override {
        note(m.encode().size());
        capture({m.scm_new, m.challenge});
        return inner.submit_sync(m);
    }
    bank_response submit_recovery(const recovery_message& m) override {
        note(m.encode().size());
        return inner.submit_recovery(m);
    }
};

bank_config make_bank_config(const scenario& s, bank_config overrides) {
    bank_config cfg = overrides;
    cfg.delta_sync = s.delta_sync;
    cfg.epoch_seconds = s.epoch_seconds;
    cfg.max_holding_limit = std::max(cfg.max_holding_limit, s.max_holding_limit);
    return cfg;
}

}  // namespace

simulator::simulator(scenario s, std::shared_ptr<const proof_backend> backend,
                     bank_config bank_overrides)
    : scenario_(std::move(s)),
      backend_(backend ? std::move(backend)
                       : std::make_shared<mock_backend>(scenario_.seed)),
      bank_(make_bank_config(scenario_, std::move(bank_overrides)), backend_,
            scenario_.seed),
      conn_(bank_) {
    wallet_config wcfg{bank_.key(), scenario_.delta_sync};
    std::uint64_t actor_seed = scenario_.seed * 7919 + 1;
    for (const auto& spec : scenario_.actors) {
        if (actors_.count(spec.name))
            throw std::invalid_argument("duplicate actor " + spec.name);
        actors_.emplace(spec.name,
                        actor_state{spec, wallet(wcfg, actor_seed++, backend_),
                                    std::nullopt, std::nullopt});
    }
}

simulator::actor_state& simulator::actor(const std::string& name) {
    auto it = actors_.find(name);
    if (it == actors_.end())
        throw std::invalid_argument("scenario references unknown actor " + name);
    return it->second;
}

wallet& simulator::actor_wallet(const std::string& name) {
    return actor(name).w;
}

void simulator::record(sim_result& out, std::string actor_name,
                       std::string action, std::string detail, bool ok) {
    out.trace.push_back({now_, std::move(actor_name), std::move(action),
                         std::move(detail), ok});
}

void simulator::do_pay(sim_result& out, actor_state& sender,
                       actor_state& recipient, std::uint64_t value) {
    auto req = recipient.w.make_payment_request(value);
    std::size_t req_bytes = req.encode().size();
    auto pkg = sender.w.create_payment(req);
    std::size_t pkg_bytes = pkg.encode().size();
    auto accepted = recipient.w.accept_payment(pkg);
    if (accepted.ok) recipient.w.complete_payment(pkg);

    double proximity_s = transfer_time(proximity_, req_bytes) +
                         transfer_time(proximity_, pkg_bytes);
    out.metrics.payments.push_back({now_, sender.spec.name, recipient.spec.name,
                                    value, req_bytes, pkg_bytes,
                                    pkg.history.size(), proximity_s});
    out.metrics.unsigned_history[sender.spec.name].push_back(
        sender.w.unsigned_history_size());
    out.metrics.unsigned_history[recipient.spec.name].push_back(
        recipient.w.unsigned_history_size());
    record(out, sender.spec.name, "pay",
           "-> " + recipient.spec.name + " value=" + std::to_string(value) +
               " bytes=" + std::to_string(pkg_bytes) +
               " history=" + std::to_string(pkg.history.size()),
           accepted.ok);
    now_ += proximity_s;
}

void simulator::do_reconnect(sim_result& out, actor_state& a,
                             bool with_recovery) {
    if (outage_) {
        record(out, a.spec.name, with_recovery ? "recover" : "reconnect",
               "service unreachable", false);
        return;
    }
    metering_connection mc(conn_, out.metrics);
    if (!a.spec.compromised) mc.observed = &out.bank_observed_values;

    for (int rounds = 0; rounds < 64; ++rounds) {
        auto result = a.w.reconnect(mc);
        if (result.fully_signed) {
            a.pending_recovery.reset();
            record(out, a.spec.name, with_recovery ? "recover" : "reconnect",
                   "signed requests=" + std::to_string(result.requests_sent),
                   true);
            return;
        }
        a.pending_recovery = result.recovery_scm;
        if (!with_recovery || !result.recovery_scm) {
            record(out, a.spec.name, "reconnect", "recovery_needed", false);
            return;
        }
        auto rec = a.w.state_recovery(mc, *result.recovery_scm);
        record(out, a.spec.name, "state_recovery",
               rec.ok ? "disclosed" : rec.reason, rec.ok);
        if (!rec.ok) return;
    }
    record(out, a.spec.name, "recover", "no progress", false);
}

sim_result simulator::run() {
    sim_result out;
    // funding phase: the treasury seeds starting balances through ordinary
    // payments, then everyone reconnects and synchronizes
    std::uint64_t total_funding = 0;
    for (const auto& [name, a] : actors_) total_funding += a.spec.funded;
    {
        wallet_config wcfg{bank_.key(), scenario_.delta_sync};
        treasury_.emplace(wcfg, scenario_.seed ^ 0x74726561ULL, backend_);
        fr scm = treasury_->make_issued_state(
            std::max<std::uint64_t>(total_funding, 1), bank_.current_epoch());
        auto resp = bank_.issue_funded_state(scm);
        treasury_->complete_enroll(*resp.sigma);
    }
    for (auto& [name, a] : actors_) {
        auto ec = bank_.issue_epoch_challenge();
        auto msg = a.w.make_enroll(a.spec.holding_limit, ec);
        auto resp = bank_.check_enroll(msg);
        if (resp.status != bank_status::ok)
            throw std::runtime_error("enroll failed for " + name + ": " +
                                     resp.reason);
        a.w.complete_enroll(*resp.sigma);
        if (a.spec.funded > 0) {
            auto req = a.w.make_payment_request(a.spec.funded);
            auto pkg = treasury_->create_payment(req);
            a.w.complete_payment(pkg);
            auto r = a.w.reconnect(conn_);
            if (!r.fully_signed)
                throw std::runtime_error("funding reconnect failed for " + name);
            a.w.synchronize(conn_);
        }
        record(out, name, "enrolled",
               "funded=" + std::to_string(a.spec.funded), true);
    }

    double outage_until = -1;
    for (const auto& ev : scenario_.events) {
        outage_ = now_ < outage_until;
        if (ev.op == "pay") {
            do_pay(out, actor(ev.from), actor(ev.to), ev.value);
        } else if (ev.op == "snapshot") {
            actor_state& a = actor(ev.actor);
            if (!a.spec.compromised)
                throw std::invalid_argument("snapshot on honest actor " +
                                            ev.actor);
            a.snapshot = a.w;
            record(out, ev.actor, "snapshot", "", true);
        } else if (ev.op == "pay_from_snapshot") {
            actor_state& a = actor(ev.from);
            if (!a.spec.compromised || !a.snapshot)
                throw std::invalid_argument("pay_from_snapshot needs a prior "
                                            "snapshot of a compromised actor");
            a.w = *a.snapshot;  // rewind: the fork primitive
            do_pay(out, a, actor(ev.to), ev.value);
        } else if (ev.op == "reconnect") {
            do_reconnect(out, actor(ev.actor), false);
        } else if (ev.op == "recover") {
            do_reconnect(out, actor(ev.actor), true);
        } else if (ev.op == "sync") {
            actor_state& a = actor(ev.actor);
            if (outage_) {
                record(out, ev.actor, "sync", "service unreachable", false);
            } else {
                metering_connection mc(conn_, out.metrics);
                if (!a.spec.compromised) mc.observed = &out.bank_observed_values;
                try {
                    a.w.synchronize(mc);
                    record(out, ev.actor, "sync",
                           "epoch=" + std::to_string(a.w.last_synced_epoch()),
                           true);
                } catch (const wallet_error& e) {
                    record(out, ev.actor, "sync", e.what(), false);
                }
            }
        } else if (ev.op == "advance") {
            now_ += ev.seconds;
            std::uint32_t epoch = static_cast<std::uint32_t>(
                now_ / scenario_.epoch_seconds);
            bank_.set_epoch(epoch);
            for (auto& [name, a] : actors_) a.w.observe_epoch(epoch);
            record(out, "clock", "advance",
                   "t=" + std::to_string(now_) +
                       " epoch=" + std::to_string(epoch),
                   true);
        } else if (ev.op == "outage") {
            outage_until = now_ + ev.seconds;
            record(out, "service", "outage",
                   "until=" + std::to_string(outage_until), true);
        } else if (ev.op == "expect_double_spenders") {
            auto ids = bank_.identify_double_spenders();
            bool ok = ids.size() == ev.value;
            if (!ok) out.assertions_ok = false;
            record(out, "bank", "expect_double_spenders",
                   "expected=" + std::to_string(ev.value) +
                       " got=" + std::to_string(ids.size()),
                   ok);
        } else {
            throw std::invalid_argument("unknown scenario op '" + ev.op + "'");
        }
    }

    out.metrics.virtual_duration = now_;
    out.double_spenders = bank_.identify_double_spenders();
    out.audit = bank_.audit_snapshot();
    for (auto& [name, a] : actors_) {
        out.final_balances[name] = a.w.balance();
        out.final_limits[name] = a.w.holding_limit();
        if (!a.spec.compromised) {
            out.honest_ids.push_back(a.w.id());
            out.honest_balances.push_back(fr::from_u64(a.w.balance()));
        }
    }
    for (const auto& p : out.metrics.payments)
        out.honest_values.push_back(fr::from_u64(p.value));
    return out;
}

}  // namespace offcbdc
