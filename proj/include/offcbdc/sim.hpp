#pragma once

#include <map>

#include "offcbdc/bank.hpp"
#include "offcbdc/transport.hpp"
#include "offcbdc/wallet.hpp"

namespace offcbdc {

struct scenario_actor {
    std::string name;
    bool compromised = false;
    std::uint64_t holding_limit = 3000;
    std::uint64_t funded = 0;  // starting balance, seeded by the treasury
};

// One scripted step. `op` is one of:
//   pay                from, to, value
//   snapshot           actor                (compromised only)
//   pay_from_snapshot  from, to, value      (compromised only)
//   reconnect          actor                (reports, never recovers)
//   recover            actor                (reconnect + recovery loop)
//   sync               actor
//   advance            seconds
//   outage             seconds              (service unreachable window)
//   expect_double_spenders  value = expected count
struct scenario_event {
    std::string op;
    std::string actor;
    std::string from, to;
    std::uint64_t value = 0;
    double seconds = 0;
};

struct scenario {
    std::uint64_t seed = 1;
    std::uint32_t epoch_seconds = 86400;
    std::uint32_t delta_sync = 30;
    std::uint64_t max_holding_limit = 3000;
    std::vector<scenario_actor> actors;
    std::vector<scenario_event> events;

    static scenario from_json_text(const std::string& text);
    std::string to_json_text() const;
};

// The worked double-spend storyline: one compromised sender forks a state
// three ways; recipients settle offline, forward the funds, and reconnect in
// an order that exercises detection, recovery, and the ordinary path after a
// recovery.
scenario counterfeit_scenario();

struct trace_record {
    double at = 0;  // virtual seconds
    std::string actor;
    std::string action;
    std::string detail;
    bool ok = true;
};

struct payment_metric {
    double at = 0;
    std::string sender, recipient;
    std::uint64_t value = 0;
    std::size_t request_bytes = 0;
    std::size_t package_bytes = 0;
    std::size_t history_elements = 0;
    double proximity_seconds = 0;  // request + package over the proximity link
};

struct metrics_report {
    std::vector<payment_metric> payments;
    std::map<std::string, std::vector<std::size_t>> unsigned_history;
    std::size_t bank_requests = 0;
    std::size_t bank_bytes = 0;
    double virtual_duration = 0;

    // trace-derived, reproducible byte for byte across equal-seed runs
    std::string deterministic_text() const;
};

struct sim_result {
    std::vector<trace_record> trace;
    metrics_report metrics;
    std::vector<fr> double_spenders;
    std::vector<audit_record> audit;
    std::map<std::string, std::uint64_t> final_balances;
    std::map<std::string, std::uint64_t> final_limits;
    bool assertions_ok = true;  // scripted expectations
    // every field-element value the service observed in honest requests,
    // for confidentiality scans
    std::vector<fr> bank_observed_values;
    std::vector<fr> honest_ids, honest_balances, honest_values;

    std::string trace_text() const;
};

class simulator {
  public:
    simulator(scenario s, std::shared_ptr<const proof_backend> backend = nullptr,
              bank_config bank_overrides = {});

    sim_result run();

    central_bank& bank() { return bank_; }
    wallet& actor_wallet(const std::string& name);

    void set_proximity_bitrate(double bits_per_second) {
        proximity_.bitrate_bps = bits_per_second;
    }

  private:
    struct actor_state {
        scenario_actor spec;
        wallet w;
        std::optional<wallet> snapshot;
        std::optional<fr> pending_recovery;
    };

    actor_state& actor(const std::string& name);
    void record(sim_result& out, std::string actor, std::string action,
                std::string detail, bool ok);
    void do_pay(sim_result& out, actor_state& sender, actor_state& recipient,
                std::uint64_t value);
    void do_reconnect(sim_result& out, actor_state& a, bool with_recovery);

    scenario scenario_;
    std::shared_ptr<const proof_backend> backend_;
    central_bank bank_;
    local_bank_connection conn_;
    channel_model proximity_ = channel_model::proximity_default();
    channel_model online_ = channel_model::online_default();
    double now_ = 0;
    bool outage_ = false;
    std::map<std::string, actor_state> actors_;
    std::optional<wallet> treasury_;
};

// --- adversarial primitives ---------------------------------------------------
// Protocol-level deviations only: forked wallets still produce relation-
// satisfying transitions; they never forge proofs or signatures.

// Two payments from one state: both pass acceptance offline, both carry the
// same serial number with distinct state commitments.
struct fork_output {
    payment_package first;
    payment_package second;
};
fork_output fork_state(wallet& w, const payment_request& req1,
                       const payment_request& req2);

}  // namespace offcbdc
