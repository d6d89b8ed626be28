#pragma once

#include <memory>

#include "offcbdc/messages.hpp"
#include "offcbdc/rng.hpp"
#include "offcbdc/verifier.hpp"

namespace offcbdc {

struct wallet_config {
    verifying_key bank_key;
    std::uint32_t delta_sync = 30;
};

// User-side state machine. One wallet is a single logical actor: callers
// serialize operations on it. Copyable by value, which is also how the
// simulator snapshots state for adversarial forks.
class wallet {
  public:
    wallet(wallet_config cfg, std::uint64_t seed,
           std::shared_ptr<const proof_backend> backend);

    // --- enrollment ----------------------------------------------------------
    enroll_message make_enroll(std::uint64_t holding_limit,
                               const epoch_challenge& ec);
    // Verifies and stores the bank's signature over the initial state.
    void complete_enroll(const signature& sigma);

    // Treasury bootstrap: an initial state carrying `balance` outright, to be
    // signed directly by the issuer. Returns the state commitment to present.
    fr make_issued_state(std::uint64_t balance, std::uint32_t epoch);

    // --- offline payment ------------------------------------------------------
    payment_request make_payment_request(std::uint64_t value);
    payment_package create_payment(const payment_request& req);

    struct accept_result {
        bool ok = false;
        std::string reason;
    };
    accept_result accept_payment(const payment_package& pkg) const;
    void complete_payment(const payment_package& pkg);

    // --- related history -------------------------------------------------------
    history_element get_element(const fr& scm) const;
    related_history get_related_history(const fr& scm) const;

    // --- online operations ------------------------------------------------------
    struct reconnect_result {
        bool fully_signed = false;
        std::optional<fr> recovery_scm;  // set when recovery must start here
        std::size_t requests_sent = 0;
        std::size_t ledger_queries = 0;
    };
    reconnect_result reconnect(bank_connection& bank);

    // none when some dependency is still unsigned
    std::optional<sig_request> create_sig_request(const fr& scm);

    void synchronize(bank_connection& bank);  // throws wallet_error on rejection

    struct recovery_result {
        bool ok = false;
        std::string reason;
    };
    recovery_result state_recovery(bank_connection& bank, const fr& scm);

    // Drops external entries no longer reachable from any unsigned own state.
    void prune_history();

    // --- introspection -----------------------------------------------------------
    bool enrolled() const { return enrolled_; }
    fr id() const { return prf_id(sk_); }
    const fr& current_scm() const { return current_scm_; }
    const state_opening& current_state() const;
    std::uint64_t balance() const { return current_state().balance; }
    std::uint64_t holding_limit() const { return current_state().holding_limit; }
    std::uint32_t last_synced_epoch() const { return current_state().epoch; }
    state_kind current_kind() const;
    const history_stores& histories() const { return hist_; }
    bool owns(const fr& scm) const { return hist_.internal.count(scm) != 0; }
    bool latest_signed() const;
    std::size_t unsigned_history_size() const { return unsigned_entry_count(hist_); }

    void observe_epoch(std::uint32_t epoch_estimate);
    std::uint32_t epoch_estimate() const { return epoch_estimate_; }
    bool expired() const;

    // --- persistence ----------------------------------------------------------------
    bytes save() const;
    static wallet load(std::span<const std::uint8_t> data, wallet_config cfg,
                       std::shared_ptr<const proof_backend> backend);

  private:
    struct walk_outcome {
        bool flag = false;  // a double spend was hit somewhere below
        std::optional<fr> recovery_scm;
    };
    bool query_signature(bank_connection& bank, const fr& scm,
                         reconnect_result& stats);
    walk_outcome walk(bank_connection& bank, const fr& scm,
                      reconnect_result& stats, int depth);

    const external_entry& ext(const fr& scm) const;
    verify_context vctx() const;

    wallet_config cfg_;
    std::shared_ptr<const proof_backend> backend_;
    mutable rng rng_;
    fr sk_;
    bool enrolled_ = false;
    fr current_scm_;
    std::uint32_t epoch_estimate_ = 0;
    history_stores hist_;
};

struct wallet_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace offcbdc
