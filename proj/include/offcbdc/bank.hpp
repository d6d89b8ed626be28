#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "offcbdc/messages.hpp"
#include "offcbdc/verifier.hpp"

namespace offcbdc {

struct bank_config {
    std::uint32_t delta_sync = 30;
    std::uint32_t epoch_seconds = 86400;  // one simulated day
    std::uint64_t max_holding_limit = 3000;
    std::uint32_t challenge_ttl_epochs = 2;
    // empty paths keep everything in memory
    std::string ledger_path;
    std::string audit_path;
    std::string registry_path;
};

struct audit_record {
    fr id;
    std::uint64_t value = 0;
    fr scm;
};

// The settlement authority. Proof verification runs outside the lock; the
// check-then-append around serial numbers is a single critical section, so
// two conflicting creations can never both get signed.
class central_bank {
  public:
    central_bank(bank_config cfg, std::shared_ptr<const proof_backend> backend,
                 std::uint64_t seed);

    const verifying_key& key() const { return keys_.vk; }
    const bank_config& config() const { return cfg_; }

    void set_epoch(std::uint32_t e);
    std::uint32_t current_epoch() const;

    epoch_challenge issue_epoch_challenge();
    bank_response check_enroll(const enroll_message& m);
    bank_response process_signature_request(const sig_request& req);
    bank_response process_sync_request(const sync_message& m);
    bank_response process_state_recovery(const recovery_message& m);
    std::optional<ledger_entry> query_ledger(const fr& scm) const;

    // Treasury issuance: signs a fresh state commitment presented by the
    // operator's funding wallet and records it. The issuer can create money;
    // everything downstream follows the ordinary payment rules.
    bank_response issue_funded_state(const fr& scm);

    std::vector<fr> identify_double_spenders() const;

    std::vector<ledger_entry> ledger_snapshot() const;
    std::vector<audit_record> audit_snapshot() const;
    std::size_t registered_users() const;

  private:
    signature sign_and_fill(const fr& scm);  // caller holds mu_
    void append_entry(const ledger_entry& e);  // caller holds mu_
    void persist_record(const ledger_entry& e);
    void persist_audit(const audit_record& a);
    void persist_registry(const fr& id);
    void load_persisted();

    bool challenge_ok(const epoch_challenge& ec);  // caller holds mu_
    void consume_challenge(const fr& c);           // caller holds mu_

    bank_config cfg_;
    std::shared_ptr<const proof_backend> backend_;
    signature_keypair keys_;
    mutable std::mutex mu_;
    std::uint32_t epoch_ = 0;
    rng rng_;

    std::vector<ledger_entry> ledger_;
    std::map<fr, std::size_t, fr_raw_less> by_scm_;
    std::map<fr, std::vector<std::size_t>, fr_raw_less> by_sn_;

    struct issued_challenge {
        std::uint32_t epoch;
        bool used = false;
    };
    std::map<fr, issued_challenge, fr_raw_less> challenges_;
    struct enrollment_record {
        std::uint64_t holding_limit;
        std::uint32_t epoch;
    };
    std::map<fr, enrollment_record, fr_raw_less> registry_;
    std::vector<audit_record> audit_;
};

// In-process adapter for wallets talking to a local bank instance.
class local_bank_connection final : public bank_connection {
  public:
    explicit local_bank_connection(central_bank& bank) : bank_(bank) {}

    epoch_challenge get_epoch_challenge() override {
        return bank_.issue_epoch_challenge();
    }
    std::optional<ledger_entry> query_ledger(const fr& scm) override {
        return bank_.query_ledger(scm);
    }
    bank_response submit_enroll(const enroll_message& m) override {
        return bank_.check_enroll(m);
    }
    bank_response submit_sig_request(const sig_request& req) override {
        return bank_.process_signature_request(req);
    }
    bank_response submit_sync(const sync_message& m) override {
        return bank_.process_sync_request(m);
    }
    bank_response submit_recovery(const recovery_message& m) override {
        return bank_.process_state_recovery(m);
    }

  private:
    central_bank& bank_;
};

}  // namespace offcbdc
