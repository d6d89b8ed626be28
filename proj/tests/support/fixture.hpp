#pragma once

// In-process protocol fixture: one settlement service, wallets on demand, and
// an operator treasury that seeds balances through ordinary payments.

#include <optional>

#include "offcbdc/bank.hpp"
#include "offcbdc/wallet.hpp"

namespace offcbdc::testsupport {

struct protocol_fixture {
    std::shared_ptr<const proof_backend> backend;
    central_bank bank;
    local_bank_connection conn;
    wallet_config wcfg;
    std::uint64_t next_seed;
    std::optional<wallet> treasury;

    explicit protocol_fixture(std::uint64_t seed, bank_config cfg = {},
                              std::shared_ptr<const proof_backend> be = nullptr)
        : backend(be ? std::move(be) : std::make_shared<mock_backend>(seed)),
          bank(cfg, backend, seed),
          conn(bank),
          wcfg{bank.key(), cfg.delta_sync},
          next_seed(seed * 1000 + 1) {}

    wallet enrolled(std::uint64_t holding_limit = 3000) {
        wallet w(wcfg, next_seed++, backend);
        auto ec = bank.issue_epoch_challenge();
        auto msg = w.make_enroll(holding_limit, ec);
        auto resp = bank.check_enroll(msg);
        if (resp.status != bank_status::ok)
            throw std::runtime_error("fixture enroll failed: " + resp.reason);
        w.complete_enroll(*resp.sigma);
        return w;
    }

    void ensure_treasury() {
        if (treasury) return;
        treasury.emplace(wcfg, next_seed++, backend);
        fr scm = treasury->make_issued_state(1'000'000'000'000ULL,
                                             bank.current_epoch());
        auto resp = bank.issue_funded_state(scm);
        treasury->complete_enroll(*resp.sigma);
    }

    // Complete offline payment between two wallets; returns the package that
    // crossed the proximity channel.
    payment_package pay(wallet& sender, wallet& receiver, std::uint64_t value) {
        auto req = receiver.make_payment_request(value);
        auto pkg = sender.create_payment(req);
        auto accepted = receiver.accept_payment(pkg);
        if (!accepted.ok)
            throw std::runtime_error("fixture payment rejected: " + accepted.reason);
        receiver.complete_payment(pkg);
        return pkg;
    }

    // Enrolled wallet holding `balance`, fully signed and synchronized.
    wallet funded(std::uint64_t balance, std::uint64_t holding_limit = 3000) {
        ensure_treasury();
        wallet w = enrolled(holding_limit);
        pay(*treasury, w, balance);
        auto r = w.reconnect(conn);
        if (!r.fully_signed)
            throw std::runtime_error("fixture funding reconnect failed");
        w.synchronize(conn);
        return w;
    }

    void advance_epochs(std::uint32_t n) {
        bank.set_epoch(bank.current_epoch() + n);
    }
};

}  // namespace offcbdc::testsupport
