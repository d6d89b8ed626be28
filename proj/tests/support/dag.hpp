#pragma once

// Random honest offline scenarios: a handful of wallets exchanging payments
// with occasional reconnect+sync, producing payment packages whose related
// histories form random dependency DAGs.

#include <memory>

#include "support/fixture.hpp"

namespace offcbdc::testsupport {

struct random_dag {
    std::unique_ptr<protocol_fixture> fx;
    std::vector<wallet> wallets;
    struct accepted_payment {
        std::size_t recipient;
        fr sender_scm;  // scm the recipient must anchor
        payment_package package;
    };
    std::vector<accepted_payment> payments;
};

inline random_dag make_random_dag(std::uint64_t seed, int max_states = 12,
                                  int max_wallets = 5) {
    rng r(seed);
    random_dag dag;
    bank_config cfg;
    cfg.max_holding_limit = 1'000'000;
    dag.fx = std::make_unique<protocol_fixture>(seed, cfg);
    int n = 2 + static_cast<int>(r.next_below(
                    static_cast<std::uint64_t>(max_wallets - 1)));
    for (int i = 0; i < n; ++i)
        dag.wallets.push_back(
            dag.fx->funded(100 + r.next_below(900), 100000));

    int states = 0;
    while (states + 2 <= max_states) {
        std::uint64_t dice = r.next_below(10);
        if (dice < 8) {
            std::size_t s = r.next_below(dag.wallets.size());
            std::size_t t = r.next_below(dag.wallets.size());
            if (s == t) continue;
            wallet& sender = dag.wallets[s];
            wallet& receiver = dag.wallets[t];
            std::uint64_t headroom =
                receiver.holding_limit() - receiver.balance();
            std::uint64_t cap = std::min(sender.balance(), headroom);
            std::uint64_t v = r.next_below(cap + 1);
            auto pkg = dag.fx->pay(sender, receiver, v);
            dag.payments.push_back({t, pkg.pm.scm_new, pkg});
            states += 2;
        } else {
            std::size_t s = r.next_below(dag.wallets.size());
            wallet& w = dag.wallets[s];
            auto res = w.reconnect(dag.fx->conn);
            if (res.fully_signed) w.synchronize(dag.fx->conn);
            states += 1;  // the sync state
        }
    }
    return dag;
}

}  // namespace offcbdc::testsupport
