#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/fixture.hpp"

using namespace offcbdc;
using namespace offcbdc::testsupport;

TEST_CASE("enrollment round trip") {
    protocol_fixture fx(301);
    wallet w = fx.enrolled(3000);
    CHECK(w.enrolled());
    CHECK(w.balance() == 0);
    CHECK(w.latest_signed());
    CHECK(fx.bank.registered_users() == 1);
}

TEST_CASE("an enroll message satisfies the enroll relation") {
    protocol_fixture fx(302);
    wallet w(fx.wcfg, 99, fx.backend);
    auto ec = fx.bank.issue_epoch_challenge();
    auto msg = w.make_enroll(3000, ec);
    CHECK(msg.zkp_enroll.rel == relation_id::enroll);
    CHECK(fx.backend->verify(msg.zkp_enroll));
    CHECK(msg.id == w.id());
}

TEST_CASE("same secret key yields same id; bank rejects the second enroll") {
    protocol_fixture fx(303);
    wallet a(fx.wcfg, 42, fx.backend);
    wallet b(fx.wcfg, 42, fx.backend);  // same seed -> same sk
    CHECK(a.id() == b.id());
    auto m1 = a.make_enroll(1000, fx.bank.issue_epoch_challenge());
    auto m2 = b.make_enroll(1000, fx.bank.issue_epoch_challenge());
    CHECK(fx.bank.check_enroll(m1).status == bank_status::ok);
    auto r2 = fx.bank.check_enroll(m2);
    CHECK(r2.status == bank_status::rejected);
    CHECK(r2.reason == "already registered");
}

TEST_CASE("payment moves value: 1200 pays 1000") {
    protocol_fixture fx(304);
    wallet alice = fx.funded(1200);
    wallet bob = fx.funded(0);
    std::uint64_t alice_ctr = alice.current_state().counter;
    fx.pay(alice, bob, 1000);
    CHECK(alice.balance() == 200);
    CHECK(bob.balance() == 1000);
    CHECK(alice.current_state().counter == alice_ctr + 1);
}

TEST_CASE("paying the full balance leaves zero") {
    protocol_fixture fx(305);
    wallet alice = fx.funded(700);
    wallet bob = fx.funded(0);
    fx.pay(alice, bob, 700);
    CHECK(alice.balance() == 0);
}

TEST_CASE("insufficient balance is refused locally") {
    protocol_fixture fx(306);
    wallet alice = fx.funded(100);
    wallet bob = fx.funded(0);
    auto req = bob.make_payment_request(101);
    CHECK_THROWS_WITH_AS(alice.create_payment(req), "insufficient balance",
                         wallet_error);
}

TEST_CASE("zero-value payment still transitions state") {
    protocol_fixture fx(307);
    wallet alice = fx.funded(50);
    wallet bob = fx.funded(0);
    std::uint64_t bob_ctr = bob.current_state().counter;
    fr bob_scm_before = bob.current_scm();
    fx.pay(alice, bob, 0);
    CHECK(bob.balance() == 0);
    CHECK(bob.current_state().counter == bob_ctr);  // completions keep ctr
    CHECK(bob.current_scm() != bob_scm_before);
}

TEST_CASE("two requests from one state use fresh blinds") {
    protocol_fixture fx(308);
    wallet bob = fx.funded(0);
    auto r1 = bob.make_payment_request(10);
    auto r2 = bob.make_payment_request(10);
    CHECK(r1.rcm != r2.rcm);
}

TEST_CASE("payment request encoding stays compact") {
    protocol_fixture fx(309);
    wallet bob = fx.funded(0);
    auto req = bob.make_payment_request(1000);
    CHECK(req.encode().size() <= 128);
}

TEST_CASE("recipient rejects a tampered value") {
    protocol_fixture fx(310);
    wallet alice = fx.funded(1200);
    wallet bob = fx.funded(0);
    auto req = bob.make_payment_request(1000);
    auto pkg = alice.create_payment(req);
    pkg.pm.value = 1001;
    auto res = bob.accept_payment(pkg);
    CHECK(!res.ok);
    CHECK(res.reason == "payment proof");
}

TEST_CASE("recipient rejects an incomplete related history") {
    protocol_fixture fx(311);
    wallet alice = fx.funded(1200);
    wallet bob = fx.funded(0);
    wallet carol = fx.funded(0);
    // two offline hops so the history has an unsigned predecessor to delete
    fx.pay(alice, bob, 1000);
    auto req = carol.make_payment_request(400);
    auto pkg = bob.create_payment(req);
    REQUIRE(pkg.history.size() >= 2);
    // drop the sender's unsigned predecessor element
    fr own_prev = bob.current_state().scm_prev;
    auto trimmed = pkg;
    trimmed.history.erase(own_prev);
    auto res = carol.accept_payment(trimmed);
    CHECK(!res.ok);
    CHECK(res.reason == "incomplete related history");
    // the untampered package is fine
    CHECK(carol.accept_payment(pkg).ok);
}

TEST_CASE("recipient rejects a stale sender epoch") {
    bank_config cfg;
    cfg.delta_sync = 3;
    protocol_fixture fx(312, cfg);
    wallet alice = fx.funded(100);
    wallet bob = fx.funded(0);
    auto req = bob.make_payment_request(10);
    auto pkg = alice.create_payment(req);
    pkg.pm.sender_epoch = bob.last_synced_epoch() + 4;
    auto res = bob.accept_payment(pkg);
    CHECK(!res.ok);
    CHECK(res.reason == "epoch distance");
}

TEST_CASE("accepting without an outstanding request fails") {
    protocol_fixture fx(313);
    wallet alice = fx.funded(100);
    wallet bob = fx.funded(0);
    wallet carol = fx.funded(0);
    auto req = bob.make_payment_request(10);
    auto pkg = alice.create_payment(req);
    auto res = carol.accept_payment(pkg);  // carol never asked
    CHECK(!res.ok);
    CHECK(res.reason == "no outstanding request");
}

TEST_CASE("completion over the holding limit is refused") {
    protocol_fixture fx(314);
    wallet alice = fx.funded(2000);
    wallet bob = fx.funded(500, 1200);  // limit 1200, balance 500
    auto req = bob.make_payment_request(800);
    auto pkg = alice.create_payment(req);
    CHECK(bob.accept_payment(pkg).ok);
    CHECK_THROWS_WITH_AS(bob.complete_payment(pkg), "holding limit exceeded",
                         wallet_error);
}

TEST_CASE("expired wallets refuse to participate") {
    bank_config cfg;
    cfg.delta_sync = 5;
    protocol_fixture fx(315, cfg);
    wallet alice = fx.funded(100);
    alice.observe_epoch(alice.last_synced_epoch() + 6);
    CHECK(alice.expired());
    CHECK_THROWS_AS(alice.make_payment_request(1), wallet_error);
    payment_request fake{fr::from_u64(1), 1};
    CHECK_THROWS_AS(alice.create_payment(fake), wallet_error);
}

TEST_CASE("related history of a freshly synced sender is one element") {
    protocol_fixture fx(316);
    wallet alice = fx.funded(100);
    wallet bob = fx.funded(0);
    auto pkg = fx.pay(alice, bob, 10);
    CHECK(pkg.history.size() == 1);
    CHECK(std::holds_alternative<creation_with_dep>(
        pkg.history.at(alice.current_scm())));
}

TEST_CASE("offline chain: the five-element related history") {
    // Alice makes two back-to-back offline creations; Bob, one unsigned
    // creation deep, completes her payment and then pays Carol. The package
    // must cover Bob's creation, completion, and prior creation plus Alice's
    // two creations: five elements.
    protocol_fixture fx(317);
    wallet alice = fx.funded(1200);
    wallet bob = fx.funded(300);
    wallet carol = fx.funded(0);
    wallet sink = fx.funded(0);

    fx.pay(alice, sink, 100);  // alice state 2 (creation, has dep proof)
    fx.pay(bob, sink, 100);    // bob state 7 analogue (creation, has dep proof)
    fx.pay(alice, bob, 1000);  // alice state 3 -> bob completion 8
    auto req = carol.make_payment_request(500);
    auto pkg = bob.create_payment(req);  // bob creation 9

    CHECK(pkg.history.size() == 5);
    CHECK(carol.accept_payment(pkg).ok);
    carol.complete_payment(pkg);
    CHECK(carol.balance() == 500);
}

TEST_CASE("reconnect issues five requests for the five-element chain") {
    protocol_fixture fx(318);
    wallet alice = fx.funded(1200);
    wallet bob = fx.funded(300);
    wallet carol = fx.funded(0);
    wallet sink = fx.funded(0);
    fx.pay(alice, sink, 100);
    fx.pay(bob, sink, 100);
    fx.pay(alice, bob, 1000);
    fx.pay(bob, carol, 500);

    auto result = bob.reconnect(fx.conn);
    CHECK(result.fully_signed);
    CHECK(result.requests_sent == 5);
    CHECK(bob.latest_signed());
}

TEST_CASE("reconnect with everything signed sends nothing") {
    protocol_fixture fx(319);
    wallet alice = fx.funded(100);
    auto result = alice.reconnect(fx.conn);
    CHECK(result.fully_signed);
    CHECK(result.requests_sent == 0);
}

TEST_CASE("chain integrity: internal openings recompute every commitment") {
    protocol_fixture fx(320);
    wallet alice = fx.funded(500);
    wallet bob = fx.funded(0);
    fx.pay(alice, bob, 100);
    fx.pay(alice, bob, 50);
    for (const auto& [scm, entry] : alice.histories().internal) {
        CHECK(entry.opening.commitment() == scm);
    }
    // and the chain links: every non-genesis state's scm_prev is present
    for (const auto& [scm, entry] : alice.histories().internal) {
        if (entry.opening.scm_prev.is_zero()) continue;
        CHECK(alice.histories().internal.count(entry.opening.scm_prev) == 1);
    }
}

TEST_CASE("counter increments only on creations") {
    protocol_fixture fx(321);
    wallet alice = fx.funded(500);
    wallet bob = fx.funded(0);
    std::uint64_t a0 = alice.current_state().counter;
    std::uint64_t b0 = bob.current_state().counter;
    fx.pay(alice, bob, 100);
    CHECK(alice.current_state().counter == a0 + 1);
    CHECK(bob.current_state().counter == b0);
    alice.reconnect(fx.conn);
    alice.synchronize(fx.conn);
    CHECK(alice.current_state().counter == a0 + 1);  // sync keeps ctr
}

TEST_CASE("a state transition invalidates outstanding request commitments") {
    protocol_fixture fx(322);
    wallet alice = fx.funded(500);
    wallet bob = fx.funded(100);
    wallet carol = fx.funded(0);

    auto req = bob.make_payment_request(100);       // bound to bob's state k
    auto pkg = alice.create_payment(req);           // alice pays against it
    fx.pay(bob, carol, 50);                         // bob transitions first
    fr state_of_request = bob.current_state().scm_prev;  // state the rcm binds
    auto res = bob.accept_payment(pkg);             // old rcm no longer opens
    CHECK(!res.ok);

    // no satisfiable completion witness exists for the stale request: the
    // relation recomputes rcm over the *current* pre-completion state, while
    // the payment commitment binds the state the request was made from
    const auto& opening = bob.current_state();
    fr blind_req = *bob.histories().internal.at(state_of_request).blind_req;
    fr scm_old = bob.current_scm();
    complete_state_instance inst;
    inst.delta_sync = fr::from_u64(fx.bank.config().delta_sync);
    inst.sk = opening.sk;
    inst.holding_limit = fr::from_u64(opening.holding_limit);
    inst.counter = fr::from_u64(opening.counter);
    inst.balance = fr::from_u64(opening.balance);
    inst.epoch = fr::from_u64(opening.epoch);
    inst.sender_epoch = fr::from_u64(pkg.pm.sender_epoch);
    inst.value = fr::from_u64(pkg.pm.value);
    inst.scm_prev_prev = opening.scm_prev;
    inst.ccm_old = opening.ccm;
    inst.ccm_new = pkg.pm.scm_new;
    inst.blind_req = blind_req;
    inst.blind_old = opening.blind;
    inst.blind_new = fr::from_u64(77);
    inst.blind_dep = fr::from_u64(78);
    inst.blind_pm = pkg.pm.blind_pm;
    inst.scm_new = state_commitment(
        inst.blind_new,
        {opening.sk, fr::from_u64(opening.holding_limit),
         fr::from_u64(opening.counter),
         fr::from_u64(opening.balance + pkg.pm.value),
         fr::from_u64(opening.epoch), scm_old, pkg.pm.scm_new});
    inst.dcm_new = commit(inst.blind_dep, {scm_old, pkg.pm.scm_new});
    // the genuine payment commitment from the message
    inst.pcm = commit(pkg.pm.blind_pm,
                      {fr::from_u64(pkg.pm.value), req.rcm, pkg.pm.scm_new,
                       fr::from_u64(pkg.pm.sender_epoch)});
    auto violated = first_violation(relation_id::complete_state, inst.to_public(),
                                    inst.to_witness());
    REQUIRE(violated.has_value());
    CHECK(*violated == "pcm recomputation");
}

TEST_CASE("synchronize advances the epoch and shortens histories") {
    protocol_fixture fx(323);
    wallet alice = fx.funded(500);
    wallet bob = fx.funded(0);
    fx.advance_epochs(2);
    alice.reconnect(fx.conn);
    std::uint32_t before = alice.last_synced_epoch();
    alice.synchronize(fx.conn);
    CHECK(alice.last_synced_epoch() == before + 2);
    CHECK(alice.balance() == 500);
    CHECK(alice.latest_signed());
    // a payment right after sync ships a one-element history
    auto pkg = fx.pay(alice, bob, 10);
    CHECK(pkg.history.size() == 1);
}

TEST_CASE("synchronize requires a signed latest state") {
    protocol_fixture fx(324);
    wallet alice = fx.funded(500);
    wallet bob = fx.funded(0);
    fx.pay(alice, bob, 10);  // latest state now unsigned
    CHECK_THROWS_AS(alice.synchronize(fx.conn), wallet_error);
}

TEST_CASE("wallet save/load round-trips and redacts nothing internally") {
    protocol_fixture fx(325);
    wallet alice = fx.funded(500);
    wallet bob = fx.funded(0);
    fx.pay(alice, bob, 100);
    bytes dump = bob.save();
    wallet restored = wallet::load(dump, fx.wcfg, fx.backend);
    CHECK(restored.balance() == bob.balance());
    CHECK(restored.current_scm() == bob.current_scm());
    CHECK(restored.id() == bob.id());
    CHECK(restored.histories().external.size() == bob.histories().external.size());
    // the restored wallet is operational
    auto result = restored.reconnect(fx.conn);
    CHECK(result.fully_signed);
}

TEST_CASE("wallet load rejects corrupt files with an offset") {
    protocol_fixture fx(326);
    wallet alice = fx.funded(10);
    bytes dump = alice.save();
    dump.resize(dump.size() / 2);
    try {
        wallet::load(dump, fx.wcfg, fx.backend);
        FAIL("truncated wallet file accepted");
    } catch (const decode_error& e) {
        CHECK(e.offset <= dump.size());
    }
}

TEST_CASE("pruning keeps everything a future payment needs") {
    protocol_fixture fx(327);
    wallet alice = fx.funded(500);
    wallet bob = fx.funded(100);
    wallet carol = fx.funded(0);
    fx.pay(alice, bob, 200);
    bob.reconnect(fx.conn);
    bob.synchronize(fx.conn);
    std::size_t before = bob.histories().external.size();
    bob.prune_history();
    CHECK(bob.histories().external.size() < before);
    // bob can still pay and carol can still verify
    auto pkg = fx.pay(bob, carol, 150);
    CHECK(carol.balance() == 150);
    CHECK(pkg.history.size() == 1);
}

TEST_CASE("payment packages never leak the sender's state openings") {
    protocol_fixture fx(328);
    wallet alice = fx.funded(500);
    wallet bob = fx.funded(100);
    wallet carol = fx.funded(0);
    fx.pay(alice, bob, 100);
    auto req = carol.make_payment_request(50);
    auto pkg = bob.create_payment(req);
    bytes wire = pkg.encode();

    auto contains = [&](const std::array<std::uint8_t, 32>& needle) {
        return std::search(wire.begin(), wire.end(), needle.begin(),
                           needle.end()) != wire.end();
    };
    for (const auto& [scm, entry] : bob.histories().internal) {
        CHECK(!contains(entry.opening.sk.to_bytes_be()));
        CHECK(!contains(entry.opening.blind.to_bytes_be()));
        CHECK(!contains(fr::from_u64(entry.opening.balance).to_bytes_be()));
    }
}
