#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/fixture.hpp"

using namespace offcbdc;
using namespace offcbdc::testsupport;

TEST_CASE("epoch challenges are distinct and single-use") {
    protocol_fixture fx(501);
    auto c1 = fx.bank.issue_epoch_challenge();
    auto c2 = fx.bank.issue_epoch_challenge();
    CHECK(c1.challenge != c2.challenge);

    // consume c1 via an enroll, then try to reuse it
    wallet a(fx.wcfg, 1, fx.backend);
    auto m = a.make_enroll(1000, c1);
    CHECK(fx.bank.check_enroll(m).status == bank_status::ok);
    wallet b(fx.wcfg, 2, fx.backend);
    auto m2 = b.make_enroll(1000, c1);  // same challenge again
    auto r2 = fx.bank.check_enroll(m2);
    CHECK(r2.status == bank_status::rejected);
    CHECK(r2.reason == "challenge");
}

TEST_CASE("challenges expire as epochs advance") {
    protocol_fixture fx(502);
    auto c = fx.bank.issue_epoch_challenge();
    fx.advance_epochs(fx.bank.config().challenge_ttl_epochs + 1);
    wallet a(fx.wcfg, 3, fx.backend);
    auto m = a.make_enroll(1000, c);
    CHECK(fx.bank.check_enroll(m).status == bank_status::rejected);
}

TEST_CASE("holding limits above policy are rejected") {
    protocol_fixture fx(503);
    wallet a(fx.wcfg, 4, fx.backend);
    auto m = a.make_enroll(fx.bank.config().max_holding_limit + 1,
                           fx.bank.issue_epoch_challenge());
    auto r = fx.bank.check_enroll(m);
    CHECK(r.status == bank_status::rejected);
    CHECK(r.reason == "holding limit policy");
}

TEST_CASE("a forged challenge fails the enroll proof check") {
    protocol_fixture fx(504);
    wallet a(fx.wcfg, 5, fx.backend);
    auto ec = fx.bank.issue_epoch_challenge();
    auto m = a.make_enroll(1000, ec);
    m.challenge = m.challenge + fr::one();  // message no longer matches proof
    auto r = fx.bank.check_enroll(m);
    CHECK(r.status == bank_status::rejected);
    CHECK(r.reason == "enroll proof");
}

TEST_CASE("signature requests are idempotent") {
    protocol_fixture fx(505);
    wallet alice = fx.funded(500);
    wallet bob = fx.funded(0);
    fx.pay(alice, bob, 100);
    auto req = alice.create_sig_request(alice.current_scm());
    REQUIRE(req.has_value());
    auto r1 = fx.bank.process_signature_request(*req);
    REQUIRE(r1.status == bank_status::ok);
    std::size_t entries = fx.bank.ledger_snapshot().size();
    auto r2 = fx.bank.process_signature_request(*req);
    REQUIRE(r2.status == bank_status::ok);
    CHECK(*r1.sigma == *r2.sigma);
    CHECK(fx.bank.ledger_snapshot().size() == entries);
}

TEST_CASE("a tampered state proof is rejected by name") {
    protocol_fixture fx(506);
    wallet alice = fx.funded(500);
    wallet bob = fx.funded(0);
    fx.pay(alice, bob, 100);
    auto req = alice.create_sig_request(alice.current_scm());
    auto creation = std::get<creation_sig_request>(*req);
    creation.sn = creation.sn + fr::one();
    auto r = fx.bank.process_signature_request(creation);
    CHECK(r.status == bank_status::rejected);
    CHECK(r.reason == "state proof");
}

TEST_CASE("double spend: one signature, one bottom, identity recovered") {
    protocol_fixture fx(507);
    wallet alice = fx.funded(1200);
    wallet bob = fx.funded(0);
    wallet carol = fx.funded(0);

    wallet forked = alice;  // compromised device forks the state
    auto pkg_carol = fx.pay(alice, carol, 1000);
    auto req_bob = bob.make_payment_request(1000);
    auto pkg_bob = forked.create_payment(req_bob);
    CHECK(bob.accept_payment(pkg_bob).ok);  // indistinguishable offline
    bob.complete_payment(pkg_bob);

    // both branches carry the same serial number
    const auto& e1 = std::get<creation_with_dep>(
        pkg_carol.history.at(pkg_carol.pm.scm_new));
    const auto& e2 =
        std::get<creation_with_dep>(pkg_bob.history.at(pkg_bob.pm.scm_new));
    CHECK(e1.sn == e2.sn);
    CHECK(e1.scm != e2.scm);

    // bob reconnects first: the ledger is clean, he gets signatures
    auto rb = bob.reconnect(fx.conn);
    CHECK(rb.fully_signed);

    // carol reconnects second: the conflicting serial number surfaces
    auto rc = carol.reconnect(fx.conn);
    CHECK(!rc.fully_signed);
    REQUIRE(rc.recovery_scm.has_value());
    CHECK(*rc.recovery_scm == carol.current_scm());

    auto spenders = fx.bank.identify_double_spenders();
    REQUIRE(spenders.size() == 1);
    CHECK(spenders[0] == alice.id());

    // recovery signs carol's completion and records the disclosure
    auto rec = carol.state_recovery(fx.conn, *rc.recovery_scm);
    CHECK(rec.ok);
    auto audit = fx.bank.audit_snapshot();
    REQUIRE(audit.size() == 1);
    CHECK(audit[0].id == carol.id());
    CHECK(audit[0].value == 1000);
    // after recovery the ordinary path completes
    auto rc2 = carol.reconnect(fx.conn);
    CHECK(rc2.fully_signed);
}

TEST_CASE("recovery rejects a history missing the conflicting creation") {
    protocol_fixture fx(508);
    wallet alice = fx.funded(1200);
    wallet bob = fx.funded(0);
    wallet carol = fx.funded(0);
    wallet forked = alice;
    fx.pay(alice, carol, 1000);
    auto req_bob = bob.make_payment_request(1000);
    auto pkg_bob = forked.create_payment(req_bob);
    bob.complete_payment(pkg_bob);
    bob.reconnect(fx.conn);
    auto rc = carol.reconnect(fx.conn);
    REQUIRE(rc.recovery_scm.has_value());

    // hand-build the recovery message, then delete the double-spend element
    auto hist = carol.get_related_history(*rc.recovery_scm);
    fr conflicting = carol.current_state().ccm;  // alice's creation
    hist.erase(conflicting);

    const auto& opening =
        carol.histories().internal.at(*rc.recovery_scm).opening;
    const auto& rec = carol.histories().recovery.at(*rc.recovery_scm);
    recovery_instance inst;
    inst.bank_key = fx.bank.key();
    inst.id = carol.id();
    inst.value = fr::from_u64(rec.value);
    inst.scm = *rc.recovery_scm;
    inst.pcm = *carol.histories().external.at(*rc.recovery_scm).pcm;
    inst.sk = opening.sk;
    inst.holding_limit = fr::from_u64(opening.holding_limit);
    inst.counter = fr::from_u64(opening.counter);
    inst.balance = fr::from_u64(opening.balance);
    inst.epoch = fr::from_u64(opening.epoch);
    inst.sender_epoch = fr::from_u64(rec.sender_epoch);
    inst.scm_prev = opening.scm_prev;
    inst.ccm = opening.ccm;
    inst.blind_state = opening.blind;
    inst.blind_req =
        *carol.histories().internal.at(opening.scm_prev).blind_req;
    inst.blind_pm = rec.blind_pm;
    inst.sigma_prev =
        *carol.histories().external.at(opening.scm_prev).sigma;
    auto zkp = fx.backend->prove(relation_id::recovery, inst.to_public(),
                                 inst.to_witness());

    recovery_message msg{*rc.recovery_scm, carol.id(), rec.value, zkp, hist};
    auto resp = fx.bank.process_state_recovery(msg);
    CHECK(resp.status == bank_status::rejected);
    CHECK(resp.reason == "incomplete related history");
}

TEST_CASE("recovery on a creation state is refused locally") {
    protocol_fixture fx(509);
    wallet alice = fx.funded(500);
    wallet bob = fx.funded(0);
    fx.pay(alice, bob, 100);
    auto res = alice.state_recovery(fx.conn, alice.current_scm());
    CHECK(!res.ok);
    CHECK(res.reason == "not a completion");
}

TEST_CASE("double-spend algebra recovers the exact id on random instances") {
    rng r(510);
    for (int i = 0; i < 200; ++i) {
        fr sk = r.next_fr();
        fr ctr = r.next_fr();
        fr scm1 = r.next_fr();
        fr scm2 = r.next_fr();
        if (scm1 == scm2) continue;
        fr t = prf_ds(sk, ctr);
        fr ds1 = prf_id(sk) + scm1 * t;
        fr ds2 = prf_id(sk) + scm2 * t;
        fr solved_t = (ds1 - ds2) * (scm1 - scm2).inverse();
        fr id = ds1 - scm1 * solved_t;
        CHECK(id == prf_id(sk));
    }
}

TEST_CASE("a clean ledger names no double spenders") {
    protocol_fixture fx(511);
    wallet alice = fx.funded(500);
    wallet bob = fx.funded(0);
    fx.pay(alice, bob, 100);
    alice.reconnect(fx.conn);
    bob.reconnect(fx.conn);
    CHECK(fx.bank.identify_double_spenders().empty());
}

TEST_CASE("sync: happy path, challenge replay, and idempotence") {
    protocol_fixture fx(512);
    wallet alice = fx.funded(500);
    fx.advance_epochs(1);
    alice.synchronize(fx.conn);
    CHECK(alice.latest_signed());

    // replaying the same sync message returns the same signature
    // (reconstruct the message by asking the ledger)
    auto entry = fx.bank.query_ledger(alice.current_scm());
    REQUIRE(entry.has_value());
    REQUIRE(entry->sigma.has_value());

    // a consumed challenge cannot be used for another sync
    wallet mallory = fx.funded(100);
    auto ec = fx.bank.issue_epoch_challenge();
    // first use succeeds through the wallet path with its own challenge; now
    // force a message that reuses it
    sync_message replay;
    {
        // craft an honest sync message for mallory with challenge ec
        const auto& opening = mallory.current_state();
        state_opening next = opening;
        next.epoch = ec.epoch;
        next.scm_prev = mallory.current_scm();
        next.ccm = ec.challenge;
        next.blind = fr::from_u64(424242);
        sync_instance inst;
        inst.bank_key = fx.bank.key();
        inst.scm_new = next.commitment();
        inst.epoch = fr::from_u64(ec.epoch);
        inst.challenge = ec.challenge;
        inst.sk = opening.sk;
        inst.holding_limit = fr::from_u64(opening.holding_limit);
        inst.counter = fr::from_u64(opening.counter);
        inst.balance = fr::from_u64(opening.balance);
        inst.epoch_old = fr::from_u64(opening.epoch);
        inst.scm_prev_prev = opening.scm_prev;
        inst.ccm_old = opening.ccm;
        inst.blind_old = opening.blind;
        inst.blind_new = next.blind;
        inst.sigma_prev =
            *mallory.histories().external.at(mallory.current_scm()).sigma;
        auto zkp = fx.backend->prove(relation_id::sync, inst.to_public(),
                                     inst.to_witness());
        replay = {inst.scm_new.is_zero() ? fr::zero() : next.commitment(),
                  ec.epoch, ec.challenge, zkp};
    }
    auto r1 = fx.bank.process_sync_request(replay);
    CHECK(r1.status == bank_status::ok);
    auto r2 = fx.bank.process_sync_request(replay);  // replay: idempotent
    CHECK(r2.status == bank_status::ok);
    CHECK(*r1.sigma == *r2.sigma);

    // same challenge, different state: rejected as consumed
    wallet other = fx.funded(100);
    const auto& op2 = other.current_state();
    state_opening next2 = op2;
    next2.epoch = ec.epoch;
    next2.scm_prev = other.current_scm();
    next2.ccm = ec.challenge;
    next2.blind = fr::from_u64(99);
    sync_instance inst2;
    inst2.bank_key = fx.bank.key();
    inst2.scm_new = next2.commitment();
    inst2.epoch = fr::from_u64(ec.epoch);
    inst2.challenge = ec.challenge;
    inst2.sk = op2.sk;
    inst2.holding_limit = fr::from_u64(op2.holding_limit);
    inst2.counter = fr::from_u64(op2.counter);
    inst2.balance = fr::from_u64(op2.balance);
    inst2.epoch_old = fr::from_u64(op2.epoch);
    inst2.scm_prev_prev = op2.scm_prev;
    inst2.ccm_old = op2.ccm;
    inst2.blind_old = op2.blind;
    inst2.blind_new = next2.blind;
    inst2.sigma_prev = *other.histories().external.at(other.current_scm()).sigma;
    auto zkp2 = fx.backend->prove(relation_id::sync, inst2.to_public(),
                                  inst2.to_witness());
    auto r3 = fx.bank.process_sync_request(
        {next2.commitment(), ec.epoch, ec.challenge, zkp2});
    CHECK(r3.status == bank_status::rejected);
    CHECK(r3.reason == "challenge");
}

TEST_CASE("ledger queries distinguish absent, unsigned, and signed") {
    protocol_fixture fx(513);
    wallet alice = fx.funded(500);
    wallet bob = fx.funded(0);
    fx.pay(alice, bob, 100);
    CHECK(!fx.bank.query_ledger(fr::from_u64(12345)).has_value());
    auto entry = fx.bank.query_ledger(alice.current_scm());
    CHECK(!entry.has_value());  // unsigned states are not on the ledger yet
    alice.reconnect(fx.conn);
    entry = fx.bank.query_ledger(alice.current_scm());
    REQUIRE(entry.has_value());
    CHECK(entry->sigma.has_value());
    CHECK(entry->sn.has_value());  // creation entries carry sn and ds
    CHECK(entry->ds.has_value());
}

TEST_CASE("role-shifted recovery: the second recipient reconnects normally") {
    // after the first counterfeit recipient recovers, a later recipient in
    // the same chain gets signatures through the ordinary path
    protocol_fixture fx(514);
    wallet alice = fx.funded(1200);
    wallet bob = fx.funded(0);
    wallet carol = fx.funded(0);
    wallet david = fx.funded(0);

    wallet forked = alice;
    fx.pay(alice, bob, 1000);             // branch 1: alice -> bob
    auto req = carol.make_payment_request(1000);
    auto pkg = forked.create_payment(req);  // branch 2: same sn, to carol
    carol.complete_payment(pkg);
    fx.pay(carol, david, 500);            // counterfeit propagates

    bob.reconnect(fx.conn);               // branch 1 wins the ledger race

    auto rc = carol.reconnect(fx.conn);   // carol must recover
    REQUIRE(rc.recovery_scm.has_value());
    CHECK(carol.state_recovery(fx.conn, *rc.recovery_scm).ok);
    CHECK(carol.reconnect(fx.conn).fully_signed);

    // david's dependency (carol's chain) is now signed: ordinary path
    auto rd = david.reconnect(fx.conn);
    CHECK(rd.fully_signed);
    auto audit = fx.bank.audit_snapshot();
    REQUIRE(audit.size() == 1);  // only carol disclosed herself
    CHECK(audit[0].id == carol.id());
}

TEST_CASE("fuzzed mutations of valid requests never earn a signature") {
    // protocol-level adversary: takes honest requests and perturbs one field;
    // the service must reject every mutated request
    protocol_fixture fx(515);
    rng r(515);
    std::size_t rejected = 0, trials = 0;
    for (int round = 0; round < 20; ++round) {
        wallet alice = fx.funded(100);
        wallet bob = fx.enrolled(3000);
        auto req = bob.make_payment_request(30);
        auto pkg = alice.create_payment(req);
        bob.complete_payment(pkg);
        auto creation =
            std::get<creation_sig_request>(*alice.create_sig_request(alice.current_scm()));

        for (int m = 0; m < 5; ++m) {
            auto mutated = creation;
            switch (r.next_below(6)) {
                case 0: mutated.scm += fr::one(); break;
                case 1: mutated.dcm += fr::one(); break;
                case 2: mutated.sn += fr::one(); break;
                case 3: mutated.ds += fr::one(); break;
                case 4:
                    mutated.zkp_state.pub.slots[r.next_below(4)] += fr::one();
                    break;
                default:
                    mutated.zkp_dep.proof[r.next_below(
                        mutated.zkp_dep.proof.size())] ^= 0x01;
                    break;
            }
            ++trials;
            auto resp = fx.bank.process_signature_request(mutated);
            if (resp.status == bank_status::rejected) ++rejected;
        }
        // the unmutated request still succeeds afterwards
        CHECK(fx.bank.process_signature_request(creation).status ==
              bank_status::ok);
    }
    CHECK(rejected == trials);
}
