#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <thread>

#include "offcbdc/bank.hpp"
#include "offcbdc/server.hpp"
#include "offcbdc/sim.hpp"
#include "offcbdc/wallet.hpp"

using namespace offcbdc;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_verification = 3;
constexpr int exit_io = 4;

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// Wraps a backend and accumulates per-relation prove/verify timings.
class timing_backend final : public proof_backend {
  public:
    explicit timing_backend(std::shared_ptr<const proof_backend> inner)
        : inner_(std::move(inner)) {}

    std::string_view name() const override { return inner_->name(); }

    proof_bundle prove(relation_id rel, const public_inputs& pub,
                       const witness& wit) const override {
        auto t0 = clock_type::now();
        auto out = inner_->prove(rel, pub, wit);
        auto& s = stats_[static_cast<std::size_t>(rel)];
        s.prove_seconds += seconds_since(t0);
        s.proves += 1;
        return out;
    }

    bool verify(const proof_bundle& bundle) const override {
        auto t0 = clock_type::now();
        bool ok = inner_->verify(bundle);
        auto& s = stats_[static_cast<std::size_t>(bundle.rel)];
        s.verify_seconds += seconds_since(t0);
        s.verifies += 1;
        return ok;
    }

    struct relation_stats {
        double prove_seconds = 0, verify_seconds = 0;
        std::size_t proves = 0, verifies = 0;
    };
    const relation_stats& stats(relation_id rel) const {
        return stats_[static_cast<std::size_t>(rel)];
    }

  private:
    std::shared_ptr<const proof_backend> inner_;
    mutable std::array<relation_stats, relation_count> stats_{};
};

std::string short_hex(const fr& v) { return v.to_hex().substr(0, 16); }

// Times only the service-side processing of each submitted request.
class timing_connection final : public bank_connection {
  public:
    explicit timing_connection(central_bank& bank) : bank_(bank) {}

    epoch_challenge get_epoch_challenge() override {
        return bank_.issue_epoch_challenge();
    }
    std::optional<ledger_entry> query_ledger(const fr& scm) override {
        return bank_.query_ledger(scm);
    }
    bank_response submit_enroll(const enroll_message& m) override {
        return timed(enroll_s, [&] { return bank_.check_enroll(m); });
    }
    bank_response submit_sig_request(const sig_request& req) override {
        return timed(sig_s, [&] { return bank_.process_signature_request(req); });
    }
    bank_response submit_sync(const sync_message& m) override {
        return timed(sync_s, [&] { return bank_.process_sync_request(m); });
    }
    bank_response submit_recovery(const recovery_message& m) override {
        return timed(recovery_s, [&] { return bank_.process_state_recovery(m); });
    }

    double enroll_s = 0, sig_s = 0, sync_s = 0, recovery_s = 0;

  private:
    template <class F>
    bank_response timed(double& bucket, F&& f) {
        auto t0 = clock_type::now();
        bank_response r = f();
        bucket += seconds_since(t0);
        return r;
    }

    central_bank& bank_;
};

int run_serve(const std::string& backend_name, std::uint64_t seed,
              const std::string& keys_dir, const std::string& ledger_path,
              std::uint32_t epoch_seconds, std::uint32_t delta_sync,
              std::uint64_t max_holding, std::uint16_t port) {
    bank_config cfg;
    cfg.epoch_seconds = epoch_seconds;
    cfg.delta_sync = delta_sync;
    cfg.max_holding_limit = max_holding;
    cfg.ledger_path = ledger_path;
    if (!ledger_path.empty()) {
        cfg.registry_path = ledger_path + ".registry";
        cfg.audit_path = ledger_path + ".audit";
    }
    auto backend = make_backend(backend_name, seed, keys_dir);
    central_bank bank(cfg, std::move(backend), seed);
    bank_server server(bank, port);
    std::cout << "settlement service listening on 127.0.0.1:" << server.port()
              << "\n"
              << "  backend=" << backend_name << " seed=" << seed
              << " epoch-seconds=" << epoch_seconds
              << " delta-sync=" << delta_sync << " max-holding=" << max_holding
              << "\n"
              << "  ledger=" << (ledger_path.empty() ? "(memory)" : ledger_path)
              << "\n"
              << std::flush;
    for (;;) std::this_thread::sleep_for(std::chrono::seconds(3600));
}

int run_scenario_cmd(const std::string& scenario_path, bool demo,
                     const std::string& backend_name, std::uint64_t seed,
                     const std::string& keys_dir, double bitrate,
                     const std::string& out_dir,
                     const std::string& ledger_path) {
    scenario s;
    if (demo) {
        s = counterfeit_scenario();
    } else {
        std::ifstream f(scenario_path);
        if (!f) {
            std::cerr << "cannot open scenario file " << scenario_path << "\n";
            return exit_io;
        }
        std::string text((std::istreambuf_iterator<char>(f)),
                         std::istreambuf_iterator<char>());
        try {
            s = scenario::from_json_text(text);
        } catch (const std::exception& e) {
            std::cerr << "scenario parse error: " << e.what() << "\n";
            return exit_config;
        }
    }
    if (seed != 0) s.seed = seed;

    std::shared_ptr<const proof_backend> backend =
        make_backend(backend_name, s.seed, keys_dir);
    bank_config overrides;
    if (!ledger_path.empty()) {
        auto parent = std::filesystem::path(ledger_path).parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        overrides.ledger_path = ledger_path;
        overrides.registry_path = ledger_path + ".registry";
        overrides.audit_path = ledger_path + ".audit";
    }
    simulator sim(s, backend, overrides);
    if (bitrate > 0) sim.set_proximity_bitrate(bitrate);

    std::cout << "# effective scenario\n" << s.to_json_text() << "\n\n";
    auto result = sim.run();
    std::cout << "# trace\n" << result.trace_text() << "\n";
    std::cout << "# metrics\n" << result.metrics.deterministic_text() << "\n";
    std::cout << "# settlement summary\n";
    std::cout << "double spenders identified: " << result.double_spenders.size();
    for (const auto& id : result.double_spenders)
        std::cout << " " << short_hex(id);
    std::cout << "\nrecovery disclosures: " << result.audit.size() << "\n";
    for (const auto& rec : result.audit)
        std::cout << "  id=" << short_hex(rec.id) << " value=" << rec.value
                  << "\n";
    std::cout << "final balances:\n";
    for (const auto& [name, bal] : result.final_balances)
        std::cout << "  " << name << " " << bal << "\n";

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream(out_dir + "/scenario.json") << s.to_json_text();
        std::ofstream(out_dir + "/trace.txt") << result.trace_text();
        std::ofstream(out_dir + "/metrics.txt")
            << result.metrics.deterministic_text();
        for (const auto& a : s.actors) {
            bytes dump = sim.actor_wallet(a.name).save();
            std::ofstream wf(out_dir + "/" + a.name + ".wallet",
                             std::ios::binary);
            wf.write(reinterpret_cast<const char*>(dump.data()),
                     static_cast<std::streamsize>(dump.size()));
        }
    }
    return result.assertions_ok ? exit_ok : exit_verification;
}

struct bench_world {
    std::shared_ptr<timing_backend> backend;
    std::unique_ptr<central_bank> bank;
    std::unique_ptr<wallet> treasury;
    wallet_config wcfg;
    std::uint64_t next_seed = 100;

    bench_world(const std::string& backend_name, std::uint64_t seed,
                const std::string& keys_dir) {
        backend = std::make_shared<timing_backend>(
            make_backend(backend_name, seed, keys_dir));
        bank_config cfg;
        cfg.max_holding_limit = 1'000'000'000;
        bank = std::make_unique<central_bank>(cfg, backend, seed);
        wcfg = wallet_config{bank->key(), cfg.delta_sync};
        treasury = std::make_unique<wallet>(wcfg, 1, backend);
        fr scm = treasury->make_issued_state(1'000'000'000'000ULL, 0);
        treasury->complete_enroll(*bank->issue_funded_state(scm).sigma);
    }

    wallet enrolled(std::uint64_t holding = 1'000'000) {
        wallet w(wcfg, next_seed++, backend);
        auto m = w.make_enroll(holding, bank->issue_epoch_challenge());
        auto r = bank->check_enroll(m);
        w.complete_enroll(*r.sigma);
        return w;
    }

    wallet funded(std::uint64_t balance) {
        wallet w = enrolled();
        auto req = w.make_payment_request(balance);
        auto pkg = treasury->create_payment(req);
        w.complete_payment(pkg);
        local_bank_connection conn(*bank);
        w.reconnect(conn);
        w.synchronize(conn);
        return w;
    }
};

int run_bench(const std::string& backend_name, std::uint64_t seed,
              const std::string& keys_dir, std::size_t payments) {
    std::cout << "backend: " << backend_name << ", payments: " << payments
              << ", seed: " << seed << "\n\n";
    if (payments == 0) {
        std::cout << "nothing to measure\n";
        return exit_ok;
    }
    bench_world world(backend_name, seed, keys_dir);

    // wallet-side offline payment timings
    double create_s = 0, accept_s = 0, complete_s = 0;
    std::size_t wallet_samples = std::min<std::size_t>(payments, 50);
    {
        wallet alice = world.funded(10 * wallet_samples);
        wallet bob = world.funded(0);
        for (std::size_t i = 0; i < wallet_samples; ++i) {
            auto req = bob.make_payment_request(10);
            auto t0 = clock_type::now();
            auto pkg = alice.create_payment(req);
            create_s += seconds_since(t0);
            t0 = clock_type::now();
            auto acc = bob.accept_payment(pkg);
            accept_s += seconds_since(t0);
            if (!acc.ok) return exit_verification;
            t0 = clock_type::now();
            bob.complete_payment(pkg);
            complete_s += seconds_since(t0);
        }
    }

    // capture creation+completion request pairs for the throughput replay
    struct pair_req {
        sig_request creation;
        sig_request completion;
    };
    std::vector<pair_req> captured;
    double enroll_s = 0, sync_s = 0, recovery_s = 0;
    std::size_t enroll_n = 0, sync_n = 0, recovery_n = 0;
    for (std::size_t i = 0; i < payments; ++i) {
        wallet alice = world.funded(100);
        wallet bob = world.enrolled();
        auto req = bob.make_payment_request(25);
        auto pkg = alice.create_payment(req);
        bob.complete_payment(pkg);
        auto creation_req = alice.create_sig_request(alice.current_scm());
        auto r = world.bank->process_signature_request(*creation_req);
        if (r.status != bank_status::ok) return exit_verification;
        local_bank_connection conn(*world.bank);
        bob.reconnect(conn);
        auto completion_req = bob.create_sig_request(bob.current_scm());
        if (!completion_req) continue;
        captured.push_back({*creation_req, *completion_req});
    }
    for (int i = 0; i < 20; ++i) {
        wallet w(world.wcfg, world.next_seed++, world.backend);
        auto ec = world.bank->issue_epoch_challenge();
        auto m = w.make_enroll(1000, ec);
        auto t0 = clock_type::now();
        auto r = world.bank->check_enroll(m);
        enroll_s += seconds_since(t0);
        enroll_n += 1;
        if (r.status != bank_status::ok) return exit_verification;
        w.complete_enroll(*r.sigma);
    }
    for (int i = 0; i < 20; ++i) {
        wallet w = world.funded(10);
        timing_connection conn(*world.bank);
        w.synchronize(conn);
        sync_s += conn.sync_s;
        sync_n += 1;
    }
    for (int i = 0; i < 10; ++i) {
        wallet mallory = world.funded(100);
        wallet victim1 = world.enrolled();
        wallet victim2 = world.enrolled();
        auto r1 = victim1.make_payment_request(100);
        auto r2 = victim2.make_payment_request(100);
        auto forked = fork_state(mallory, r1, r2);
        victim1.complete_payment(forked.first);
        victim2.complete_payment(forked.second);
        local_bank_connection plain(*world.bank);
        victim1.reconnect(plain);
        auto rc = victim2.reconnect(plain);
        if (!rc.recovery_scm) continue;
        timing_connection conn(*world.bank);
        auto rec = victim2.state_recovery(conn, *rc.recovery_scm);
        recovery_s += conn.recovery_s;
        recovery_n += 1;
        if (!rec.ok) return exit_verification;
    }

    // sequential settlement throughput: replay captured pairs against a
    // fresh service with the same signing key
    double replay_s = 0;
    std::size_t processed = 0;
    {
        bank_config cfg;
        cfg.max_holding_limit = 1'000'000'000;
        central_bank fresh(cfg, world.backend, seed);
        auto t0 = clock_type::now();
        for (const auto& pr : captured) {
            auto r1 = fresh.process_signature_request(pr.creation);
            auto r2 = fresh.process_signature_request(pr.completion);
            if (r1.status != bank_status::ok || r2.status != bank_status::ok)
                return exit_verification;
            ++processed;
        }
        replay_s = seconds_since(t0);
    }

    auto row = [](const std::string& label, double total, std::size_t n,
                  const char* reference) {
        std::cout << "  " << std::left << std::setw(38) << label << std::right
                  << std::setw(12) << std::fixed << std::setprecision(6)
                  << (n ? total / double(n) : 0.0) << std::setw(18) << reference
                  << "\n";
    };

    std::cout << "offline payment (wallet side, seconds per op)\n";
    std::cout << "  " << std::left << std::setw(38) << "operation" << std::right
              << std::setw(12) << "this build" << std::setw(18) << "reference"
              << "\n";
    row("create payment", create_s, wallet_samples, "0.2097");
    row("accept payment", accept_s, wallet_samples, "0.0040");
    row("complete payment", complete_s, wallet_samples, "0.0917");
    std::cout << "\nsettlement service (seconds per request)\n";
    std::cout << "  " << std::left << std::setw(38) << "operation" << std::right
              << std::setw(12) << "this build" << std::setw(18) << "reference"
              << "\n";
    row("enrollment", enroll_s, enroll_n, "0.0016");
    row("creation + completion pair", replay_s, processed, "0.0070");
    row("synchronization", sync_s, sync_n, "0.0017");
    row("state recovery", recovery_s, recovery_n, "0.0017");

    std::cout << "\nper-relation proof timings (seconds per call)\n";
    static const char* reference_gen_verify[relation_count] = {
        "0.0239 / 0.0012", "0.0552 / 0.0013", "0.0741 / 0.0013",
        "0.0512 / 0.0013", "0.0795 / 0.0013", "0.0906 / 0.0014",
        "0.0857 / 0.0014", "0.0828 / 0.0014"};
    std::cout << "  " << std::left << std::setw(18) << "relation"
              << std::setw(14) << "prove" << std::setw(14) << "verify"
              << "reference prove / verify\n";
    for (int i = 0; i < relation_count; ++i) {
        auto rel = static_cast<relation_id>(i);
        const auto& s = world.backend->stats(rel);
        std::cout << "  " << std::left << std::setw(18) << relation_name(rel)
                  << std::setw(14) << std::fixed << std::setprecision(6)
                  << (s.proves ? s.prove_seconds / double(s.proves) : 0.0)
                  << std::setw(14)
                  << (s.verifies ? s.verify_seconds / double(s.verifies) : 0.0)
                  << reference_gen_verify[i] << "\n";
    }
    double throughput = processed ? double(processed) / replay_s : 0.0;
    std::cout << "\nsequential settlement throughput: " << std::fixed
              << std::setprecision(1) << throughput
              << " payments/second (creation+completion pairs)\n";
    std::cout << "reference prototype: 143 payments/second sequential\n";
    std::cout << "\nreference figures are from the original research prototype "
                 "(Go, Groth16/BN254)\non different hardware; printed for "
                 "context only, never asserted as equalities.\n";
    return exit_ok;
}

int inspect_ledger(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        std::cerr << "cannot open " << path << "\n";
        return exit_io;
    }
    bytes data((std::istreambuf_iterator<char>(f)),
               std::istreambuf_iterator<char>());
    std::vector<ledger_entry> entries;
    std::map<fr, std::size_t, fr_raw_less> by_scm;
    try {
        byte_reader r(data);
        while (!r.done()) {
            bytes rec = r.var_bytes();
            byte_reader rr(rec);
            ledger_entry e = ledger_entry::decode(rr);
            auto it = by_scm.find(e.scm);
            if (it == by_scm.end()) {
                by_scm[e.scm] = entries.size();
                entries.push_back(e);
            } else if (e.sigma) {
                entries[it->second].sigma = e.sigma;
            }
        }
    } catch (const decode_error& e) {
        std::cerr << "corrupt ledger file: " << e.what() << "\n";
        return exit_io;
    }
    std::map<fr, std::vector<std::size_t>, fr_raw_less> by_sn;
    std::cout << std::left << std::setw(6) << "#" << std::setw(12) << "kind"
              << std::setw(18) << "sn" << std::setw(18) << "scm" << "signed\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.sn) by_sn[*e.sn].push_back(i);
        std::cout << std::left << std::setw(6) << i << std::setw(12)
                  << (e.sn ? "creation" : "other") << std::setw(18)
                  << (e.sn ? short_hex(*e.sn) : std::string("-"))
                  << std::setw(18) << short_hex(e.scm)
                  << (e.sigma ? "yes" : "no") << "\n";
    }
    bool conflict = false;
    for (const auto& [sn, rows] : by_sn) {
        if (rows.size() < 2) continue;
        conflict = true;
        std::cout << "DOUBLE SPEND: sn " << short_hex(sn)
                  << " shared by entries";
        for (auto i : rows) std::cout << " " << i;
        std::cout << "\n";
    }
    std::cout << entries.size() << " entries"
              << (conflict ? ", conflicts found" : ", no conflicts") << "\n";
    return exit_ok;
}

int inspect_wallet(const std::string& path, bool reveal) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        std::cerr << "cannot open " << path << "\n";
        return exit_io;
    }
    bytes data((std::istreambuf_iterator<char>(f)),
               std::istreambuf_iterator<char>());
    try {
        auto backend = std::make_shared<mock_backend>(0);
        wallet w = wallet::load(data, wallet_config{}, backend);
        std::cout << "wallet file: " << path << "\n";
        std::cout << "enrolled: " << (w.enrolled() ? "yes" : "no") << "\n";
        std::cout << "chain length: " << w.histories().internal.size() << "\n";
        std::cout << "known states: " << w.histories().external.size() << "\n";
        std::cout << "unsigned states: " << w.unsigned_history_size() << "\n";
        std::cout << "current state: " << short_hex(w.current_scm()) << "\n";
        std::cout << "latest signed: " << (w.latest_signed() ? "yes" : "no")
                  << "\n";
        if (reveal) {
            std::cout << "-- secrets --\n";
            std::cout << "id: " << w.id().to_hex() << "\n";
            std::cout << "balance: " << w.balance() << "\n";
            std::cout << "holding limit: " << w.holding_limit() << "\n";
            std::cout << "counter: " << w.current_state().counter << "\n";
            std::cout << "epoch: " << w.last_synced_epoch() << "\n";
        } else {
            std::cout << "(balance and keys redacted; pass --reveal to print)\n";
        }
        return exit_ok;
    } catch (const decode_error& e) {
        std::cerr << "corrupt wallet file: " << e.what() << "\n";
        return exit_io;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"offline CBDC settlement service, scenario runner, and tools"};
    app.require_subcommand(1);

    std::string backend_name = "mock";
    std::uint64_t seed = 1;
    std::string keys_dir = "keys";
    app.add_option("--backend", backend_name, "proof backend: mock or snark")
        ->check(CLI::IsMember({"mock", "snark"}));
    auto* seed_opt = app.add_option("--seed", seed, "deterministic seed");
    app.add_option("--keys", keys_dir, "key directory for the snark backend");

    auto* serve = app.add_subcommand("serve", "run the settlement service");
    std::string ledger_path;
    std::uint32_t epoch_seconds = 86400, delta_sync = 30;
    std::uint64_t max_holding = 3000;
    std::uint16_t port = 0;
    serve->add_option("--ledger-path", ledger_path, "append-only ledger file");
    serve->add_option("--epoch-seconds", epoch_seconds, "epoch length");
    serve->add_option("--delta-sync", delta_sync,
                      "max epochs between synchronizations");
    serve->add_option("--max-holding", max_holding, "holding limit policy cap");
    serve->add_option("--port", port, "TCP port (0 = pick)");

    auto* scen = app.add_subcommand("scenario", "run a scripted scenario");
    std::string scenario_path, out_dir;
    bool demo = false;
    double bitrate = 0;
    std::string scen_ledger_path;
    scen->add_option("--scenario", scenario_path, "scenario JSON file");
    scen->add_flag("--demo", demo, "run the built-in double-spend storyline");
    scen->add_option("--out", out_dir, "write trace and metrics here");
    scen->add_option("--bitrate", bitrate, "proximity channel bits/second");
    scen->add_option("--ledger-path", scen_ledger_path,
                     "persist the service ledger here");

    auto* bench = app.add_subcommand("bench", "measure operation latencies");
    std::size_t payments = 200;
    bench->add_option("--payments", payments, "settlement pairs to process");

    auto* inspect = app.add_subcommand("inspect", "dump ledger or wallet files");
    std::string inspect_ledger_path, inspect_wallet_path;
    bool reveal = false;
    inspect->add_option("--ledger-path", inspect_ledger_path, "ledger file");
    inspect->add_option("--wallet-path", inspect_wallet_path, "wallet file");
    inspect->add_flag("--reveal", reveal, "print wallet secrets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (serve->parsed()) {
            return run_serve(backend_name, seed, keys_dir, ledger_path,
                             epoch_seconds, delta_sync, max_holding, port);
        }
        if (scen->parsed()) {
            if (scenario_path.empty() && !demo) {
                std::cerr << "scenario: pass --scenario <file> or --demo\n";
                return exit_config;
            }
            return run_scenario_cmd(scenario_path, demo, backend_name,
                                    seed_opt->count() ? seed : 0, keys_dir,
                                    bitrate, out_dir, scen_ledger_path);
        }
        if (bench->parsed()) {
            return run_bench(backend_name, seed, keys_dir, payments);
        }
        if (inspect->parsed()) {
            if (!inspect_ledger_path.empty())
                return inspect_ledger(inspect_ledger_path);
            if (!inspect_wallet_path.empty())
                return inspect_wallet(inspect_wallet_path, reveal);
            std::cerr << "inspect: pass --ledger-path or --wallet-path\n";
            return exit_config;
        }
    } catch (const unsatisfied_witness& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return exit_verification;
    } catch (const decode_error& e) {
        std::cerr << "malformed input: " << e.what() << "\n";
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config;
    }
    return exit_config;
}
