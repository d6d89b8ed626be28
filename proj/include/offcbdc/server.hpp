#pragma once

#include <atomic>
#include <thread>

#include "offcbdc/bank.hpp"
#include "offcbdc/transport.hpp"

namespace offcbdc {

// Hosts a central_bank over the frame protocol on a TCP socket. One thread
// per connection; the bank's own locking handles concurrent requests.
class bank_server {
  public:
    // Binds immediately; port 0 picks a free port (see port()).
    bank_server(central_bank& bank, std::uint16_t port);
    ~bank_server();

    bank_server(const bank_server&) = delete;
    bank_server& operator=(const bank_server&) = delete;

    std::uint16_t port() const { return port_; }
    void stop();

    // Maps one request frame to its response frame; also used by the serve
    // loop, exposed for tests.
    static frame handle(central_bank& bank, const frame& request);

  private:
    void accept_loop();

    central_bank& bank_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::thread accept_thread_;
    std::mutex clients_mu_;
    std::vector<int> client_fds_;
    std::vector<std::thread> workers_;
};

// bank_connection over a TCP frame stream.
class remote_bank_connection final : public bank_connection {
  public:
    remote_bank_connection(const std::string& host, std::uint16_t port);
    ~remote_bank_connection();

    remote_bank_connection(const remote_bank_connection&) = delete;
    remote_bank_connection& operator=(const remote_bank_connection&) = delete;

    epoch_challenge get_epoch_challenge() override;
    std::optional<ledger_entry> query_ledger(const fr& scm) override;
    bank_response submit_enroll(const enroll_message& m) override;
    bank_response submit_sig_request(const sig_request& req) override;
    bank_response submit_sync(const sync_message& m) override;
    bank_response submit_recovery(const recovery_message& m) override;

  private:
    frame round_trip(const frame& f);

    int fd_ = -1;
};

}  // namespace offcbdc
