#include "offcbdc/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

namespace offcbdc {

namespace {

bool read_exact(int fd, std::uint8_t* buf, std::size_t n) {
    std::size_t got = 0;
    while (got < n) {
        ssize_t k = ::recv(fd, buf + got, n - got, 0);
        if (k <= 0) return false;
        got += static_cast<std::size_t>(k);
    }
    return true;
}

bool write_all(int fd, const std::uint8_t* buf, std::size_t n) {
    std::size_t sent = 0;
    while (sent < n) {
        ssize_t k = ::send(fd, buf + sent, n - sent, MSG_NOSIGNAL);
        if (k <= 0) return false;
        sent += static_cast<std::size_t>(k);
    }
    return true;
}

// Frames arrive as tag byte + u32 length + payload.
std::optional<frame> read_frame_fd(int fd) {
    std::uint8_t header[5];
    if (!read_exact(fd, header, 5)) return std::nullopt;
    std::uint32_t len = (std::uint32_t(header[1]) << 24) |
                        (std::uint32_t(header[2]) << 16) |
                        (std::uint32_t(header[3]) << 8) | header[4];
    if (len > (1u << 26)) return std::nullopt;
    bytes payload(len);
    if (len > 0 && !read_exact(fd, payload.data(), len)) return std::nullopt;
    bytes full;
    full.reserve(5 + len);
    full.insert(full.end(), header, header + 5);
    full.insert(full.end(), payload.begin(), payload.end());
    byte_reader r(full);
    try {
        return decode_frame(r);
    } catch (const decode_error&) {
        return std::nullopt;
    }
}

bool write_frame_fd(int fd, const frame& f) {
    bytes enc = encode_frame(f);
    return write_all(fd, enc.data(), enc.size());
}

frame bank_frame(const bank_response& resp) {
    return {frame_type::resp_bank, resp.encode()};
}

}  // namespace

frame bank_server::handle(central_bank& bank, const frame& request) {
    try {
        byte_reader r(request.payload);
        switch (request.type) {
            case frame_type::get_epoch_challenge: {
                auto ec = bank.issue_epoch_challenge();
                byte_writer w;
                w.u32(ec.epoch);
                write_fr(w, ec.challenge);
                return {frame_type::resp_challenge, w.take()};
            }
            case frame_type::enroll:
                return bank_frame(bank.check_enroll(enroll_message::decode(r)));
            case frame_type::sig_request_create:
            case frame_type::sig_request_complete:
                return bank_frame(
                    bank.process_signature_request(decode_sig_request(r)));
            case frame_type::sync:
                return bank_frame(bank.process_sync_request(sync_message::decode(r)));
            case frame_type::recover:
                return bank_frame(
                    bank.process_state_recovery(recovery_message::decode(r)));
            case frame_type::query_ledger: {
                fr scm = read_fr(r);
                auto entry = bank.query_ledger(scm);
                if (!entry) return {frame_type::resp_ledger_absent, {}};
                return {frame_type::resp_ledger_entry, entry->encode()};
            }
            default:
                break;
        }
    } catch (const std::exception& e) {
        const auto* what = e.what();
        return {frame_type::resp_error,
                bytes(what, what + std::strlen(what))};
    }
    return {frame_type::resp_error, bytes{'b', 'a', 'd', ' ', 't', 'a', 'g'}};
}

bank_server::bank_server(central_bank& bank, std::uint16_t port) : bank_(bank) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error("socket() failed");
    int yes = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(listen_fd_);
        throw std::runtime_error("bind() failed");
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    if (::listen(listen_fd_, 64) != 0) {
        ::close(listen_fd_);
        throw std::runtime_error("listen() failed");
    }
    accept_thread_ = std::thread([this] { accept_loop(); });
}

void bank_server::accept_loop() {
    while (!stopping_.load()) {
        int client = ::accept(listen_fd_, nullptr, nullptr);
        if (client < 0) {
            if (stopping_.load()) break;
            continue;
        }
        std::lock_guard lock(clients_mu_);
        if (stopping_.load()) {
            ::close(client);
            break;
        }
        client_fds_.push_back(client);
        workers_.emplace_back([this, client] {
            while (!stopping_.load()) {
                auto req = read_frame_fd(client);
                if (!req) break;
                frame resp = handle(bank_, *req);
                if (!write_frame_fd(client, resp)) break;
            }
            ::close(client);
        });
    }
}

void bank_server::stop() {
    bool expected = false;
    if (!stopping_.compare_exchange_strong(expected, true)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    {
        // unblock workers stuck in recv on open client connections
        std::lock_guard lock(clients_mu_);
        for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    for (auto& t : workers_)
        if (t.joinable()) t.join();
}

bank_server::~bank_server() { stop(); }

remote_bank_connection::remote_bank_connection(const std::string& host,
                                               std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw std::runtime_error("socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        throw std::runtime_error("bad host address " + host);
    }
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd_);
        throw std::runtime_error("connect() failed");
    }
}

remote_bank_connection::~remote_bank_connection() {
    if (fd_ >= 0) ::close(fd_);
}

frame remote_bank_connection::round_trip(const frame& f) {
    if (!write_frame_fd(fd_, f)) throw std::runtime_error("send failed");
    auto resp = read_frame_fd(fd_);
    if (!resp) throw std::runtime_error("connection closed");
    if (resp->type == frame_type::resp_error)
        throw std::runtime_error("service error: " +
                                 std::string(resp->payload.begin(),
                                             resp->payload.end()));
    return *resp;
}

epoch_challenge remote_bank_connection::get_epoch_challenge() {
    frame resp = round_trip({frame_type::get_epoch_challenge, {}});
    byte_reader r(resp.payload);
    epoch_challenge ec;
    ec.epoch = r.u32();
    ec.challenge = read_fr(r);
    return ec;
}

std::optional<ledger_entry> remote_bank_connection::query_ledger(const fr& scm) {
    byte_writer w;
    write_fr(w, scm);
    frame resp = round_trip({frame_type::query_ledger, w.take()});
    if (resp.type == frame_type::resp_ledger_absent) return std::nullopt;
    byte_reader r(resp.payload);
    return ledger_entry::decode(r);
}

bank_response remote_bank_connection::submit_enroll(const enroll_message& m) {
    frame resp = round_trip({frame_type::enroll, m.encode()});
    byte_reader r(resp.payload);
    return bank_response::decode(r);
}

bank_response remote_bank_connection::submit_sig_request(const sig_request& req) {
    frame_type t = std::holds_alternative<creation_sig_request>(req)
                       ? frame_type::sig_request_create
                       : frame_type::sig_request_complete;
    frame resp = round_trip({t, encode_sig_request(req)});
    byte_reader r(resp.payload);
    return bank_response::decode(r);
}

bank_response remote_bank_connection::submit_sync(const sync_message& m) {
    frame resp = round_trip({frame_type::sync, m.encode()});
    byte_reader r(resp.payload);
    return bank_response::decode(r);
}

bank_response remote_bank_connection::submit_recovery(const recovery_message& m) {
    frame resp = round_trip({frame_type::recover, m.encode()});
    byte_reader r(resp.payload);
    return bank_response::decode(r);
}

}  // namespace offcbdc
