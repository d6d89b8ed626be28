#pragma once

#include <variant>

#include "offcbdc/history.hpp"

namespace offcbdc {

struct epoch_challenge {
    std::uint32_t epoch = 0;
    fr challenge;
};

struct payment_request {
    fr rcm;
    std::uint64_t value = 0;

    bytes encode() const;
    static payment_request decode(byte_reader& r);
};

// m_pm: the openings of the payment commitment plus the payment proof.
struct payment_message {
    fr scm_new;
    std::uint64_t value = 0;
    std::uint32_t sender_epoch = 0;
    fr blind_pm;
    proof_bundle zkp_pm;

    void write(byte_writer& w) const;
    static payment_message read(byte_reader& r);
};

// Everything that crosses the proximity channel for one payment.
struct payment_package {
    related_history history;
    payment_message pm;

    bytes encode() const;
    static payment_package decode(byte_reader& r);
};

struct enroll_message {
    proof_bundle zkp_enroll;
    fr id;
    fr scm0;
    std::uint32_t epoch = 0;
    std::uint64_t holding_limit = 0;
    fr challenge;

    bytes encode() const;
    static enroll_message decode(byte_reader& r);
};

struct sync_message {
    fr scm_new;
    std::uint32_t epoch = 0;
    fr challenge;
    proof_bundle zkp_sync;

    bytes encode() const;
    static sync_message decode(byte_reader& r);
};

struct creation_sig_request {
    fr scm, dcm, sn, ds;
    proof_bundle zkp_state, zkp_dep;
};

struct completion_sig_request {
    fr scm, dcm, pcm;
    proof_bundle zkp_state, zkp_dep, zkp_pm;
};

using sig_request = std::variant<creation_sig_request, completion_sig_request>;

bytes encode_sig_request(const sig_request& req);
sig_request decode_sig_request(byte_reader& r);

struct recovery_message {
    fr scm;
    fr id;
    std::uint64_t value = 0;
    proof_bundle zkp_recovery;
    related_history history;

    bytes encode() const;
    static recovery_message decode(byte_reader& r);
};

// --- bank responses ----------------------------------------------------------

// `double_spend` is a distinct outcome from `rejected`: it tells the caller
// to start state recovery rather than to treat the request as malformed.
enum class bank_status : std::uint8_t {
    ok = 0,
    double_spend = 1,
    rejected = 2,
};

struct bank_response {
    bank_status status = bank_status::rejected;
    std::optional<signature> sigma;
    std::string reason;

    static bank_response accepted(const signature& s) {
        return {bank_status::ok, s, {}};
    }
    static bank_response bottom() { return {bank_status::double_spend, {}, {}}; }
    static bank_response reject(std::string why) {
        return {bank_status::rejected, {}, std::move(why)};
    }

    bytes encode() const;
    static bank_response decode(byte_reader& r);
};

struct ledger_entry {
    std::optional<fr> sn;
    std::optional<fr> ds;
    fr scm;
    std::optional<signature> sigma;

    bytes encode() const;
    static ledger_entry decode(byte_reader& r);
};

// The online channel to the settlement service. Implemented in-process for
// simulation and over the frame protocol for a remote service.
class bank_connection {
  public:
    virtual ~bank_connection() = default;

    virtual epoch_challenge get_epoch_challenge() = 0;
    virtual std::optional<ledger_entry> query_ledger(const fr& scm) = 0;
    virtual bank_response submit_enroll(const enroll_message& m) = 0;
    virtual bank_response submit_sig_request(const sig_request& req) = 0;
    virtual bank_response submit_sync(const sync_message& m) = 0;
    virtual bank_response submit_recovery(const recovery_message& m) = 0;
};

}  // namespace offcbdc
