#pragma once

#include "offcbdc/messages.hpp"

namespace offcbdc {

// One frame = type tag (1 byte) | payload length (4 bytes) | payload.
// Doubles as the settlement service's network protocol over a byte stream.
enum class frame_type : std::uint8_t {
    // requests
    enroll = 0x01,
    get_epoch_challenge = 0x02,
    sig_request_create = 0x03,
    sig_request_complete = 0x04,
    sync = 0x05,
    recover = 0x06,
    query_ledger = 0x07,
    // responses
    resp_bank = 0x81,        // bank_response payload
    resp_challenge = 0x82,   // epoch_challenge payload
    resp_ledger_entry = 0x83,
    resp_ledger_absent = 0x84,
    resp_error = 0xff,
};

struct frame {
    frame_type type;
    bytes payload;
};

bytes encode_frame(const frame& f);

// Throws decode_error on truncation or an unknown tag.
frame decode_frame(byte_reader& r);

// --- channel model -----------------------------------------------------------

enum class channel_kind : std::uint8_t { proximity = 0, online = 1 };

struct channel_model {
    channel_kind kind = channel_kind::proximity;
    double bitrate_bps = 420'000.0;  // NFC-class proximity link
    double latency_s = 0.005;

    static channel_model proximity_default() { return {channel_kind::proximity, 420'000.0, 0.005}; }
    static channel_model online_default() { return {channel_kind::online, 50'000'000.0, 0.020}; }
};

inline double transfer_time(const channel_model& c, std::size_t message_bytes) {
    return c.latency_s + (8.0 * static_cast<double>(message_bytes)) / c.bitrate_bps;
}

// FIFO message queue between two actors with per-message delivery metadata.
// The simulator owns the clock; the channel only accounts for transfer time.
struct channel {
    channel_model model;
    struct in_flight {
        bytes payload;
        double ready_at = 0;  // virtual seconds
    };
    std::vector<in_flight> queue;
    std::size_t total_bytes = 0;
    std::size_t messages = 0;

    // Enqueue at virtual time `now`; returns the delivery time.
    double send(bytes payload, double now) {
        double ready = now + transfer_time(model, payload.size());
        total_bytes += payload.size();
        messages += 1;
        queue.push_back({std::move(payload), ready});
        return ready;
    }

    std::optional<bytes> receive() {
        if (queue.empty()) return std::nullopt;
        bytes out = std::move(queue.front().payload);
        queue.erase(queue.begin());
        return out;
    }
};

}  // namespace offcbdc
