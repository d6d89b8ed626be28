#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace offcbdc {

using bytes = std::vector<std::uint8_t>;

// Raised by byte_reader when the input is malformed. Carries the byte
// offset at which decoding failed so tools can report it.
struct decode_error : std::runtime_error {
    decode_error(std::size_t at, const std::string& what)
        : std::runtime_error(what + " at byte offset " + std::to_string(at)),
          offset(at) {}
    std::size_t offset;
};

class byte_writer {
  public:
    void u8(std::uint8_t v) { out_.push_back(v); }

    void u16(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
        out_.push_back(static_cast<std::uint8_t>(v));
    }

    void u32(std::uint32_t v) {
        for (int i = 3; i >= 0; --i)
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void u64(std::uint64_t v) {
        for (int i = 7; i >= 0; --i)
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void raw(std::span<const std::uint8_t> data) {
        out_.insert(out_.end(), data.begin(), data.end());
    }

    // u32 length prefix + payload.
    void var_bytes(std::span<const std::uint8_t> data) {
        u32(static_cast<std::uint32_t>(data.size()));
        raw(data);
    }

    std::size_t size() const { return out_.size(); }
    bytes take() { return std::move(out_); }
    const bytes& view() const { return out_; }

  private:
    bytes out_;
};

class byte_reader {
  public:
    explicit byte_reader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }

    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(
            (static_cast<std::uint16_t>(data_[pos_]) << 8) | data_[pos_ + 1]);
        pos_ += 2;
        return v;
    }

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
        pos_ += 4;
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_ + i];
        pos_ += 8;
        return v;
    }

    std::span<const std::uint8_t> raw(std::size_t n) {
        need(n);
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    bytes var_bytes(std::size_t max_len = 1u << 28) {
        std::uint32_t n = u32();
        if (n > max_len) throw decode_error(pos_ - 4, "length field too large");
        auto s = raw(n);
        return bytes(s.begin(), s.end());
    }

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }

    void expect_done() const {
        if (!done()) throw decode_error(pos_, "trailing bytes");
    }

  private:
    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) throw decode_error(pos_, "input truncated");
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

}  // namespace offcbdc
