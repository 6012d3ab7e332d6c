// Canonical wire framing: fixed 12-byte big-endian header + payload.
// Every protocol variant and the analyzer speak exactly this layout, so
// transcripts are byte-stable across runs and platforms.
#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scmci/bytes.hpp"
#include "scmci/digest.hpp"
#include "scmci/participants.hpp"

namespace scmci {

enum class MsgType : std::uint8_t {
    kCertExchange = 1,
    kEnvelope = 2,
    kPurchase = 3,
    kOrderFwd = 4,
    kPdFwd = 5,
    kAuthInfo = 6,
    kAuthResp = 7,
    kPayResp = 8,
    kGoods = 9,
    kBaselineHybrid = 10,
    kAbort = 11,
};

inline const char* msg_type_name(MsgType t) {
    switch (t) {
        case MsgType::kCertExchange: return "CERT_EXCHANGE";
        case MsgType::kEnvelope: return "ENVELOPE";
        case MsgType::kPurchase: return "PURCHASE";
        case MsgType::kOrderFwd: return "ORDER_FWD";
        case MsgType::kPdFwd: return "PD_FWD";
        case MsgType::kAuthInfo: return "AUTH_INFO";
        case MsgType::kAuthResp: return "AUTH_RESP";
        case MsgType::kPayResp: return "PAY_RESP";
        case MsgType::kGoods: return "GOODS";
        case MsgType::kBaselineHybrid: return "BASELINE_HYBRID";
        case MsgType::kAbort: return "ABORT";
    }
    return "?";
}

class Truncated : public std::runtime_error {
public:
    explicit Truncated(const std::string& what) : std::runtime_error(what) {}
};
class BadVersion : public std::runtime_error {
public:
    explicit BadVersion(const std::string& what) : std::runtime_error(what) {}
};
class UnknownType : public std::runtime_error {
public:
    explicit UnknownType(const std::string& what) : std::runtime_error(what) {}
};

struct WireMessage {
    static constexpr std::uint8_t kVersion = 1;
    static constexpr std::size_t kHeaderSize = 12;

    MsgType msg_type = MsgType::kCertExchange;
    std::uint8_t sender = 0;    // participant id
    std::uint8_t receiver = 0;  // participant id, or kBroadcastId
    std::uint32_t seq = 0;
    Bytes payload;

    bool operator==(const WireMessage&) const = default;

    Bytes encode() const {
        Bytes out;
        out.reserve(kHeaderSize + payload.size());
        out.push_back(kVersion);
        out.push_back(static_cast<std::uint8_t>(msg_type));
        out.push_back(sender);
        out.push_back(receiver);
        put_u32_be(out, seq);
        put_u32_be(out, static_cast<std::uint32_t>(payload.size()));
        append(out, payload);
        return out;
    }

    static WireMessage decode(std::span<const std::uint8_t> bytes) {
        if (bytes.size() < kHeaderSize) throw Truncated("frame shorter than header");
        if (bytes[0] != kVersion)
            throw BadVersion("unsupported frame version " + std::to_string(bytes[0]));
        const std::uint8_t type_byte = bytes[1];
        if (type_byte < 1 || type_byte > static_cast<std::uint8_t>(MsgType::kAbort))
            throw UnknownType("unknown message type " + std::to_string(type_byte));
        WireMessage msg;
        msg.msg_type = static_cast<MsgType>(type_byte);
        msg.sender = bytes[2];
        msg.receiver = bytes[3];
        msg.seq = get_u32_be(bytes.subspan(4, 4));
        const std::uint32_t len = get_u32_be(bytes.subspan(8, 4));
        if (bytes.size() < kHeaderSize + len) throw Truncated("payload shorter than declared");
        msg.payload.assign(bytes.begin() + kHeaderSize, bytes.begin() + kHeaderSize + len);
        return msg;
    }
};

enum class FrameFlag : std::uint8_t {
    kDelivered = 0,  // passed the tap unmodified and reached its handler
    kIntercepted = 1,  // swallowed by the tap; never delivered
    kModified = 2,   // delivered after in-flight modification
    kInjected = 3,   // originated at the tap, then delivered
};

struct TranscriptEntry {
    WireMessage msg;
    FrameFlag flag = FrameFlag::kDelivered;
};

// Append-only record of everything that crossed the bus.
class Transcript {
public:
    void add(WireMessage msg, FrameFlag flag) { entries_.push_back({std::move(msg), flag}); }

    const std::vector<TranscriptEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    const TranscriptEntry& operator[](std::size_t i) const { return entries_.at(i); }

    std::size_t count_type(MsgType t) const {
        std::size_t n = 0;
        for (const auto& e : entries_)
            if (e.msg.msg_type == t) ++n;
        return n;
    }

    // Length-prefixed concatenation of encoded frames.
    Bytes serialize() const {
        Bytes out;
        for (const auto& e : entries_) {
            Bytes frame = e.msg.encode();
            put_u32_be(out, static_cast<std::uint32_t>(frame.size()));
            append(out, frame);
        }
        return out;
    }

    static std::vector<WireMessage> parse(std::span<const std::uint8_t> bytes) {
        std::vector<WireMessage> out;
        std::size_t pos = 0;
        while (pos < bytes.size()) {
            if (bytes.size() - pos < 4) throw Truncated("transcript record length cut short");
            const std::uint32_t len = get_u32_be(bytes.subspan(pos, 4));
            pos += 4;
            if (bytes.size() - pos < len) throw Truncated("transcript record cut short");
            out.push_back(WireMessage::decode(bytes.subspan(pos, len)));
            pos += len;
        }
        return out;
    }

    void save(const std::string& path) const {
        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        if (!file) throw std::runtime_error("cannot open transcript file for writing: " + path);
        Bytes data = serialize();
        file.write(reinterpret_cast<const char*>(data.data()),
                   static_cast<std::streamsize>(data.size()));
    }

    static std::vector<WireMessage> load(const std::string& path) {
        std::ifstream file(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open transcript file: " + path);
        Bytes data((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
        return parse(data);
    }

    std::string checksum() const { return hash(HashAlgorithm::kMd5, serialize()).hex(); }

private:
    std::vector<TranscriptEntry> entries_;
};

}  // namespace scmci
