// Participant identities used in wire frames and key-pair bindings.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace scmci {

enum class ParticipantId : std::uint8_t {
    kCustomer = 1,
    kMerchant = 2,
    kGateway = 3,
    kCustomerBank = 4,
    kMerchantBank = 5,
    kCertAuthority = 6,
    kTrudy = 7,
};

// Receiver value meaning "all registered participants except the sender".
inline constexpr std::uint8_t kBroadcastId = 0;

inline const char* participant_name(ParticipantId id) {
    switch (id) {
        case ParticipantId::kCustomer: return "C";
        case ParticipantId::kMerchant: return "M";
        case ParticipantId::kGateway: return "PG";
        case ParticipantId::kCustomerBank: return "CB";
        case ParticipantId::kMerchantBank: return "MB";
        case ParticipantId::kCertAuthority: return "CA";
        case ParticipantId::kTrudy: return "TRUDY";
    }
    return "?";
}

inline ParticipantId participant_from_byte(std::uint8_t b) {
    if (b < 1 || b > 7) throw std::invalid_argument("unknown participant id " + std::to_string(b));
    return static_cast<ParticipantId>(b);
}

// Ordered pair of participants that share a session key.
struct ParticipantPair {
    ParticipantId first;
    ParticipantId second;

    bool operator==(const ParticipantPair&) const = default;

    bool contains(ParticipantId id) const { return first == id || second == id; }

    std::string name() const {
        return std::string("(") + participant_name(first) + "," + participant_name(second) + ")";
    }
};

}  // namespace scmci
