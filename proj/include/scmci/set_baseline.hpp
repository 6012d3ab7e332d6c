// Per-message hybrid transport used as the comparison protocol: every message
// carries a fresh session key sealed under the recipient's textbook-RSA key,
// and the body is symmetrically encrypted under that key with a
// length+digest inner frame.
//
// The receiver is modeled after a sloppy legacy endpoint: it derives its
// session key from the LOW-ORDER bytes of whatever integer the envelope
// opens to (no range check) and answers every message with an observable
// accept/reject verdict. It keeps no replay state. Both behaviours are
// deliberate; they are the measured weaknesses of this transport.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scmci/certificate.hpp"
#include "scmci/envelope.hpp"
#include "scmci/netsim.hpp"
#include "scmci/rsa.hpp"
#include "scmci/symmetric.hpp"
#include "scmci/wire.hpp"

namespace scmci::baseline {

// Inner plaintext structure: payload length, payload, payload digest. The
// digest makes acceptance of a wrong session key vanishingly unlikely, so a
// verdict is a reliable statement about the key used.
inline Bytes craft_inner(std::span<const std::uint8_t> payload) {
    Bytes out;
    put_u32_be(out, static_cast<std::uint32_t>(payload.size()));
    append(out, payload);
    append(out, hash(HashAlgorithm::kMd5, payload).bytes);
    return out;
}

inline std::optional<Bytes> parse_inner(std::span<const std::uint8_t> plain) {
    if (plain.size() < 4 + 16) return std::nullopt;
    const std::uint32_t len = get_u32_be(plain.subspan(0, 4));
    if (plain.size() != 4u + len + 16u) return std::nullopt;
    Bytes payload(plain.begin() + 4, plain.begin() + 4 + len);
    Bytes trailer(plain.begin() + 4 + len, plain.end());
    if (hash(HashAlgorithm::kMd5, payload).bytes != trailer) return std::nullopt;
    return payload;
}

struct HybridFrame {
    BigUint sealed_session_key;
    Bytes body;

    Bytes encode() const {
        Bytes out;
        Bytes sealed = sealed_session_key.to_bytes_be();
        put_blob(out, sealed);
        put_blob(out, body);
        return out;
    }

    static HybridFrame decode(std::span<const std::uint8_t> bytes) {
        ByteReader r(bytes);
        HybridFrame f;
        f.sealed_session_key = BigUint::from_bytes_be(r.blob());
        f.body = r.blob();
        if (!r.done()) throw std::invalid_argument("trailing bytes after hybrid frame");
        return f;
    }
};

// Session keys may be shorter than a cipher key for toy instances; the raw
// value keys the block cipher after zero-left-padding to 16 bytes. Distinct
// raw values map to distinct cipher keys.
inline SymmetricKey transport_key(const Bytes& raw) {
    if (raw.empty() || raw.size() > 16)
        throw std::invalid_argument("transport session key must be 1..16 bytes");
    SymmetricKey key;
    key.key_id = KeyId::kSk1;
    key.pair = key_pair(KeyId::kSk1);
    key.bytes.assign(16 - raw.size(), 0);
    append(key.bytes, raw);
    return key;
}

inline HybridFrame send_with_key(const Certificate& recipient_cert, const Bytes& raw_key,
                                 std::span<const std::uint8_t> plaintext) {
    const BigUint key_int = BigUint::from_bytes_be(raw_key);
    if (key_int >= recipient_cert.public_key.n)
        throw KeyTooLargeForModulus("session key does not fit under recipient modulus");
    HybridFrame frame;
    frame.sealed_session_key = rsa_encrypt_int(recipient_cert.public_key, key_int);
    frame.body = sym_encrypt(transport_key(raw_key), craft_inner(plaintext));
    return frame;
}

// Fresh session key per message, derived from the caller's seed.
inline HybridFrame baseline_send(const Certificate& recipient_cert,
                                 std::span<const std::uint8_t> plaintext, std::uint64_t rng_seed,
                                 std::size_t key_len = 16) {
    DetRng rng(sub_seed(rng_seed, "baseline-session-key"));
    return send_with_key(recipient_cert, rng.bytes(key_len), plaintext);
}

struct ReceiveVerdict {
    bool accepted = false;
    Bytes plaintext;     // set when accepted
    std::string reason;  // set when rejected
};

inline ReceiveVerdict baseline_receive(const RsaPrivateKey& priv, const HybridFrame& frame,
                                       std::size_t key_len = 16) {
    if (frame.sealed_session_key >= priv.n) return {false, {}, "sealed value out of range"};
    const BigUint opened = rsa_decrypt_int(priv, frame.sealed_session_key);
    // Lenient key recovery: low key_len bytes, whatever the magnitude.
    Bytes full = opened.to_bytes_be(key_len);
    SymmetricKey key = transport_key(Bytes(full.end() - static_cast<std::ptrdiff_t>(key_len),
                                           full.end()));

    Bytes plain;
    try {
        plain = sym_decrypt(key, frame.body);
    } catch (const MalformedCiphertext& e) {
        return {false, {}, std::string("pad check failed: ") + e.what()};
    }
    std::optional<Bytes> payload = parse_inner(plain);
    if (!payload) return {false, {}, "inner structure invalid"};
    return {true, std::move(*payload), ""};
}

// A merchant-side receiving endpoint wired to a bus, with an observable
// verdict log and no replay tracking.
class BaselineSession {
public:
    explicit BaselineSession(std::uint64_t seed, unsigned rsa_bits = 512,
                             std::size_t key_len = 16)
        : seed_(seed),
          key_len_(key_len),
          merchant_keys_(keygen_rsa(sub_seed(seed, "rsa-M"), rsa_bits)),
          ca_(keygen_rsa(sub_seed(seed, "rsa-CA"), rsa_bits), HashAlgorithm::kMd5),
          merchant_cert_(ca_.issue(ParticipantId::kMerchant, merchant_keys_.pub())) {
        bus_.register_handler(ParticipantId::kMerchant,
                              [this](const WireMessage& msg) { on_frame(msg); });
    }

    const Certificate& merchant_certificate() const { return merchant_cert_; }
    const RsaKeyPair& merchant_keys() const { return merchant_keys_; }
    Bus& bus() { return bus_; }
    std::size_t key_len() const { return key_len_; }

    // Customer -> merchant hybrid message; one fresh key per message.
    HybridFrame send_message(std::span<const std::uint8_t> plaintext) {
        HybridFrame frame =
            baseline_send(merchant_cert_, plaintext, sub_seed(seed_, "msg") + counter_, key_len_);
        ++counter_;
        push_frame(frame);
        return frame;
    }

    void push_frame(const HybridFrame& frame) {
        WireMessage msg;
        msg.msg_type = MsgType::kBaselineHybrid;
        msg.sender = static_cast<std::uint8_t>(ParticipantId::kCustomer);
        msg.receiver = static_cast<std::uint8_t>(ParticipantId::kMerchant);
        msg.seq = next_seq_++;
        msg.payload = frame.encode();
        bus_.send(std::move(msg));
        bus_.run_until_idle();
    }

    const std::vector<ReceiveVerdict>& verdicts() const { return verdicts_; }

private:
    void on_frame(const WireMessage& msg) {
        HybridFrame frame;
        try {
            frame = HybridFrame::decode(msg.payload);
        } catch (const std::exception& e) {
            verdicts_.push_back({false, {}, std::string("frame undecodable: ") + e.what()});
            return;
        }
        verdicts_.push_back(baseline_receive(merchant_keys_.priv(), frame, key_len_));
    }

    std::uint64_t seed_;
    std::size_t key_len_;
    RsaKeyPair merchant_keys_;
    CertificateAuthority ca_;
    Certificate merchant_cert_;
    Bus bus_;
    std::vector<ReceiveVerdict> verdicts_;
    std::uint64_t counter_ = 0;
    std::uint32_t next_seq_ = 0;
};

}  // namespace scmci::baseline
