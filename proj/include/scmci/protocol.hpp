// The six-party purchase protocol as explicit state machines over the bus:
// certificate exchange, pairwise session-key distribution via digital
// envelopes, dual-digest purchase splitting (merchant sees the order, gateway
// sees the payment, one linking digest binds them), bank authorization, and
// double-entry settlement. A run driver sequences the numbered steps 1-30 and
// journals each one.
//
// After setup completes, every payload on the wire is symmetric; the only
// public-key work outside setup is the gateway's signature on the
// authorization response and its verification at the merchant.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "scmci/certificate.hpp"
#include "scmci/digest.hpp"
#include "scmci/envelope.hpp"
#include "scmci/netsim.hpp"
#include "scmci/ops.hpp"
#include "scmci/orders.hpp"
#include "scmci/rsa.hpp"
#include "scmci/symmetric.hpp"
#include "scmci/wire.hpp"

namespace scmci::proto {

class MissingKey : public std::runtime_error {
public:
    explicit MissingKey(const std::string& what) : std::runtime_error(what) {}
};
class OrderMismatch : public std::runtime_error {
public:
    explicit OrderMismatch(const std::string& what) : std::runtime_error(what) {}
};
class IntegrityFailure : public std::runtime_error {
public:
    explicit IntegrityFailure(const std::string& what) : std::runtime_error(what) {}
};
class LinkageFailure : public std::runtime_error {
public:
    explicit LinkageFailure(const std::string& what) : std::runtime_error(what) {}
};
class ConsistencyFailure : public std::runtime_error {
public:
    explicit ConsistencyFailure(const std::string& what) : std::runtime_error(what) {}
};
class SignatureInvalid : public std::runtime_error {
public:
    explicit SignatureInvalid(const std::string& what) : std::runtime_error(what) {}
};
class NotSettled : public std::runtime_error {
public:
    explicit NotSettled(const std::string& what) : std::runtime_error(what) {}
};
class EnvelopeOpenFailed : public std::runtime_error {
public:
    explicit EnvelopeOpenFailed(const std::string& what) : std::runtime_error(what) {}
};

// Customer-built purchase: order half readable with SK1, payment half with
// SK5, both carrying the dual digest; H(OS) travels in clear for the
// gateway's linkage recomputation.
struct PurchaseBundle {
    HashAlgorithm algorithm = HashAlgorithm::kMd5;
    Bytes merchant_part;  // sym_encrypt(SK1, OS || H(PD) || dual digest)
    Bytes gateway_part;   // sym_encrypt(SK5, PD || dual digest)
    Digest h_os_clear;

    Bytes encode() const {
        Bytes out;
        out.push_back(static_cast<std::uint8_t>(algorithm));
        put_blob(out, h_os_clear.bytes);
        put_blob(out, merchant_part);
        put_blob(out, gateway_part);
        return out;
    }

    static PurchaseBundle decode(std::span<const std::uint8_t> bytes) {
        ByteReader r(bytes);
        PurchaseBundle b;
        const std::uint8_t alg = r.u8();
        if (alg > 1) throw std::invalid_argument("unknown digest algorithm in bundle");
        b.algorithm = static_cast<HashAlgorithm>(alg);
        b.h_os_clear.algorithm = b.algorithm;
        b.h_os_clear.bytes = r.blob();
        if (b.h_os_clear.bytes.size() != digest_size(b.algorithm))
            throw std::invalid_argument("clear order digest has wrong size");
        b.merchant_part = r.blob();
        b.gateway_part = r.blob();
        if (!r.done()) throw std::invalid_argument("trailing bytes after bundle");
        return b;
    }
};

// What the merchant forwards to the gateway after its own checks pass.
struct ForwardedOrder {
    HashAlgorithm algorithm = HashAlgorithm::kMd5;
    Bytes od_digest_enc;  // sym_encrypt(SK2, H(order record))
    Bytes gateway_part;   // relayed untouched
    Digest h_os_clear;

    Bytes encode() const {
        Bytes out;
        out.push_back(static_cast<std::uint8_t>(algorithm));
        put_blob(out, h_os_clear.bytes);
        put_blob(out, od_digest_enc);
        put_blob(out, gateway_part);
        return out;
    }

    static ForwardedOrder decode(std::span<const std::uint8_t> bytes) {
        ByteReader r(bytes);
        ForwardedOrder f;
        const std::uint8_t alg = r.u8();
        if (alg > 1) throw std::invalid_argument("unknown digest algorithm in forwarded order");
        f.algorithm = static_cast<HashAlgorithm>(alg);
        f.h_os_clear.algorithm = f.algorithm;
        f.h_os_clear.bytes = r.blob();
        if (f.h_os_clear.bytes.size() != digest_size(f.algorithm))
            throw std::invalid_argument("clear order digest has wrong size");
        f.od_digest_enc = r.blob();
        f.gateway_part = r.blob();
        if (!r.done()) throw std::invalid_argument("trailing bytes after forwarded order");
        return f;
    }
};

// Step-numbered run journal shared by the driver and all participants.
class RunJournal {
public:
    struct Step {
        int number;
        std::string note;
    };

    void log(int step, std::string note) { steps_.push_back({step, std::move(note)}); }

    void fail(int step, std::string reason) {
        if (!aborted_) {
            aborted_ = true;
            abort_step_ = step;
            abort_reason_ = std::move(reason);
        }
    }

    void note_reject(std::string what) { rejects_.push_back(std::move(what)); }

    bool aborted() const { return aborted_; }
    int abort_step() const { return abort_step_; }
    const std::string& abort_reason() const { return abort_reason_; }
    const std::vector<Step>& steps() const { return steps_; }
    const std::vector<std::string>& rejects() const { return rejects_; }

private:
    std::vector<Step> steps_;
    std::vector<std::string> rejects_;
    bool aborted_ = false;
    int abort_step_ = 0;
    std::string abort_reason_;
};

inline int envelope_step(KeyId id) {
    switch (id) {
        case KeyId::kSk1: return 4;
        case KeyId::kSk2: return 6;
        case KeyId::kSk5: return 8;
        case KeyId::kSk3: return 10;
        case KeyId::kSk4: return 12;
    }
    return 0;
}

struct PartyConfig {
    std::uint64_t seed = 42;
    std::size_t sym_key_len = 16;
    HashAlgorithm algorithm = HashAlgorithm::kMd5;
    SealingMode sealing = SealingMode::kTextbook;
};

// Internal control-flow token: handlers convert typed protocol errors into
// an observable abort frame plus a journal failure entry.
struct ProtocolAbort {
    int step;
    std::string reason;
};

class Party {
public:
    Party(ParticipantId id, PartyConfig cfg, RsaKeyPair keypair, RsaPublicKey ca_root,
          std::shared_ptr<RunJournal> journal)
        : id_(id),
          cfg_(cfg),
          keypair_(std::move(keypair)),
          ca_root_(std::move(ca_root)),
          journal_(std::move(journal)),
          seal_rng_(sub_seed(cfg.seed, std::string("seal-") + participant_name(id))) {}

    virtual ~Party() = default;

    ParticipantId id() const { return id_; }
    const RsaKeyPair& rsa() const { return keypair_; }
    const Certificate& own_certificate() const { return own_cert_; }
    void adopt_certificate(Certificate cert) { own_cert_ = std::move(cert); }

    void attach(Bus& bus) {
        bus_ = &bus;
        bus.register_handler(id_, [this](const WireMessage& msg) { handle(msg); });
    }

    void broadcast_certificate() {
        send(MsgType::kCertExchange, kBroadcastId, own_cert_.encode());
    }

    const std::map<KeyId, SymmetricKey>& session_keys() const { return keys_; }
    bool has_key(KeyId id) const { return keys_.count(id) > 0; }
    bool has_peer_certificate(ParticipantId id) const { return certs_.count(id) > 0; }
    const Certificate& peer_certificate(ParticipantId id) const { return certs_.at(id); }
    std::size_t peer_certificate_count() const { return certs_.size(); }

    // Every plaintext this party ever recovered with a session key; the
    // privacy-partition checks grep these.
    const std::vector<Bytes>& decrypted_log() const { return decrypted_log_; }
    std::size_t replays_rejected() const { return replays_rejected_; }

protected:
    virtual void on_message(const WireMessage& msg) = 0;

    void handle(const WireMessage& msg) {
        if (msg.msg_type == MsgType::kAbort) return;
        if (!accept_seq(msg)) {
            ++replays_rejected_;
            journal_->note_reject(std::string(participant_name(id_)) + " rejected stale frame (" +
                                  msg_type_name(msg.msg_type) + " seq " + std::to_string(msg.seq) +
                                  ")");
            send_abort(0, "stale sequence number on " + std::string(msg_type_name(msg.msg_type)),
                       /*fatal=*/false);
            return;
        }
        try {
            on_message(msg);
        } catch (const ProtocolAbort& abort) {
            journal_->fail(abort.step, abort.reason);
            send_abort(abort.step, abort.reason, /*fatal=*/true);
        }
    }

    bool accept_seq(const WireMessage& msg) {
        auto it = last_seq_.find(msg.sender);
        if (it != last_seq_.end() && msg.seq <= it->second) return false;
        last_seq_[msg.sender] = msg.seq;
        return true;
    }

    void send(MsgType type, std::uint8_t receiver, Bytes payload) {
        WireMessage msg;
        msg.msg_type = type;
        msg.sender = static_cast<std::uint8_t>(id_);
        msg.receiver = receiver;
        msg.seq = next_seq_++;
        msg.payload = std::move(payload);
        bus_->send(std::move(msg));
    }

    void send_abort(int step, const std::string& reason, bool fatal) {
        Bytes payload;
        payload.push_back(static_cast<std::uint8_t>(step));
        payload.push_back(fatal ? 1 : 0);
        append(payload, bytes_of(reason));
        send(MsgType::kAbort, kBroadcastId, payload);
    }

    void store_peer_certificate(const WireMessage& msg) {
        Certificate cert;
        try {
            cert = Certificate::decode(msg.payload);
        } catch (const std::exception& e) {
            throw ProtocolAbort{1, std::string("certificate undecodable: ") + e.what()};
        }
        if (!verify_certificate(ca_root_, cfg_.algorithm, cert))
            throw ProtocolAbort{1, std::string("certificate of ") +
                                       participant_name(cert.subject) +
                                       " failed verification (CertificateInvalid)"};
        certs_[cert.subject] = std::move(cert);
    }

    void store_session_key(const WireMessage& msg) {
        DigitalEnvelope env;
        try {
            env = DigitalEnvelope::decode(msg.payload);
        } catch (const std::exception& e) {
            throw ProtocolAbort{3, std::string("envelope undecodable: ") + e.what()};
        }
        const int step = envelope_step(env.key_id);
        if (env.recipient != id_)
            throw ProtocolAbort{step, "envelope addressed to another participant"};
        SymmetricKey key;
        try {
            key = open_envelope(keypair_.priv(), env);
        } catch (const std::exception& e) {
            throw ProtocolAbort{step, std::string("EnvelopeOpenFailed: ") + e.what()};
        }
        if (!(key.pair == key_pair(key.key_id)) || !key.pair.contains(id_))
            throw ProtocolAbort{step, "session key pair does not include this participant"};
        keys_[key.key_id] = std::move(key);
    }

    const SymmetricKey& require_key(KeyId id) const {
        auto it = keys_.find(id);
        if (it == keys_.end())
            throw MissingKey(std::string(participant_name(id_)) + " does not hold " +
                             key_name(id));
        return it->second;
    }

    Bytes decrypt_logged(KeyId key, std::span<const std::uint8_t> ciphertext) {
        Bytes plain = sym_decrypt(require_key(key), ciphertext);
        decrypted_log_.push_back(plain);
        return plain;
    }

    ParticipantId id_;
    PartyConfig cfg_;
    RsaKeyPair keypair_;
    RsaPublicKey ca_root_;
    Certificate own_cert_;
    std::shared_ptr<RunJournal> journal_;
    Bus* bus_ = nullptr;
    DetRng seal_rng_;
    std::map<KeyId, SymmetricKey> keys_;
    std::map<ParticipantId, Certificate> certs_;
    std::map<std::uint8_t, std::uint32_t> last_seq_;
    std::vector<Bytes> decrypted_log_;
    std::uint32_t next_seq_ = 0;
    std::size_t replays_rejected_ = 0;

    friend class ProtocolRun;
};

class Customer : public Party {
public:
    using Party::Party;

    PurchaseBundle compose_purchase(const OrderSummary& os, const PurchaseDetails& pd) {
        const SymmetricKey& sk1 = require_key(KeyId::kSk1);
        const SymmetricKey& sk5 = require_key(KeyId::kSk5);
        if (os.order_id != pd.order_id)
            throw OrderMismatch("order summary and purchase details disagree on order id");
        if (os.total_amount_cents != pd.amount_cents)
            throw OrderMismatch("order summary and purchase details disagree on the amount");
        os.validate();
        pd.validate();

        const Bytes os_bytes = os.encode();
        const Bytes pd_bytes = pd.encode();
        const Digest h_os = hash(cfg_.algorithm, os_bytes);
        const Digest h_pd = hash(cfg_.algorithm, pd_bytes);
        const Digest dd = dual_digest_from_halves(cfg_.algorithm, h_os, h_pd);
        journal_->log(14, "C hashed order summary and purchase details");

        Bytes merchant_plain = os_bytes;
        append(merchant_plain, h_pd.bytes);
        append(merchant_plain, dd.bytes);
        Bytes gateway_plain = pd_bytes;
        append(gateway_plain, dd.bytes);

        PurchaseBundle bundle;
        bundle.algorithm = cfg_.algorithm;
        bundle.merchant_part = sym_encrypt(sk1, merchant_plain);
        bundle.gateway_part = sym_encrypt(sk5, gateway_plain);
        bundle.h_os_clear = h_os;
        journal_->log(15, "C built purchase bundle under SK1/SK5 with linking digest");

        os_ = os;
        pd_ = pd;
        return bundle;
    }

    void send_purchase(const PurchaseBundle& bundle) {
        send(MsgType::kPurchase, static_cast<std::uint8_t>(ParticipantId::kMerchant),
             bundle.encode());
        journal_->log(16, "C -> M purchase bundle");
    }

    bool goods_received() const { return goods_received_; }
    const std::optional<OrderSummary>& order() const { return os_; }

protected:
    void on_message(const WireMessage& msg) override {
        switch (msg.msg_type) {
            case MsgType::kCertExchange:
                store_peer_certificate(msg);
                break;
            case MsgType::kEnvelope:
                store_session_key(msg);
                break;
            case MsgType::kGoods: {
                Bytes plain;
                try {
                    plain = decrypt_logged(KeyId::kSk1, msg.payload);
                } catch (const MalformedCiphertext& e) {
                    throw ProtocolAbort{30, std::string("goods frame unreadable: ") + e.what()};
                }
                goods_received_ = true;
                break;
            }
            default:
                break;
        }
    }

private:
    std::optional<OrderSummary> os_;
    std::optional<PurchaseDetails> pd_;
    bool goods_received_ = false;
};

class Merchant : public Party {
public:
    using Party::Party;

    // Generates SK1 and seals it to the customer.
    void distribute_order_key() {
        if (!has_peer_certificate(ParticipantId::kCustomer))
            throw MissingKey("merchant lacks the customer certificate");
        SymmetricKey sk1 = keygen_symmetric(cfg_.seed, KeyId::kSk1, key_pair(KeyId::kSk1),
                                            cfg_.sym_key_len);
        keys_[KeyId::kSk1] = sk1;
        DigitalEnvelope env = seal_envelope(peer_certificate(ParticipantId::kCustomer), sk1,
                                            cfg_.sealing, &seal_rng_);
        journal_->log(3, "M sealed SK1(C,M) under the customer key");
        send(MsgType::kEnvelope, static_cast<std::uint8_t>(ParticipantId::kCustomer),
             env.encode());
        journal_->log(4, "M -> C envelope with SK1");
    }

    // Decrypt the order half, recompute the digest chain, and build the
    // forwarded order. Throws IntegrityFailure on any mismatch.
    ForwardedOrder process_purchase(const PurchaseBundle& bundle) {
        if (bundle.algorithm != cfg_.algorithm)
            throw IntegrityFailure("bundle digest algorithm differs from the session's");
        Bytes plain;
        try {
            plain = decrypt_logged(KeyId::kSk1, bundle.merchant_part);
        } catch (const MalformedCiphertext& e) {
            throw IntegrityFailure(std::string("merchant part unreadable: ") + e.what());
        }
        const std::size_t dsize = digest_size(cfg_.algorithm);
        if (plain.size() < 19 + 2 * dsize)
            throw IntegrityFailure("merchant part too short for order plus digests");

        OrderSummary os;
        try {
            os = OrderSummary::decode(
                std::span(plain.data(), plain.size() - 2 * dsize));
        } catch (const std::exception& e) {
            throw IntegrityFailure(std::string("order summary undecodable: ") + e.what());
        }
        Digest h_pd_carried{cfg_.algorithm,
                            Bytes(plain.end() - 2 * dsize, plain.end() - dsize)};
        Digest dd_carried{cfg_.algorithm, Bytes(plain.end() - dsize, plain.end())};

        const Digest h_os = hash(cfg_.algorithm, os.encode());
        if (!(dual_digest_from_halves(cfg_.algorithm, h_os, h_pd_carried) == dd_carried))
            throw IntegrityFailure("digest chain mismatch: order or linkage altered");
        if (!(bundle.h_os_clear == h_os))
            throw IntegrityFailure("clear order digest does not match decrypted order");
        journal_->log(17, "M digest-chain comparison passed (integrity, authenticity)");
        journal_->log(18, "M decrypted order summary under SK1");
        journal_->log(19, "M recovered linking digest under SK1");
        journal_->log(20, "M recomputed order digest and sealed it for PG");

        order_ = os;
        dd_ = dd_carried;

        ForwardedOrder fwd;
        fwd.algorithm = cfg_.algorithm;
        // Order record = the order exactly as received, so its digest equals
        // the clear digest on the honest path.
        fwd.od_digest_enc = sym_encrypt(require_key(KeyId::kSk2), h_os.bytes);
        fwd.gateway_part = bundle.gateway_part;
        fwd.h_os_clear = bundle.h_os_clear;
        return fwd;
    }

    void verify_authorization(const AuthorizationResponse& ar) {
        if (!has_peer_certificate(ParticipantId::kGateway))
            throw SignatureInvalid("merchant lacks the gateway certificate");
        const Digest d = hash(cfg_.algorithm, ar.info.encode());
        if (!rsa_verify_digest(peer_certificate(ParticipantId::kGateway).public_key, d,
                               ar.signature))
            throw SignatureInvalid("authorization response signature does not verify");
        if (!order_ || ar.info.order_id != order_->order_id)
            throw ConsistencyFailure("authorization response for an unknown order");
        ar_ = ar;
    }

    void deliver_goods() {
        if (!ar_ || !ar_->info.approved || !pr_)
            throw NotSettled("goods requested before settlement completed");
        Bytes note = bytes_of("goods for order ");
        put_u64_be(note, order_->order_id);
        send(MsgType::kGoods, static_cast<std::uint8_t>(ParticipantId::kCustomer),
             sym_encrypt(require_key(KeyId::kSk1), note));
        journal_->log(30, "M -> C goods delivered");
    }

    const std::optional<OrderSummary>& order() const { return order_; }
    const std::optional<AuthorizationResponse>& authorization() const { return ar_; }
    const std::optional<PaymentResponse>& payment_response() const { return pr_; }
    bool settled() const { return pr_.has_value(); }

protected:
    void on_message(const WireMessage& msg) override {
        switch (msg.msg_type) {
            case MsgType::kCertExchange:
                store_peer_certificate(msg);
                break;
            case MsgType::kEnvelope:
                store_session_key(msg);
                break;
            case MsgType::kPurchase: {
                PurchaseBundle bundle;
                try {
                    bundle = PurchaseBundle::decode(msg.payload);
                } catch (const std::exception& e) {
                    throw ProtocolAbort{17, std::string("bundle undecodable: ") + e.what()};
                }
                ForwardedOrder fwd;
                try {
                    fwd = process_purchase(bundle);
                } catch (const IntegrityFailure& e) {
                    throw ProtocolAbort{17, std::string("IntegrityFailure: ") + e.what()};
                } catch (const MissingKey& e) {
                    throw ProtocolAbort{17, e.what()};
                }
                send(MsgType::kOrderFwd, static_cast<std::uint8_t>(ParticipantId::kGateway),
                     fwd.encode());
                journal_->log(21, "M -> PG forwarded order digest and payment part");
                break;
            }
            case MsgType::kAuthResp: {
                Bytes plain;
                try {
                    plain = decrypt_logged(KeyId::kSk2, msg.payload);
                } catch (const MalformedCiphertext& e) {
                    throw ProtocolAbort{25, std::string("authorization response unreadable: ") +
                                                e.what()};
                }
                AuthorizationResponse ar;
                try {
                    ByteReader r(plain);
                    ar.info = AuthorizationInfo::decode(r.take(18));
                    ar.signature = BigUint::from_bytes_be(r.blob());
                    if (!r.done()) throw std::invalid_argument("trailing bytes");
                } catch (const std::exception& e) {
                    throw ProtocolAbort{25, std::string("authorization response undecodable: ") +
                                                e.what()};
                }
                try {
                    verify_authorization(ar);
                } catch (const std::exception& e) {
                    throw ProtocolAbort{25, std::string("SignatureInvalid: ") + e.what()};
                }
                break;
            }
            case MsgType::kPayResp: {
                Bytes plain;
                try {
                    plain = decrypt_logged(KeyId::kSk2, msg.payload);
                } catch (const MalformedCiphertext& e) {
                    throw ProtocolAbort{29, std::string("payment response unreadable: ") +
                                                e.what()};
                }
                PaymentResponse pr = PaymentResponse::decode(plain);
                if (!order_ || pr.order_id != order_->order_id ||
                    pr.amount_cents != order_->total_amount_cents)
                    throw ProtocolAbort{29, "ConsistencyFailure: payment response mismatch"};
                pr_ = pr;
                break;
            }
            default:
                break;
        }
    }

private:
    std::optional<OrderSummary> order_;
    std::optional<Digest> dd_;
    std::optional<AuthorizationResponse> ar_;
    std::optional<PaymentResponse> pr_;
};

class Gateway : public Party {
public:
    using Party::Party;

    void distribute_key(KeyId key_id, ParticipantId to, int gen_step, int send_step) {
        if (!has_peer_certificate(to))
            throw MissingKey(std::string("gateway lacks certificate of ") + participant_name(to));
        SymmetricKey key = keygen_symmetric(cfg_.seed, key_id, key_pair(key_id),
                                            cfg_.sym_key_len);
        keys_[key_id] = key;
        DigitalEnvelope env = seal_envelope(peer_certificate(to), key, cfg_.sealing, &seal_rng_);
        journal_->log(gen_step, std::string("PG sealed ") + key_name(key_id) + " under the " +
                                    participant_name(to) + " key");
        send(MsgType::kEnvelope, static_cast<std::uint8_t>(to), env.encode());
        journal_->log(send_step,
                      std::string("PG -> ") + participant_name(to) + " envelope with " +
                          key_name(key_id));
    }

    // Verify the merchant's view, verify linkage, release the payment details.
    PurchaseDetails process_forwarded(const ForwardedOrder& fwd) {
        if (fwd.algorithm != cfg_.algorithm)
            throw ConsistencyFailure("forwarded order algorithm differs from the session's");
        const std::size_t dsize = digest_size(cfg_.algorithm);

        Bytes od_digest;
        try {
            od_digest = decrypt_logged(KeyId::kSk2, fwd.od_digest_enc);
        } catch (const MalformedCiphertext& e) {
            throw ConsistencyFailure(std::string("merchant order digest unreadable: ") + e.what());
        }
        if (od_digest.size() != dsize || od_digest != fwd.h_os_clear.bytes)
            throw ConsistencyFailure("merchant order record digest differs from customer's");

        Bytes plain;
        try {
            plain = decrypt_logged(KeyId::kSk5, fwd.gateway_part);
        } catch (const MalformedCiphertext& e) {
            throw LinkageFailure(std::string("payment part unreadable: ") + e.what());
        }
        if (plain.size() < 36 + dsize) throw LinkageFailure("payment part too short");

        PurchaseDetails pd;
        try {
            pd = PurchaseDetails::decode(std::span(plain.data(), plain.size() - dsize));
        } catch (const std::exception& e) {
            throw LinkageFailure(std::string("payment details undecodable: ") + e.what());
        }
        Digest dd_carried{cfg_.algorithm, Bytes(plain.end() - dsize, plain.end())};
        const Digest h_pd = hash(cfg_.algorithm, pd.encode());
        if (!(dual_digest_from_halves(cfg_.algorithm, fwd.h_os_clear, h_pd) == dd_carried))
            throw LinkageFailure("dual digest mismatch: order and payment halves not linked");

        pending_[pd.order_id] = pd;
        return pd;
    }

    void send_auth_response(std::uint64_t order_id) {
        const AuthorizationInfo& ai = auth_.at(order_id);
        const Bytes ai_bytes = ai.encode();
        const BigUint sig = rsa_sign_digest(keypair_.priv(), hash(cfg_.algorithm, ai_bytes));
        Bytes plain = ai_bytes;
        Bytes sig_bytes = sig.to_bytes_be();
        put_blob(plain, sig_bytes);
        send(MsgType::kAuthResp, static_cast<std::uint8_t>(ParticipantId::kMerchant),
             sym_encrypt(require_key(KeyId::kSk2), plain));
        journal_->log(25, "PG signed authorization response and sent it to M");
    }

    void redirect_payment_response(std::uint64_t order_id) {
        const PaymentResponse& pr = pay_.at(order_id);
        send(MsgType::kPayResp, static_cast<std::uint8_t>(ParticipantId::kMerchantBank),
             sym_encrypt(require_key(KeyId::kSk4), pr.encode()));
        journal_->log(27, "PG redirected payment response to MB");
    }

    void relay_payment_response(std::uint64_t order_id) {
        const PaymentResponse& pr = pay_.at(order_id);
        send(MsgType::kPayResp, static_cast<std::uint8_t>(ParticipantId::kMerchant),
             sym_encrypt(require_key(KeyId::kSk2), pr.encode()));
        journal_->log(29, "PG -> M payment response for verification");
    }

    bool has_authorization(std::uint64_t order_id) const { return auth_.count(order_id) > 0; }
    const AuthorizationInfo& authorization(std::uint64_t order_id) const {
        return auth_.at(order_id);
    }
    bool has_payment_response(std::uint64_t order_id) const { return pay_.count(order_id) > 0; }
    const PaymentResponse& payment_response(std::uint64_t order_id) const {
        return pay_.at(order_id);
    }

protected:
    void on_message(const WireMessage& msg) override {
        switch (msg.msg_type) {
            case MsgType::kCertExchange:
                store_peer_certificate(msg);
                break;
            case MsgType::kEnvelope:
                store_session_key(msg);
                break;
            case MsgType::kOrderFwd: {
                ForwardedOrder fwd;
                try {
                    fwd = ForwardedOrder::decode(msg.payload);
                } catch (const std::exception& e) {
                    throw ProtocolAbort{21, std::string("forwarded order undecodable: ") +
                                                e.what()};
                }
                PurchaseDetails pd;
                try {
                    pd = process_forwarded(fwd);
                } catch (const LinkageFailure& e) {
                    throw ProtocolAbort{21, std::string("LinkageFailure: ") + e.what()};
                } catch (const ConsistencyFailure& e) {
                    throw ProtocolAbort{21, std::string("ConsistencyFailure: ") + e.what()};
                } catch (const MissingKey& e) {
                    throw ProtocolAbort{21, e.what()};
                }
                send(MsgType::kPdFwd, static_cast<std::uint8_t>(ParticipantId::kCustomerBank),
                     sym_encrypt(require_key(KeyId::kSk3), pd.encode()));
                journal_->log(22, "PG -> CB payment details over the bank extranet key");
                break;
            }
            case MsgType::kAuthInfo: {
                Bytes plain;
                try {
                    plain = decrypt_logged(KeyId::kSk3, msg.payload);
                } catch (const MalformedCiphertext& e) {
                    throw ProtocolAbort{24, std::string("authorized information unreadable: ") +
                                                e.what()};
                }
                AuthorizationInfo ai = AuthorizationInfo::decode(plain);
                auth_[ai.order_id] = ai;
                break;
            }
            case MsgType::kPayResp: {
                const bool from_cb =
                    msg.sender == static_cast<std::uint8_t>(ParticipantId::kCustomerBank);
                const KeyId key = from_cb ? KeyId::kSk3 : KeyId::kSk4;
                Bytes plain;
                try {
                    plain = decrypt_logged(key, msg.payload);
                } catch (const MalformedCiphertext& e) {
                    throw ProtocolAbort{26, std::string("payment response unreadable: ") +
                                                e.what()};
                }
                PaymentResponse pr = PaymentResponse::decode(plain);
                auto it = pay_.find(pr.order_id);
                if (it == pay_.end()) {
                    pay_[pr.order_id] = pr;
                } else {
                    // Acquirer ack fills in the credit reference.
                    it->second.credit_ref = pr.credit_ref;
                }
                break;
            }
            default:
                break;
        }
    }

private:
    std::map<std::uint64_t, PurchaseDetails> pending_;
    std::map<std::uint64_t, AuthorizationInfo> auth_;
    std::map<std::uint64_t, PaymentResponse> pay_;
};

// Customer's bank: verifies payment details and debits the card account.
class IssuerBank : public Party {
public:
    using Party::Party;

    void configure(std::string expiry_floor_mmyy) { expiry_floor_ = std::move(expiry_floor_mmyy); }

    BankLedger& ledger() { return ledger_; }
    const BankLedger& ledger() const { return ledger_; }

    AuthorizationInfo authorize(const PurchaseDetails& pd) {
        AuthorizationInfo ai;
        ai.order_id = pd.order_id;
        DetRng code_rng(sub_seed(cfg_.seed, "auth-code") ^ pd.order_id);
        ai.auth_code = code_rng.next_u64();
        if (!ledger_.has_account(pd.card_number)) {
            ai.approved = false;
            ai.reason = AuthReason::kUnknownAccount;
        } else if (!luhn_valid(pd.card_number)) {
            ai.approved = false;
            ai.reason = AuthReason::kBadPan;
        } else if (!expiry_ok(pd.expiry)) {
            ai.approved = false;
            ai.reason = AuthReason::kExpired;
        } else if (ledger_.balance(pd.card_number) < pd.amount_cents) {
            ai.approved = false;
            ai.reason = AuthReason::kInsufficientFunds;
        } else {
            ai.approved = true;
            ai.reason = AuthReason::kOk;
        }
        return ai;
    }

    // Step 26: apply the debit and report it to the gateway.
    PaymentResponse debit_and_respond(std::uint64_t order_id) {
        auto it = pending_.find(order_id);
        if (it == pending_.end()) throw NotSettled("no pending payment details for this order");
        const PurchaseDetails& pd = it->second;
        const std::uint64_t ref = ledger_.debit(pd.card_number, order_id, pd.amount_cents);
        PaymentResponse pr;
        pr.order_id = order_id;
        pr.amount_cents = pd.amount_cents;
        pr.debit_ref = ref;
        send(MsgType::kPayResp, static_cast<std::uint8_t>(ParticipantId::kGateway),
             sym_encrypt(require_key(KeyId::kSk3), pr.encode()));
        journal_->log(26, "CB debited the card account and sent the payment response");
        return pr;
    }

protected:
    void on_message(const WireMessage& msg) override {
        switch (msg.msg_type) {
            case MsgType::kCertExchange:
                store_peer_certificate(msg);
                break;
            case MsgType::kEnvelope:
                store_session_key(msg);
                break;
            case MsgType::kPdFwd: {
                Bytes plain;
                try {
                    plain = decrypt_logged(KeyId::kSk3, msg.payload);
                } catch (const MalformedCiphertext& e) {
                    throw ProtocolAbort{23, std::string("payment details unreadable: ") +
                                                e.what()};
                }
                PurchaseDetails pd;
                try {
                    pd = PurchaseDetails::decode(plain);
                } catch (const std::exception& e) {
                    throw ProtocolAbort{23, std::string("payment details undecodable: ") +
                                                e.what()};
                }
                AuthorizationInfo ai = authorize(pd);
                journal_->log(23, std::string("CB verified payment details: ") +
                                      (ai.approved ? "approved" : auth_reason_name(ai.reason)));
                if (ai.approved) pending_[pd.order_id] = pd;
                send(MsgType::kAuthInfo, static_cast<std::uint8_t>(ParticipantId::kGateway),
                     sym_encrypt(require_key(KeyId::kSk3), ai.encode()));
                journal_->log(24, "CB -> PG authorized information");
                break;
            }
            default:
                break;
        }
    }

private:
    bool expiry_ok(const std::string& mmyy) const {
        if (mmyy.size() != 4) return false;
        const int mm = (mmyy[0] - '0') * 10 + (mmyy[1] - '0');
        const int yy = (mmyy[2] - '0') * 10 + (mmyy[3] - '0');
        if (mm < 1 || mm > 12) return false;
        const int floor_mm = (expiry_floor_[0] - '0') * 10 + (expiry_floor_[1] - '0');
        const int floor_yy = (expiry_floor_[2] - '0') * 10 + (expiry_floor_[3] - '0');
        return yy > floor_yy || (yy == floor_yy && mm >= floor_mm);
    }

    BankLedger ledger_;
    std::map<std::uint64_t, PurchaseDetails> pending_;
    std::string expiry_floor_ = "0125";
};

// Merchant's bank: credits the merchant account and acknowledges with the
// credit reference so the relayed payment response is complete.
class AcquirerBank : public Party {
public:
    using Party::Party;

    static constexpr const char* kMerchantAccount = "merchant-settlement";

    BankLedger& ledger() { return ledger_; }
    const BankLedger& ledger() const { return ledger_; }

protected:
    void on_message(const WireMessage& msg) override {
        switch (msg.msg_type) {
            case MsgType::kCertExchange:
                store_peer_certificate(msg);
                break;
            case MsgType::kEnvelope:
                store_session_key(msg);
                break;
            case MsgType::kPayResp: {
                Bytes plain;
                try {
                    plain = decrypt_logged(KeyId::kSk4, msg.payload);
                } catch (const MalformedCiphertext& e) {
                    throw ProtocolAbort{28, std::string("payment response unreadable: ") +
                                                e.what()};
                }
                PaymentResponse pr = PaymentResponse::decode(plain);
                std::uint64_t ref;
                try {
                    ref = ledger_.credit(kMerchantAccount, pr.order_id, pr.amount_cents);
                } catch (const DoubleSettlement& e) {
                    throw ProtocolAbort{28, std::string("DoubleSettlement: ") + e.what()};
                }
                journal_->log(28, "MB credited the merchant account");
                pr.credit_ref = ref;
                send(MsgType::kPayResp, static_cast<std::uint8_t>(ParticipantId::kGateway),
                     sym_encrypt(require_key(KeyId::kSk4), pr.encode()));
                break;
            }
            default:
                break;
        }
    }

private:
    BankLedger ledger_;
};

}  // namespace scmci::proto
