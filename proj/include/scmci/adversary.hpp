// The intercepting adversary: captures RSA-sealed session keys from
// transcripts, runs a bit-iterative chosen-ciphertext campaign against a
// receiver's accept/reject verdict, and replays captured frames.
//
// The campaign exploits textbook-RSA multiplicativity against the baseline's
// truncating receiver. Shifting the sealed key left by 2^(k-1-i) parks bits
// i..0 of the k-bit session key at the top of the receiver's low-k-bit
// window with zeros below, so one crafted body per bit asks "is bit i set?"
// and the verdict answers exactly. One control query up front, one probe per
// key bit, one verification query at the end: k + 2 queries total for a
// k-bit key. Requires modulus length >= 2k bits so the shifts never wrap.
//
// Against the six-party protocol the same campaign dies immediately: session
// keys are sealed only inside the one-shot setup handshake, whose receiver
// aborts the whole session (and the keys rotate) on the first malformed
// envelope, so no per-bit feedback channel exists.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scmci/envelope.hpp"
#include "scmci/run.hpp"
#include "scmci/set_baseline.hpp"
#include "scmci/wire.hpp"

namespace scmci::attack {

enum class Verdict : std::uint8_t { kAccept, kReject, kUnavailable };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::kAccept: return "ACCEPT";
        case Verdict::kReject: return "REJECT";
        case Verdict::kUnavailable: return "UNAVAILABLE";
    }
    return "?";
}

struct OracleReply {
    Verdict verdict = Verdict::kReject;
    std::string detail;
};

// A query is a substituted sealed key plus a body of the adversary's choice.
using Oracle = std::function<OracleReply(const BigUint& sealed, const Bytes& body)>;

struct CapturedKeyFrame {
    std::size_t frame_index = 0;
    MsgType type = MsgType::kBaselineHybrid;
    BigUint sealed_key;
    Bytes body;  // empty for setup envelopes
};

// Every frame carrying an RSA-sealed session key.
inline std::vector<CapturedKeyFrame> capture(std::span<const WireMessage> frames) {
    std::vector<CapturedKeyFrame> out;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const WireMessage& msg = frames[i];
        if (msg.msg_type == MsgType::kBaselineHybrid) {
            baseline::HybridFrame f = baseline::HybridFrame::decode(msg.payload);
            out.push_back({i, msg.msg_type, f.sealed_session_key, f.body});
        } else if (msg.msg_type == MsgType::kEnvelope) {
            DigitalEnvelope env = DigitalEnvelope::decode(msg.payload);
            out.push_back({i, msg.msg_type, env.sealed_key, {}});
        }
    }
    return out;
}

inline std::vector<CapturedKeyFrame> capture(const Transcript& transcript) {
    std::vector<WireMessage> frames;
    frames.reserve(transcript.size());
    for (const auto& e : transcript.entries()) frames.push_back(e.msg);
    return capture(frames);
}

struct AttackState {
    CapturedKeyFrame target;
    RsaPublicKey recipient_pub;
    std::size_t key_bits = 128;
    std::size_t budget = 130;  // key_bits + 2
    std::vector<bool> recovered_bits;
    std::size_t query_count = 0;

    static AttackState for_target(CapturedKeyFrame target, RsaPublicKey pub,
                                  std::size_t key_bits) {
        AttackState st;
        st.target = std::move(target);
        st.recipient_pub = std::move(pub);
        st.key_bits = key_bits;
        st.budget = key_bits + 2;
        return st;
    }
};

enum class FailReason : std::uint8_t {
    kNone = 0,
    kNoIterativeOracle,
    kBudgetExhausted,
    kVerificationFailed,
};

inline const char* fail_reason_name(FailReason r) {
    switch (r) {
        case FailReason::kNone: return "NONE";
        case FailReason::kNoIterativeOracle: return "NO_ITERATIVE_ORACLE";
        case FailReason::kBudgetExhausted: return "BUDGET_EXHAUSTED";
        case FailReason::kVerificationFailed: return "VERIFICATION_FAILED";
    }
    return "?";
}

struct AttackIteration {
    std::size_t index;
    std::string probe;
    Verdict verdict;
};

struct AttackOutcome {
    bool recovered = false;
    Bytes recovered_key;
    std::size_t query_count = 0;
    std::size_t budget = 0;
    FailReason reason = FailReason::kNone;
    std::vector<AttackIteration> iterations;
};

inline AttackOutcome run_attack_cycle(AttackState& state, const Oracle& oracle) {
    if (state.recipient_pub.n.bit_length() < 2 * state.key_bits)
        throw std::invalid_argument("attack needs modulus length >= twice the key length");
    const std::size_t key_len = state.key_bits / 8;
    const Bytes probe_payload = bytes_of("probe");

    AttackOutcome outcome;
    outcome.budget = state.budget;
    auto fail = [&](FailReason reason) {
        outcome.recovered = false;
        outcome.reason = reason;
        outcome.query_count = state.query_count;
        return outcome;
    };
    auto ask = [&](const BigUint& sealed, const Bytes& body, std::string note) {
        ++state.query_count;
        OracleReply reply = oracle(sealed, body);
        outcome.iterations.push_back({state.query_count, std::move(note), reply.verdict});
        return reply;
    };

    // Control query: the untouched frame must be accepted, otherwise there is
    // no per-message oracle to iterate against.
    OracleReply control = ask(state.target.sealed_key, state.target.body, "control replay");
    if (control.verdict != Verdict::kAccept) return fail(FailReason::kNoIterativeOracle);

    // One probe per key bit, least significant first.
    BigUint recovered;
    state.recovered_bits.assign(state.key_bits, false);
    for (std::size_t i = 0; i < state.key_bits; ++i) {
        if (state.query_count + 2 > state.budget) return fail(FailReason::kBudgetExhausted);
        const std::size_t shift = state.key_bits - 1 - i;
        const BigUint factor_enc =
            rsa_encrypt_int(state.recipient_pub, BigUint::from_u64(1) << shift);
        const BigUint sealed_probe =
            BigUint::mod_mul(state.target.sealed_key, factor_enc, state.recipient_pub.n);

        const BigUint guess = (recovered + (BigUint::from_u64(1) << i)) << shift;
        const Bytes guess_key = guess.to_bytes_be(key_len);
        const Bytes body = sym_encrypt(baseline::transport_key(guess_key),
                                       baseline::craft_inner(probe_payload));

        OracleReply reply =
            ask(sealed_probe, body, "bit " + std::to_string(i) + " via shift " +
                                        std::to_string(shift));
        if (reply.verdict == Verdict::kUnavailable) return fail(FailReason::kNoIterativeOracle);
        if (reply.verdict == Verdict::kAccept) {
            recovered.set_bit(i);
            state.recovered_bits[i] = true;
        }
    }

    // Verification query: the original sealed key paired with a body under
    // the recovered key must be accepted.
    const Bytes key_bytes = recovered.to_bytes_be(key_len);
    const Bytes verify_body = sym_encrypt(baseline::transport_key(key_bytes),
                                          baseline::craft_inner(probe_payload));
    OracleReply verify = ask(state.target.sealed_key, verify_body, "verification");
    if (verify.verdict != Verdict::kAccept) return fail(FailReason::kVerificationFailed);

    // Local soundness check against the captured body, when there is one.
    if (!state.target.body.empty()) {
        try {
            Bytes plain =
                sym_decrypt(baseline::transport_key(key_bytes), state.target.body);
            if (!baseline::parse_inner(plain)) return fail(FailReason::kVerificationFailed);
        } catch (const MalformedCiphertext&) {
            return fail(FailReason::kVerificationFailed);
        }
    }

    outcome.recovered = true;
    outcome.recovered_key = key_bytes;
    outcome.query_count = state.query_count;
    return outcome;
}

// Oracle over the baseline receiver: stateless, answers forever.
inline Oracle baseline_oracle(const RsaPrivateKey& priv, std::size_t key_len = 16) {
    return [priv, key_len](const BigUint& sealed, const Bytes& body) -> OracleReply {
        baseline::HybridFrame frame{sealed, body};
        baseline::ReceiveVerdict verdict = baseline::baseline_receive(priv, frame, key_len);
        return {verdict.accepted ? Verdict::kAccept : Verdict::kReject, verdict.reason};
    };
}

// Oracle over the six-party setup handshake. Each query replays the whole
// setup with the targeted envelope's sealed value substituted. The first
// substitution that fails to open aborts the handshake; after that the
// session keys rotate and nothing further can be asked about them.
class ScmciSetupOracle {
public:
    ScmciSetupOracle(proto::ScmciConfig config, KeyId target_key)
        : config_(std::move(config)), target_key_(target_key) {}

    Oracle oracle() {
        return [this](const BigUint& sealed, const Bytes&) -> OracleReply {
            return query(sealed);
        };
    }

    std::size_t sessions_aborted() const { return sessions_aborted_; }

private:
    OracleReply query(const BigUint& sealed) {
        if (dead_)
            return {Verdict::kUnavailable,
                    "handshake previously aborted; session keys rotated"};
        proto::ProtocolRun run(config_);
        run.bus().set_hook([&](WireMessage& msg, std::vector<WireMessage>&) {
            if (msg.msg_type != MsgType::kEnvelope) return true;
            DigitalEnvelope env = DigitalEnvelope::decode(msg.payload);
            if (env.key_id != target_key_) return true;
            env.sealed_key = sealed;
            msg.payload = env.encode();
            return true;
        });
        const bool ok = run.run_setup();
        if (!ok) {
            ++sessions_aborted_;
            dead_ = true;
            return {Verdict::kUnavailable, "setup aborted on malformed envelope; one-shot"};
        }
        return {Verdict::kAccept, "handshake completed"};
    }

    proto::ScmciConfig config_;
    KeyId target_key_;
    bool dead_ = false;
    std::size_t sessions_aborted_ = 0;
};

enum class ReplayOutcome : std::uint8_t {
    kAccepted,
    kRejectedStaleSequence,
    kRejectedIntegrity,
};

inline const char* replay_outcome_name(ReplayOutcome o) {
    switch (o) {
        case ReplayOutcome::kAccepted: return "ACCEPTED";
        case ReplayOutcome::kRejectedStaleSequence: return "REJECTED_STALE_SEQ";
        case ReplayOutcome::kRejectedIntegrity: return "REJECTED_INTEGRITY";
    }
    return "?";
}

// Re-inject a captured frame into a protocol session and classify the result.
inline ReplayOutcome replay_attack(proto::ProtocolRun& session, const WireMessage& frame) {
    std::size_t stale_before = 0;
    for (proto::Party* p : session.parties()) stale_before += p->replays_rejected();
    const bool aborted_before = session.journal().aborted();

    session.bus().send(frame);
    session.bus().run_until_idle();

    std::size_t stale_after = 0;
    for (proto::Party* p : session.parties()) stale_after += p->replays_rejected();
    if (stale_after > stale_before) return ReplayOutcome::kRejectedStaleSequence;
    if (!aborted_before && session.journal().aborted()) return ReplayOutcome::kRejectedIntegrity;
    return ReplayOutcome::kAccepted;
}

// The baseline receiver keeps no replay state: a byte-identical copy is
// processed like the original.
inline ReplayOutcome replay_attack(baseline::BaselineSession& session,
                                   const baseline::HybridFrame& frame) {
    session.push_frame(frame);
    const baseline::ReceiveVerdict& verdict = session.verdicts().back();
    return verdict.accepted ? ReplayOutcome::kAccepted : ReplayOutcome::kRejectedIntegrity;
}

}  // namespace scmci::attack
