#include <gtest/gtest.h>

#include "scmci/ops.hpp"
#include "scmci/set_baseline.hpp"
#include "support/golden.hpp"

namespace scmci::baseline {
namespace {

struct Fixture {
    RsaKeyPair merchant = keygen_rsa(4242, 512);
    CertificateAuthority ca{keygen_rsa(555, 256), HashAlgorithm::kMd5};
    Certificate cert = ca.issue(ParticipantId::kMerchant, merchant.pub());
};

TEST(Baseline, FixtureSessionKeyRoundTrip) {
    Fixture fx;
    const Bytes session_key = test::golden_bytes("fixture_session_key");
    const Bytes msg = bytes_of("order information for the merchant");

    HybridFrame frame = send_with_key(fx.cert, session_key, msg);
    EXPECT_EQ(frame.sealed_session_key.to_hex(), test::golden_hex("fixture_sealed_key"));

    ReceiveVerdict verdict = baseline_receive(fx.merchant.priv(), frame);
    ASSERT_TRUE(verdict.accepted) << verdict.reason;
    EXPECT_EQ(verdict.plaintext, msg);
}

TEST(Baseline, ReceiveInvertsSendAcrossRandomMessages) {
    Fixture fx;
    DetRng rng(801);
    for (int i = 0; i < 50; ++i) {
        Bytes msg = rng.bytes(rng.below(200));
        HybridFrame frame = baseline_send(fx.cert, msg, 9000 + i);
        ReceiveVerdict verdict = baseline_receive(fx.merchant.priv(), frame);
        ASSERT_TRUE(verdict.accepted) << verdict.reason;
        EXPECT_EQ(verdict.plaintext, msg);
    }
}

TEST(Baseline, FreshKeyPerSeed) {
    Fixture fx;
    const Bytes msg = bytes_of("same plaintext");
    HybridFrame a = baseline_send(fx.cert, msg, 1);
    HybridFrame b = baseline_send(fx.cert, msg, 2);
    EXPECT_NE(a.sealed_session_key, b.sealed_session_key);
    EXPECT_NE(a.body, b.body);
}

TEST(Baseline, RandomSubstitutedKeyRejected) {
    Fixture fx;
    const Bytes msg = bytes_of("payment information");
    HybridFrame frame = baseline_send(fx.cert, msg, 77);
    DetRng rng(802);
    for (int i = 0; i < 100; ++i) {
        HybridFrame mauled = frame;
        mauled.sealed_session_key =
            rsa_encrypt_int(fx.cert.public_key, BigUint::random_bits(rng, 128));
        ReceiveVerdict verdict = baseline_receive(fx.merchant.priv(), mauled);
        EXPECT_FALSE(verdict.accepted);
    }
}

// Toy 8-bit instance, brute-forced over every possible key: after the sealed
// key is multiplied by enc(2), the receiver's truncated key equals the low 8
// bits of 2S, exactly and for every S. This is the attack's channel.
TEST(Baseline, ShiftedKeyVerdictMatchesBruteForceOnToyKeys) {
    RsaKeyPair merchant = keygen_rsa(31337, 64);
    CertificateAuthority ca(keygen_rsa(555, 256), HashAlgorithm::kMd5);
    Certificate cert = ca.issue(ParticipantId::kMerchant, merchant.pub());
    const Bytes msg = bytes_of("toy");
    const BigUint two_enc = rsa_encrypt_int(merchant.pub(), BigUint::from_u64(2));

    for (unsigned s = 0; s < 256; ++s) {
        const Bytes raw_key = {static_cast<std::uint8_t>(s)};
        HybridFrame frame = send_with_key(cert, raw_key, msg);

        HybridFrame shifted = frame;
        shifted.sealed_session_key =
            BigUint::mod_mul(frame.sealed_session_key, two_enc, merchant.n);

        // Receiver now operates with low8(2s); a body crafted under exactly
        // that key is accepted, any other guess is rejected.
        const std::uint8_t shifted_key = static_cast<std::uint8_t>(2 * s);
        HybridFrame probe = shifted;
        probe.body = sym_encrypt(transport_key({shifted_key}), craft_inner(msg));
        EXPECT_TRUE(baseline_receive(merchant.priv(), probe, 1).accepted) << s;

        probe.body = sym_encrypt(transport_key({static_cast<std::uint8_t>(shifted_key + 1)}),
                                 craft_inner(msg));
        EXPECT_FALSE(baseline_receive(merchant.priv(), probe, 1).accepted) << s;

        // And the original body survives the shift only when low8(2s) == s.
        EXPECT_EQ(baseline_receive(merchant.priv(), shifted, 1).accepted, shifted_key == s) << s;
    }
}

TEST(Baseline, EveryMessageCostsPublicKeyWorkOnBothEnds) {
    Fixture fx;
    const OpCounts before = op_snapshot();
    HybridFrame frame = baseline_send(fx.cert, bytes_of("m"), 5);
    ReceiveVerdict verdict = baseline_receive(fx.merchant.priv(), frame);
    ASSERT_TRUE(verdict.accepted);
    const OpCounts used = ops_since(before);
    EXPECT_GE(used.rsa_enc, 1u);
    EXPECT_GE(used.rsa_dec, 1u);
    EXPECT_GE(used.rsa_total(), 2u);
}

TEST(Baseline, VerdictDeterministicPerFrame) {
    Fixture fx;
    HybridFrame frame = baseline_send(fx.cert, bytes_of("deterministic"), 6);
    frame.body.back() ^= 1;
    ReceiveVerdict v1 = baseline_receive(fx.merchant.priv(), frame);
    ReceiveVerdict v2 = baseline_receive(fx.merchant.priv(), frame);
    EXPECT_EQ(v1.accepted, v2.accepted);
    EXPECT_EQ(v1.reason, v2.reason);
}

TEST(BaselineSession, TranscriptAndVerdictLog) {
    BaselineSession session(2026);
    session.send_message(bytes_of("order information"));
    session.send_message(bytes_of("payment information"));

    EXPECT_EQ(session.bus().transcript().count_type(MsgType::kBaselineHybrid), 2u);
    ASSERT_EQ(session.verdicts().size(), 2u);
    EXPECT_TRUE(session.verdicts()[0].accepted);
    EXPECT_TRUE(session.verdicts()[1].accepted);
}

}  // namespace
}  // namespace scmci::baseline
