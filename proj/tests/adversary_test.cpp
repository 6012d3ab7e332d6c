#include <gtest/gtest.h>

#include "scmci/adversary.hpp"
#include "support/golden.hpp"

namespace scmci::attack {
namespace {

proto::ScmciConfig scmci_config(std::uint64_t seed = 42) {
    proto::ScmciConfig cfg;
    cfg.seed = seed;
    return cfg;
}

TEST(Capture, BaselineRunYieldsOneCandidatePerMessage) {
    baseline::BaselineSession session(1);
    session.send_message(bytes_of("only message"));
    auto candidates = capture(session.bus().transcript());
    ASSERT_EQ(candidates.size(), 1u);
    EXPECT_EQ(candidates[0].type, MsgType::kBaselineHybrid);
    EXPECT_FALSE(candidates[0].body.empty());
}

TEST(Capture, ScmciPurchasePhaseCarriesNoSealedKeys) {
    proto::ProtocolRun run(scmci_config());
    ASSERT_TRUE(run.run_setup());
    const std::size_t setup_frames = run.bus().transcript().size();
    ASSERT_TRUE(run.run_purchase());

    std::vector<WireMessage> purchase_frames;
    for (std::size_t i = setup_frames; i < run.bus().transcript().size(); ++i)
        purchase_frames.push_back(run.bus().transcript()[i].msg);
    EXPECT_EQ(capture(purchase_frames).size(), 0u);
}

TEST(Capture, FullScmciTranscriptYieldsExactlyTheFiveEnvelopes) {
    proto::ProtocolRun run(scmci_config());
    ASSERT_TRUE(run.run_all().completed);
    auto candidates = capture(run.bus().transcript());
    ASSERT_EQ(candidates.size(), 5u);
    for (const auto& c : candidates) {
        EXPECT_EQ(c.type, MsgType::kEnvelope);
        EXPECT_TRUE(c.body.empty());
    }
}

// 8-bit toy instance, cross-checked by brute force over all 256 keys.
TEST(AttackCycle, ToyKeyRecoveredAndMatchesBruteForce) {
    RsaKeyPair merchant = keygen_rsa(31337, 64);
    CertificateAuthority ca(keygen_rsa(555, 256), HashAlgorithm::kMd5);
    Certificate cert = ca.issue(ParticipantId::kMerchant, merchant.pub());

    DetRng rng(909);
    const Bytes planted = rng.bytes(1);
    baseline::HybridFrame frame =
        baseline::send_with_key(cert, planted, bytes_of("toy message"));

    AttackState state = AttackState::for_target({0, MsgType::kBaselineHybrid,
                                                 frame.sealed_session_key, frame.body},
                                                merchant.pub(), 8);
    AttackOutcome outcome = run_attack_cycle(state, baseline_oracle(merchant.priv(), 1));

    ASSERT_TRUE(outcome.recovered);
    EXPECT_LE(outcome.query_count, 10u);
    EXPECT_EQ(outcome.recovered_key, planted);

    // Brute-force oracle: the unique key whose decryption of the captured
    // body parses must be the planted one.
    std::vector<unsigned> valid_keys;
    for (unsigned k = 0; k < 256; ++k) {
        Bytes raw = {static_cast<std::uint8_t>(k)};
        try {
            Bytes plain = sym_decrypt(baseline::transport_key(raw), frame.body);
            if (baseline::parse_inner(plain)) valid_keys.push_back(k);
        } catch (const MalformedCiphertext&) {
        }
    }
    ASSERT_EQ(valid_keys.size(), 1u);
    EXPECT_EQ(valid_keys[0], planted[0]);
}

TEST(AttackCycle, QueryBoundHoldsAcrossKeySizes) {
    RsaKeyPair merchant = keygen_rsa(2222, 512);
    CertificateAuthority ca(keygen_rsa(555, 256), HashAlgorithm::kMd5);
    Certificate cert = ca.issue(ParticipantId::kMerchant, merchant.pub());

    for (std::size_t key_bits : {8u, 16u, 32u, 64u, 128u}) {
        DetRng rng(1000 + key_bits);
        const Bytes planted = rng.bytes(key_bits / 8);
        baseline::HybridFrame frame =
            baseline::send_with_key(cert, planted, bytes_of("bounded"));

        AttackState state = AttackState::for_target({0, MsgType::kBaselineHybrid,
                                                     frame.sealed_session_key, frame.body},
                                                    merchant.pub(), key_bits);
        AttackOutcome outcome =
            run_attack_cycle(state, baseline_oracle(merchant.priv(), key_bits / 8));

        ASSERT_TRUE(outcome.recovered) << key_bits << " bits";
        EXPECT_LE(outcome.query_count, key_bits + 2) << key_bits << " bits";
        EXPECT_EQ(outcome.budget, key_bits + 2);
        EXPECT_EQ(outcome.recovered_key, planted) << key_bits << " bits";
    }
}

TEST(AttackCycle, RecoveredKeyReproducesHonestPlaintext) {
    RsaKeyPair merchant = keygen_rsa(2223, 512);
    CertificateAuthority ca(keygen_rsa(555, 256), HashAlgorithm::kMd5);
    Certificate cert = ca.issue(ParticipantId::kMerchant, merchant.pub());
    const Bytes msg = bytes_of("the secret order");
    baseline::HybridFrame frame = baseline::baseline_send(cert, msg, 4711);

    auto candidates = capture(std::vector<WireMessage>{});
    AttackState state = AttackState::for_target({0, MsgType::kBaselineHybrid,
                                                 frame.sealed_session_key, frame.body},
                                                merchant.pub(), 128);
    AttackOutcome outcome = run_attack_cycle(state, baseline_oracle(merchant.priv()));
    ASSERT_TRUE(outcome.recovered);

    Bytes plain = sym_decrypt(baseline::transport_key(outcome.recovered_key), frame.body);
    auto payload = baseline::parse_inner(plain);
    ASSERT_TRUE(payload.has_value());
    EXPECT_EQ(*payload, msg);
}

TEST(AttackCycle, FixtureSessionKeyRecoveredWithin130Queries) {
    RsaKeyPair merchant = keygen_rsa(4242, 512);
    CertificateAuthority ca(keygen_rsa(555, 256), HashAlgorithm::kMd5);
    Certificate cert = ca.issue(ParticipantId::kMerchant, merchant.pub());
    const Bytes planted = test::golden_bytes("fixture_session_key");
    baseline::HybridFrame frame = baseline::send_with_key(cert, planted, bytes_of("hybrid file"));

    AttackState state = AttackState::for_target({0, MsgType::kBaselineHybrid,
                                                 frame.sealed_session_key, frame.body},
                                                merchant.pub(), 128);
    AttackOutcome outcome = run_attack_cycle(state, baseline_oracle(merchant.priv()));
    ASSERT_TRUE(outcome.recovered);
    EXPECT_EQ(outcome.recovered_key, planted);
    EXPECT_LE(outcome.query_count, 130u);
    EXPECT_EQ(outcome.query_count, 130u);  // control + 128 bit probes + verification
}

TEST(AttackCycle, BudgetExhaustionReported) {
    RsaKeyPair merchant = keygen_rsa(2224, 512);
    CertificateAuthority ca(keygen_rsa(555, 256), HashAlgorithm::kMd5);
    Certificate cert = ca.issue(ParticipantId::kMerchant, merchant.pub());
    DetRng rng(11);
    baseline::HybridFrame frame =
        baseline::send_with_key(cert, rng.bytes(2), bytes_of("short budget"));

    AttackState state = AttackState::for_target({0, MsgType::kBaselineHybrid,
                                                 frame.sealed_session_key, frame.body},
                                                merchant.pub(), 16);
    state.budget = 5;  // far below the 18 queries a 16-bit key needs
    AttackOutcome outcome = run_attack_cycle(state, baseline_oracle(merchant.priv(), 2));
    EXPECT_FALSE(outcome.recovered);
    EXPECT_EQ(outcome.reason, FailReason::kBudgetExhausted);
    EXPECT_LE(outcome.query_count, 5u);
}

TEST(AttackCycle, RejectsUndersizedModulus) {
    RsaKeyPair merchant = keygen_rsa(31337, 64);
    AttackState state = AttackState::for_target({0, MsgType::kBaselineHybrid, BigUint{}, {}},
                                                merchant.pub(), 128);
    EXPECT_THROW(run_attack_cycle(state, baseline_oracle(merchant.priv())),
                 std::invalid_argument);
}

TEST(AttackCycle, ScmciSetupEnvelopeGivesNoIterativeOracle) {
    proto::ScmciConfig cfg = scmci_config();
    proto::ProtocolRun run(cfg);
    ASSERT_TRUE(run.run_all().completed);

    auto candidates = capture(run.bus().transcript());
    ASSERT_EQ(candidates.size(), 5u);

    ScmciSetupOracle oracle(cfg, KeyId::kSk1);  // SK1 envelope is candidate 0
    AttackState state = AttackState::for_target(
        candidates[0], run.customer().rsa().pub(), cfg.sym_key_len * 8);
    AttackOutcome outcome = run_attack_cycle(state, oracle.oracle());

    EXPECT_FALSE(outcome.recovered);
    EXPECT_EQ(outcome.reason, FailReason::kNoIterativeOracle);
    EXPECT_LE(outcome.query_count, outcome.budget);
    EXPECT_EQ(oracle.sessions_aborted(), 1u);

    // A subsequent honest session is unaffected.
    proto::ProtocolRun rerun(cfg);
    EXPECT_TRUE(rerun.run_all().completed);
}

TEST(AttackCycle, MaskedSealingAlsoDefeatsTheCampaign) {
    proto::ScmciConfig cfg = scmci_config();
    cfg.sealing = SealingMode::kMasked;
    proto::ProtocolRun run(cfg);
    ASSERT_TRUE(run.run_setup());
    auto candidates = capture(run.bus().transcript());
    ASSERT_EQ(candidates.size(), 5u);

    ScmciSetupOracle oracle(cfg, KeyId::kSk1);
    AttackState state = AttackState::for_target(
        candidates[0], run.customer().rsa().pub(), cfg.sym_key_len * 8);
    AttackOutcome outcome = run_attack_cycle(state, oracle.oracle());
    EXPECT_FALSE(outcome.recovered);
    EXPECT_EQ(outcome.reason, FailReason::kNoIterativeOracle);
}

TEST(Replay, StaleSequenceStopsInSessionReplay) {
    proto::ProtocolRun run(scmci_config());
    ASSERT_TRUE(run.run_all().completed);
    WireMessage purchase;
    for (const auto& e : run.bus().transcript().entries())
        if (e.msg.msg_type == MsgType::kPurchase) purchase = e.msg;

    EXPECT_EQ(replay_attack(run, purchase), ReplayOutcome::kRejectedStaleSequence);
}

TEST(Replay, FreshSessionRejectsForeignBundleOnIntegrity) {
    proto::ProtocolRun session_a(scmci_config(42));
    ASSERT_TRUE(session_a.run_all().completed);
    WireMessage purchase;
    for (const auto& e : session_a.bus().transcript().entries())
        if (e.msg.msg_type == MsgType::kPurchase) purchase = e.msg;

    proto::ProtocolRun session_b(scmci_config(1234));
    ASSERT_TRUE(session_b.run_setup());
    EXPECT_EQ(replay_attack(session_b, purchase), ReplayOutcome::kRejectedIntegrity);
}

TEST(Replay, BaselineReceiverAcceptsExactCopy) {
    baseline::BaselineSession session(5150);
    baseline::HybridFrame frame = session.send_message(bytes_of("pay me"));
    EXPECT_EQ(replay_attack(session, frame), ReplayOutcome::kAccepted);
    ASSERT_EQ(session.verdicts().size(), 2u);
    EXPECT_TRUE(session.verdicts()[1].accepted);
}

}  // namespace
}  // namespace scmci::attack
