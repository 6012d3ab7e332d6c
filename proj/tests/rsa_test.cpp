#include <gtest/gtest.h>

#include "scmci/certificate.hpp"
#include "scmci/envelope.hpp"
#include "scmci/rsa.hpp"
#include "support/golden.hpp"

namespace scmci {
namespace {

RsaKeyPair fixture_pair() {
    RsaKeyPair kp;
    kp.n = BigUint::from_hex(test::golden_hex("fixture_rsa_n"));
    kp.e = BigUint::from_hex(test::golden_hex("fixture_rsa_e"));
    kp.d = BigUint::from_hex(test::golden_hex("fixture_rsa_d"));
    kp.bit_length = 512;
    return kp;
}

SymmetricKey fixture_session_key() {
    SymmetricKey k;
    k.key_id = KeyId::kSk1;
    k.pair = key_pair(KeyId::kSk1);
    k.bytes = test::golden_bytes("fixture_session_key");
    return k;
}

TEST(Rsa, ToyVectorFromOracle) {
    RsaPublicKey pub{BigUint::from_hex(test::golden_hex("rsa_toy_n")),
                     BigUint::from_hex(test::golden_hex("rsa_toy_e"))};
    RsaPrivateKey priv{pub.n, BigUint::from_hex(test::golden_hex("rsa_toy_d"))};
    const BigUint m = BigUint::from_hex(test::golden_hex("rsa_toy_m"));
    const BigUint c = BigUint::from_hex(test::golden_hex("rsa_toy_c"));
    EXPECT_EQ(rsa_encrypt_int(pub, m), c);
    EXPECT_EQ(rsa_decrypt_int(priv, c), m);
}

TEST(Rsa, TextbookFixedPoints) {
    RsaKeyPair kp = fixture_pair();
    EXPECT_EQ(rsa_encrypt_int(kp.pub(), BigUint{}), BigUint{});
    EXPECT_EQ(rsa_encrypt_int(kp.pub(), BigUint::from_u64(1)), BigUint::from_u64(1));
}

TEST(Rsa, MultiplicativityHoldsExactly) {
    RsaKeyPair kp = fixture_pair();
    DetRng rng(505);
    for (int i = 0; i < 40; ++i) {
        BigUint a = BigUint::random_below(rng, kp.n);
        BigUint b = BigUint::random_below(rng, kp.n);
        BigUint lhs = BigUint::mod_mul(rsa_encrypt_int(kp.pub(), a), rsa_encrypt_int(kp.pub(), b),
                                       kp.n);
        BigUint rhs = rsa_encrypt_int(kp.pub(), BigUint::mod_mul(a, b, kp.n));
        EXPECT_EQ(lhs, rhs);
    }
}

TEST(Rsa, InputTooLargeRejected) {
    RsaKeyPair kp = fixture_pair();
    EXPECT_THROW(rsa_encrypt_int(kp.pub(), kp.n), InputTooLarge);
    EXPECT_THROW(rsa_decrypt_int(kp.priv(), kp.n + BigUint::from_u64(1)), InputTooLarge);
}

TEST(Rsa, KeygenDeterministicAndPinnedToGolden) {
    RsaKeyPair kp = keygen_rsa(4242, 512);
    EXPECT_EQ(kp.n.to_hex(), fixture_pair().n.to_hex());
    EXPECT_EQ(kp.d.to_hex(), fixture_pair().d.to_hex());
    EXPECT_EQ(kp.e.to_u64(), kDefaultPublicExponent);
    EXPECT_EQ(kp.n.bit_length(), 512u);

    RsaKeyPair other = keygen_rsa(4243, 512);
    EXPECT_NE(other.n, kp.n);
}

TEST(Rsa, RoundTripHundredProbes) {
    RsaKeyPair kp = keygen_rsa(99, 256);
    DetRng rng(1);
    for (int i = 0; i < 100; ++i) {
        BigUint m = BigUint::random_below(rng, kp.n);
        EXPECT_EQ(rsa_decrypt_int(kp.priv(), rsa_encrypt_int(kp.pub(), m)), m);
    }
}

TEST(Rsa, SmallToyKeySupported) {
    RsaKeyPair kp = keygen_rsa(7, 64);
    EXPECT_EQ(kp.n.bit_length(), 64u);
    EXPECT_EQ(kp.e.to_u64(), kDefaultPublicExponent);
    BigUint m = BigUint::from_u64(123456789);
    EXPECT_EQ(rsa_decrypt_int(kp.priv(), rsa_encrypt_int(kp.pub(), m)), m);
}

TEST(Rsa, SignVerifyDigest) {
    RsaKeyPair kp = fixture_pair();
    Digest d = hash(HashAlgorithm::kMd5, bytes_of("authorization response"));
    BigUint sig = rsa_sign_digest(kp.priv(), d);
    EXPECT_TRUE(rsa_verify_digest(kp.pub(), d, sig));

    Digest other = hash(HashAlgorithm::kMd5, bytes_of("tampered response"));
    EXPECT_FALSE(rsa_verify_digest(kp.pub(), other, sig));
    EXPECT_FALSE(rsa_verify_digest(kp.pub(), d, sig + BigUint::from_u64(1)));
}

TEST(Certificate, IssueVerifyAndTamper) {
    RsaKeyPair ca_kp = keygen_rsa(1001, 512);
    RsaKeyPair subj_kp = keygen_rsa(1002, 512);
    CertificateAuthority ca(ca_kp, HashAlgorithm::kMd5);

    Certificate cert = ca.issue(ParticipantId::kMerchant, subj_kp.pub());
    EXPECT_TRUE(verify_certificate(ca.root_key(), HashAlgorithm::kMd5, cert));

    Certificate bad_subject = cert;
    bad_subject.subject = ParticipantId::kCustomer;
    EXPECT_FALSE(verify_certificate(ca.root_key(), HashAlgorithm::kMd5, bad_subject));

    Certificate bad_key = cert;
    bad_key.public_key.n = bad_key.public_key.n + BigUint::from_u64(2);
    EXPECT_FALSE(verify_certificate(ca.root_key(), HashAlgorithm::kMd5, bad_key));

    Certificate bad_sig = cert;
    bad_sig.ca_signature = bad_sig.ca_signature + BigUint::from_u64(1);
    EXPECT_FALSE(verify_certificate(ca.root_key(), HashAlgorithm::kMd5, bad_sig));

    Certificate decoded = Certificate::decode(cert.encode());
    EXPECT_TRUE(verify_certificate(ca.root_key(), HashAlgorithm::kMd5, decoded));
}

Certificate self_cert(ParticipantId subject, const RsaKeyPair& kp) {
    CertificateAuthority ca(keygen_rsa(555, 256), HashAlgorithm::kMd5);
    return ca.issue(subject, kp.pub());
}

TEST(Envelope, RoundTripPreservesKeyAndMetadata) {
    RsaKeyPair kp = keygen_rsa(2024, 512);
    Certificate cert = self_cert(ParticipantId::kCustomer, kp);
    SymmetricKey sk = keygen_symmetric(42, KeyId::kSk1, key_pair(KeyId::kSk1));

    DigitalEnvelope env = seal_envelope(cert, sk);
    SymmetricKey opened = open_envelope(kp.priv(), env);
    EXPECT_EQ(opened, sk);

    DigitalEnvelope decoded = DigitalEnvelope::decode(env.encode());
    EXPECT_EQ(open_envelope(kp.priv(), decoded), sk);
}

TEST(Envelope, LeadingZeroKeyBytesSurviveRoundTrip) {
    RsaKeyPair kp = keygen_rsa(2025, 512);
    Certificate cert = self_cert(ParticipantId::kCustomer, kp);
    SymmetricKey sk = fixture_session_key();
    sk.bytes[0] = 0x00;
    sk.bytes[1] = 0x00;
    DigitalEnvelope env = seal_envelope(cert, sk);
    EXPECT_EQ(open_envelope(kp.priv(), env).bytes, sk.bytes);
}

TEST(Envelope, GoldenSealedValueForFixtureKey) {
    RsaKeyPair kp = fixture_pair();
    Certificate cert = self_cert(ParticipantId::kMerchant, kp);
    DigitalEnvelope env = seal_envelope(cert, fixture_session_key());
    EXPECT_EQ(env.sealed_key.to_hex(), test::golden_hex("fixture_sealed_key"));
    EXPECT_EQ(open_envelope(kp.priv(), env).bytes, test::golden_bytes("fixture_session_key"));
}

TEST(Envelope, KeyTooLargeForToyModulus) {
    RsaKeyPair kp = keygen_rsa(7, 64);
    Certificate cert = self_cert(ParticipantId::kCustomer, kp);
    SymmetricKey sk = fixture_session_key();  // 128-bit key, 64-bit modulus
    EXPECT_THROW(seal_envelope(cert, sk), KeyTooLargeForModulus);
}

TEST(Envelope, WrongRecipientFailsLengthCheck) {
    RsaKeyPair right = keygen_rsa(3001, 512);
    RsaKeyPair wrong = keygen_rsa(3002, 512);
    Certificate cert = self_cert(ParticipantId::kCustomer, right);
    DigitalEnvelope env = seal_envelope(cert, fixture_session_key());
    EXPECT_THROW(open_envelope(wrong.priv(), env), WrongRecipient);
}

TEST(Envelope, MaskedModeRoundTripAndTamperRejection) {
    RsaKeyPair kp = keygen_rsa(4001, 512);
    Certificate cert = self_cert(ParticipantId::kCustomer, kp);
    SymmetricKey sk = fixture_session_key();
    DetRng rng(88);

    DigitalEnvelope env = seal_envelope(cert, sk, SealingMode::kMasked, &rng);
    EXPECT_EQ(open_envelope(kp.priv(), env), sk);

    // Any mauling of the sealed integer breaks the masked structure check.
    DetRng tamper_rng(89);
    for (int i = 0; i < 20; ++i) {
        DigitalEnvelope bad = env;
        bad.sealed_key = BigUint::mod_mul(
            bad.sealed_key,
            rsa_encrypt_int(kp.pub(), BigUint::from_u64(2 + tamper_rng.below(1000))), kp.n);
        EXPECT_THROW(open_envelope(kp.priv(), bad), WrongRecipient) << i;
    }
}

TEST(Envelope, MaskedModeNeedsRoomAndRng) {
    RsaKeyPair kp = keygen_rsa(7, 64);
    Certificate cert = self_cert(ParticipantId::kCustomer, kp);
    SymmetricKey sk = keygen_symmetric(42, KeyId::kSk1, key_pair(KeyId::kSk1));
    DetRng rng(1);
    EXPECT_THROW(seal_envelope(cert, sk, SealingMode::kMasked, &rng), KeyTooLargeForModulus);

    RsaKeyPair big = keygen_rsa(4001, 512);
    Certificate big_cert = self_cert(ParticipantId::kCustomer, big);
    EXPECT_THROW(seal_envelope(big_cert, sk, SealingMode::kMasked, nullptr),
                 std::invalid_argument);
}

}  // namespace
}  // namespace scmci
