// Digital envelopes: a session key sealed under the recipient's public key.
// Key-id/pair metadata travels beside the sealed integer, never inside it.
//
// Two sealing modes: kTextbook (raw RSA of the key integer — the default the
// rest of the protocol assumes) and kMasked (an all-or-nothing masked
// encoding whose structure check makes any ciphertext mauling unrecoverable
// at open time).
#pragma once

#include <optional>
#include <stdexcept>

#include "scmci/bytes.hpp"
#include "scmci/certificate.hpp"
#include "scmci/digest.hpp"
#include "scmci/rng.hpp"
#include "scmci/rsa.hpp"
#include "scmci/symmetric.hpp"

namespace scmci {

class KeyTooLargeForModulus : public std::runtime_error {
public:
    explicit KeyTooLargeForModulus(const std::string& what) : std::runtime_error(what) {}
};

class WrongRecipient : public std::runtime_error {
public:
    explicit WrongRecipient(const std::string& what) : std::runtime_error(what) {}
};

enum class SealingMode : std::uint8_t { kTextbook = 0, kMasked = 1 };

struct DigitalEnvelope {
    ParticipantId recipient = ParticipantId::kCustomer;
    KeyId key_id = KeyId::kSk1;
    ParticipantPair pair{ParticipantId::kCustomer, ParticipantId::kMerchant};
    std::uint8_t key_len = 16;
    SealingMode mode = SealingMode::kTextbook;
    BigUint sealed_key;

    Bytes encode() const {
        Bytes out;
        out.push_back(static_cast<std::uint8_t>(recipient));
        out.push_back(static_cast<std::uint8_t>(key_id));
        out.push_back(static_cast<std::uint8_t>(pair.first));
        out.push_back(static_cast<std::uint8_t>(pair.second));
        out.push_back(key_len);
        out.push_back(static_cast<std::uint8_t>(mode));
        Bytes sealed = sealed_key.to_bytes_be();
        put_blob(out, sealed);
        return out;
    }

    static DigitalEnvelope decode(std::span<const std::uint8_t> bytes) {
        ByteReader r(bytes);
        DigitalEnvelope env;
        env.recipient = participant_from_byte(r.u8());
        env.key_id = static_cast<KeyId>(r.u8());
        env.pair.first = participant_from_byte(r.u8());
        env.pair.second = participant_from_byte(r.u8());
        env.key_len = r.u8();
        env.mode = static_cast<SealingMode>(r.u8());
        env.sealed_key = BigUint::from_bytes_be(r.blob());
        return env;
    }
};

namespace envelope_detail {

inline Bytes mgf1(std::span<const std::uint8_t> seed, std::size_t out_len, HashAlgorithm alg) {
    Bytes out;
    std::uint32_t counter = 0;
    while (out.size() < out_len) {
        Bytes block(seed.begin(), seed.end());
        put_u32_be(block, counter++);
        append(out, hash(alg, block).bytes);
    }
    out.resize(out_len);
    return out;
}

inline Bytes label_hash(HashAlgorithm alg) {
    return hash(alg, bytes_of("scmci-envelope")).bytes;
}

}  // namespace envelope_detail

inline DigitalEnvelope seal_envelope(const Certificate& recipient_cert, const SymmetricKey& key,
                                     SealingMode mode = SealingMode::kTextbook,
                                     DetRng* rng = nullptr) {
    DigitalEnvelope env;
    env.recipient = recipient_cert.subject;
    env.key_id = key.key_id;
    env.pair = key.pair;
    env.key_len = static_cast<std::uint8_t>(key.bytes.size());
    env.mode = mode;

    if (mode == SealingMode::kTextbook) {
        const BigUint m = BigUint::from_bytes_be(key.bytes);
        if (m >= recipient_cert.public_key.n)
            throw KeyTooLargeForModulus("session key does not fit under recipient modulus");
        env.sealed_key = rsa_encrypt_int(recipient_cert.public_key, m);
        return env;
    }

    // Masked mode: em = 0x00 || masked_seed || masked_db,
    // db = lhash || 0x01 || key bytes.
    const HashAlgorithm alg = HashAlgorithm::kMd5;
    const std::size_t hlen = digest_size(alg);
    const std::size_t n_len = (recipient_cert.public_key.n.bit_length() + 7) / 8;
    if (n_len < 2 + hlen + hlen + 1 + key.bytes.size())
        throw KeyTooLargeForModulus("modulus too small for masked envelope encoding");
    if (rng == nullptr) throw std::invalid_argument("masked sealing needs an rng");

    Bytes db = envelope_detail::label_hash(alg);
    db.resize(n_len - 1 - hlen - key.bytes.size() - 1, 0);
    db.push_back(0x01);
    append(db, key.bytes);

    Bytes seed = rng->bytes(hlen);
    Bytes db_mask = envelope_detail::mgf1(seed, db.size(), alg);
    for (std::size_t i = 0; i < db.size(); ++i) db[i] ^= db_mask[i];
    Bytes seed_mask = envelope_detail::mgf1(db, hlen, alg);
    for (std::size_t i = 0; i < hlen; ++i) seed[i] ^= seed_mask[i];

    Bytes em;
    em.push_back(0x00);
    append(em, seed);
    append(em, db);
    env.sealed_key = rsa_encrypt_int(recipient_cert.public_key, BigUint::from_bytes_be(em));
    return env;
}

inline SymmetricKey open_envelope(const RsaPrivateKey& priv, const DigitalEnvelope& env) {
    if (env.key_len != 16 && env.key_len != 24 && env.key_len != 32)
        throw WrongRecipient("declared key length invalid");
    BigUint opened;
    try {
        opened = rsa_decrypt_int(priv, env.sealed_key);
    } catch (const InputTooLarge&) {
        throw WrongRecipient("sealed value out of range for this key");
    }

    SymmetricKey key;
    key.key_id = env.key_id;
    key.pair = env.pair;

    if (env.mode == SealingMode::kTextbook) {
        // Strict length check: a value wider than the declared key length
        // means the envelope was not sealed for this private key.
        if (opened.bit_length() > std::size_t(env.key_len) * 8)
            throw WrongRecipient("opened key fails its length check");
        key.bytes = opened.to_bytes_be(env.key_len);
        return key;
    }

    const HashAlgorithm alg = HashAlgorithm::kMd5;
    const std::size_t hlen = digest_size(alg);
    const std::size_t n_len = (priv.n.bit_length() + 7) / 8;
    Bytes em = opened.to_bytes_be(n_len);
    if (em.size() != n_len || em[0] != 0x00) throw WrongRecipient("masked envelope frame invalid");

    Bytes seed(em.begin() + 1, em.begin() + 1 + hlen);
    Bytes db(em.begin() + 1 + hlen, em.end());
    Bytes seed_mask = envelope_detail::mgf1(db, hlen, alg);
    for (std::size_t i = 0; i < hlen; ++i) seed[i] ^= seed_mask[i];
    Bytes db_mask = envelope_detail::mgf1(seed, db.size(), alg);
    for (std::size_t i = 0; i < db.size(); ++i) db[i] ^= db_mask[i];

    Bytes lhash = envelope_detail::label_hash(alg);
    if (db.size() < hlen + 1 + env.key_len) throw WrongRecipient("masked envelope too short");
    if (!std::equal(lhash.begin(), lhash.end(), db.begin()))
        throw WrongRecipient("masked envelope label mismatch");
    const std::size_t key_start = db.size() - env.key_len;
    for (std::size_t i = hlen; i + 1 < key_start; ++i) {
        if (db[i] != 0) throw WrongRecipient("masked envelope padding corrupted");
    }
    if (db[key_start - 1] != 0x01) throw WrongRecipient("masked envelope separator missing");
    key.bytes.assign(db.begin() + key_start, db.end());
    return key;
}

}  // namespace scmci
