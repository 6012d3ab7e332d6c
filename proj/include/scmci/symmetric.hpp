// Session keys SK1..SK5 and the symmetric transport cipher.
//
// The cipher is AES in zero-IV CBC chaining with an in-band pad record: the
// first plaintext byte stores the pad length, pad bytes each repeat that
// length, so ciphertext length = plaintext length + pad + 1 header byte and
// decryption recovers the exact original length. Encryption is a pure
// function of (key, plaintext) — no fresh IV — because analysis runs must
// reproduce ciphertext streams byte-for-byte across reruns. Analysis-grade
// by intent, not a confidentiality-grade mode.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "scmci/aes.hpp"
#include "scmci/bytes.hpp"
#include "scmci/ops.hpp"
#include "scmci/participants.hpp"
#include "scmci/rng.hpp"

namespace scmci {

enum class KeyId : std::uint8_t { kSk1 = 1, kSk2 = 2, kSk3 = 3, kSk4 = 4, kSk5 = 5 };

inline const char* key_name(KeyId id) {
    switch (id) {
        case KeyId::kSk1: return "SK1";
        case KeyId::kSk2: return "SK2";
        case KeyId::kSk3: return "SK3";
        case KeyId::kSk4: return "SK4";
        case KeyId::kSk5: return "SK5";
    }
    return "?";
}

// Fixed key-to-pair assignment; no other pairing is valid.
inline ParticipantPair key_pair(KeyId id) {
    switch (id) {
        case KeyId::kSk1: return {ParticipantId::kCustomer, ParticipantId::kMerchant};
        case KeyId::kSk2: return {ParticipantId::kMerchant, ParticipantId::kGateway};
        case KeyId::kSk3: return {ParticipantId::kCustomerBank, ParticipantId::kGateway};
        case KeyId::kSk4: return {ParticipantId::kMerchantBank, ParticipantId::kGateway};
        case KeyId::kSk5: return {ParticipantId::kCustomer, ParticipantId::kGateway};
    }
    throw std::invalid_argument("bad key id");
}

struct SymmetricKey {
    KeyId key_id = KeyId::kSk1;
    ParticipantPair pair{ParticipantId::kCustomer, ParticipantId::kMerchant};
    Bytes bytes;  // 16, 24 or 32

    bool operator==(const SymmetricKey&) const = default;
};

inline SymmetricKey keygen_symmetric(std::uint64_t rng_seed, KeyId key_id, ParticipantPair pair,
                                     std::size_t key_len = 16) {
    if (key_len != 16 && key_len != 24 && key_len != 32)
        throw std::invalid_argument("symmetric key length must be 16, 24 or 32 bytes");
    if (!(pair == key_pair(key_id)))
        throw std::invalid_argument(std::string(key_name(key_id)) + " is not the key for pair " +
                                    pair.name());
    DetRng rng(sub_seed(rng_seed, key_name(key_id)));
    SymmetricKey key;
    key.key_id = key_id;
    key.pair = pair;
    key.bytes = rng.bytes(key_len);
    return key;
}

class MalformedCiphertext : public std::runtime_error {
public:
    explicit MalformedCiphertext(const std::string& what) : std::runtime_error(what) {}
};

inline Bytes sym_encrypt(const SymmetricKey& key, std::span<const std::uint8_t> plaintext) {
    ++op_counts().sym_enc;
    constexpr std::size_t kBlock = AesBlockCipher::kBlockSize;
    const std::size_t pad = (kBlock - (plaintext.size() + 1) % kBlock) % kBlock;

    Bytes buf;
    buf.reserve(plaintext.size() + 1 + pad);
    buf.push_back(static_cast<std::uint8_t>(pad));
    append(buf, plaintext);
    buf.insert(buf.end(), pad, static_cast<std::uint8_t>(pad));

    AesBlockCipher cipher(key.bytes);
    Bytes out(buf.size());
    std::uint8_t chain[kBlock] = {0};  // zero IV
    for (std::size_t off = 0; off < buf.size(); off += kBlock) {
        std::uint8_t block[kBlock];
        for (std::size_t i = 0; i < kBlock; ++i) block[i] = buf[off + i] ^ chain[i];
        cipher.encrypt_block(block, out.data() + off);
        std::copy(out.data() + off, out.data() + off + kBlock, chain);
    }
    return out;
}

inline Bytes sym_decrypt(const SymmetricKey& key, std::span<const std::uint8_t> ciphertext) {
    ++op_counts().sym_dec;
    constexpr std::size_t kBlock = AesBlockCipher::kBlockSize;
    if (ciphertext.empty() || ciphertext.size() % kBlock != 0)
        throw MalformedCiphertext("ciphertext length not a positive multiple of the block size");

    AesBlockCipher cipher(key.bytes);
    Bytes buf(ciphertext.size());
    std::uint8_t chain[kBlock] = {0};
    for (std::size_t off = 0; off < ciphertext.size(); off += kBlock) {
        std::uint8_t block[kBlock];
        cipher.decrypt_block(ciphertext.data() + off, block);
        for (std::size_t i = 0; i < kBlock; ++i) buf[off + i] = block[i] ^ chain[i];
        std::copy(ciphertext.begin() + off, ciphertext.begin() + off + kBlock, chain);
    }

    const std::uint8_t pad = buf[0];
    if (pad >= kBlock) throw MalformedCiphertext("invalid pad header");
    if (buf.size() < 1u + pad) throw MalformedCiphertext("pad exceeds message");
    for (std::size_t i = 0; i < pad; ++i) {
        if (buf[buf.size() - 1 - i] != pad) throw MalformedCiphertext("pad bytes corrupted");
    }
    return Bytes(buf.begin() + 1, buf.end() - pad);
}

}  // namespace scmci
