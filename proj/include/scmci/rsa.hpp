// Textbook RSA over BigUint: unpadded modular exponentiation, kept
// deliberately malleable so chosen-ciphertext behaviour can be studied.
// Key generation is a deterministic function of the seed.
#pragma once

#include <cstdint>
#include <stdexcept>

#include "scmci/bigint.hpp"
#include "scmci/digest.hpp"
#include "scmci/ops.hpp"
#include "scmci/rng.hpp"

namespace scmci {

struct RsaPublicKey {
    BigUint n;
    BigUint e;

    bool operator==(const RsaPublicKey&) const = default;
};

struct RsaPrivateKey {
    BigUint n;
    BigUint d;
};

struct RsaKeyPair {
    BigUint n;
    BigUint e;
    BigUint d;
    unsigned bit_length = 0;

    RsaPublicKey pub() const { return {n, e}; }
    RsaPrivateKey priv() const { return {n, d}; }
};

class InputTooLarge : public std::runtime_error {
public:
    explicit InputTooLarge(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr std::uint64_t kDefaultPublicExponent = 0x010001;

inline RsaKeyPair keygen_rsa(std::uint64_t rng_seed, unsigned bit_length) {
    if (bit_length < 64 || bit_length > 2048 || bit_length % 2 != 0)
        throw std::invalid_argument("rsa bit length must be even and within [64, 2048]");
    DetRng rng(sub_seed(rng_seed, "rsa-keygen"));
    const BigUint e = BigUint::from_u64(kDefaultPublicExponent);
    const BigUint one = BigUint::from_u64(1);
    for (;;) {
        BigUint p = BigUint::random_prime(rng, bit_length / 2);
        BigUint q = BigUint::random_prime(rng, bit_length / 2);
        if (p == q) continue;
        BigUint n = p * q;
        if (n.bit_length() != bit_length) continue;
        BigUint p1 = p - one, q1 = q - one;
        BigUint lambda = (p1 * q1) / BigUint::gcd(p1, q1);
        if (!BigUint::gcd(e, lambda).is_one()) continue;
        BigUint d = BigUint::mod_inverse(e, lambda);
        if (d.is_zero()) continue;
        // Sanity round-trip with a probe value before accepting the pair.
        const BigUint probe = BigUint::from_u64(0x42);
        if (BigUint::mod_pow(BigUint::mod_pow(probe, e, n), d, n) != probe) continue;
        return RsaKeyPair{std::move(n), e, std::move(d), bit_length};
    }
}

inline BigUint rsa_encrypt_int(const RsaPublicKey& pub, const BigUint& m) {
    if (m >= pub.n) throw InputTooLarge("rsa plaintext >= modulus");
    ++op_counts().rsa_enc;
    return BigUint::mod_pow(m, pub.e, pub.n);
}

inline BigUint rsa_decrypt_int(const RsaPrivateKey& priv, const BigUint& c) {
    if (c >= priv.n) throw InputTooLarge("rsa ciphertext >= modulus");
    ++op_counts().rsa_dec;
    return BigUint::mod_pow(c, priv.d, priv.n);
}

// Signature = digest (reduced mod n) raised to the private exponent; the
// reduction keeps toy moduli smaller than the digest usable.
inline BigUint rsa_sign_digest(const RsaPrivateKey& priv, const Digest& digest) {
    ++op_counts().rsa_dec;
    const BigUint m = BigUint::from_bytes_be(digest.bytes) % priv.n;
    return BigUint::mod_pow(m, priv.d, priv.n);
}

inline bool rsa_verify_digest(const RsaPublicKey& pub, const Digest& digest, const BigUint& sig) {
    if (sig >= pub.n) return false;
    ++op_counts().rsa_enc;
    const BigUint m = BigUint::from_bytes_be(digest.bytes) % pub.n;
    return BigUint::mod_pow(sig, pub.e, pub.n) == m;
}

}  // namespace scmci
