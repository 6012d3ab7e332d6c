// Identity certificates: a participant's public key signed by the CA.
// Flat binary encoding; any field change breaks the signature.
#pragma once

#include <stdexcept>

#include "scmci/bytes.hpp"
#include "scmci/digest.hpp"
#include "scmci/participants.hpp"
#include "scmci/rsa.hpp"

namespace scmci {

class CertificateInvalid : public std::runtime_error {
public:
    explicit CertificateInvalid(const std::string& what) : std::runtime_error(what) {}
};

struct Certificate {
    ParticipantId subject = ParticipantId::kCustomer;
    RsaPublicKey public_key;
    BigUint ca_signature;

    Bytes signed_fields() const {
        Bytes out;
        out.push_back(static_cast<std::uint8_t>(subject));
        Bytes n_bytes = public_key.n.to_bytes_be();
        Bytes e_bytes = public_key.e.to_bytes_be();
        put_blob(out, n_bytes);
        put_blob(out, e_bytes);
        return out;
    }

    Bytes encode() const {
        Bytes out = signed_fields();
        Bytes sig = ca_signature.to_bytes_be();
        put_blob(out, sig);
        return out;
    }

    static Certificate decode(std::span<const std::uint8_t> bytes) {
        ByteReader r(bytes);
        Certificate cert;
        cert.subject = participant_from_byte(r.u8());
        cert.public_key.n = BigUint::from_bytes_be(r.blob());
        cert.public_key.e = BigUint::from_bytes_be(r.blob());
        cert.ca_signature = BigUint::from_bytes_be(r.blob());
        if (!r.done()) throw CertificateInvalid("trailing bytes after certificate");
        return cert;
    }
};

class CertificateAuthority {
public:
    CertificateAuthority(RsaKeyPair keypair, HashAlgorithm alg)
        : keypair_(std::move(keypair)), alg_(alg) {}

    const RsaPublicKey root_key() const { return keypair_.pub(); }
    HashAlgorithm algorithm() const { return alg_; }

    Certificate issue(ParticipantId subject, const RsaPublicKey& public_key) const {
        Certificate cert;
        cert.subject = subject;
        cert.public_key = public_key;
        cert.ca_signature = rsa_sign_digest(keypair_.priv(), hash(alg_, cert.signed_fields()));
        return cert;
    }

private:
    RsaKeyPair keypair_;
    HashAlgorithm alg_;
};

inline bool verify_certificate(const RsaPublicKey& ca_key, HashAlgorithm alg,
                               const Certificate& cert) {
    return rsa_verify_digest(ca_key, hash(alg, cert.signed_fields()), cert.ca_signature);
}

}  // namespace scmci
