// Digest values and the linked dual digest H(H(a) || H(b)) that binds the
// order half of a purchase to the payment half.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "scmci/bytes.hpp"
#include "scmci/md5.hpp"
#include "scmci/ops.hpp"
#include "scmci/sha256.hpp"

namespace scmci {

enum class HashAlgorithm : std::uint8_t { kMd5 = 0, kSha256 = 1 };

inline std::size_t digest_size(HashAlgorithm alg) {
    return alg == HashAlgorithm::kMd5 ? 16 : 32;
}

inline const char* hash_name(HashAlgorithm alg) {
    return alg == HashAlgorithm::kMd5 ? "md5" : "sha256";
}

struct Digest {
    HashAlgorithm algorithm = HashAlgorithm::kMd5;
    Bytes bytes;

    bool operator==(const Digest&) const = default;
    std::string hex() const { return to_hex(bytes); }
};

inline Digest hash(HashAlgorithm alg, std::span<const std::uint8_t> data) {
    ++op_counts().hash;
    Digest d;
    d.algorithm = alg;
    if (alg == HashAlgorithm::kMd5) {
        auto raw = Md5::digest(data);
        d.bytes.assign(raw.begin(), raw.end());
    } else {
        auto raw = Sha256::digest(data);
        d.bytes.assign(raw.begin(), raw.end());
    }
    return d;
}

// H(H(os) || H(pd)): one value both receivers can recompute from the half
// they may see plus the other half's digest.
inline Digest dual_digest(HashAlgorithm alg, std::span<const std::uint8_t> os_bytes,
                          std::span<const std::uint8_t> pd_bytes) {
    Digest h_os = hash(alg, os_bytes);
    Digest h_pd = hash(alg, pd_bytes);
    Bytes joined = h_os.bytes;
    append(joined, h_pd.bytes);
    return hash(alg, joined);
}

// Recomputation path used by a verifier holding one plaintext half and the
// other half's digest.
inline Digest dual_digest_from_halves(HashAlgorithm alg, const Digest& h_os, const Digest& h_pd) {
    if (h_os.algorithm != alg || h_pd.algorithm != alg)
        throw std::invalid_argument("dual digest halves use a different algorithm");
    Bytes joined = h_os.bytes;
    append(joined, h_pd.bytes);
    return hash(alg, joined);
}

}  // namespace scmci
