// Crypto-operation counters. The primitive layer bumps these on every call so
// experiments can assert op-count claims (e.g. a flow performs zero public-key
// operations) instead of relying on wall-clock comparisons.
#pragma once

#include <cstdint>

namespace scmci {

struct OpCounts {
    std::uint64_t rsa_enc = 0;  // public-key ops: encrypt + signature verify
    std::uint64_t rsa_dec = 0;  // private-key ops: decrypt + sign
    std::uint64_t sym_enc = 0;
    std::uint64_t sym_dec = 0;
    std::uint64_t hash = 0;

    std::uint64_t rsa_total() const { return rsa_enc + rsa_dec; }

    OpCounts operator-(const OpCounts& o) const {
        return {rsa_enc - o.rsa_enc, rsa_dec - o.rsa_dec, sym_enc - o.sym_enc,
                sym_dec - o.sym_dec, hash - o.hash};
    }
    OpCounts operator+(const OpCounts& o) const {
        return {rsa_enc + o.rsa_enc, rsa_dec + o.rsa_dec, sym_enc + o.sym_enc,
                sym_dec + o.sym_dec, hash + o.hash};
    }
    bool operator==(const OpCounts&) const = default;
};

// Single-writer per thread; readers take snapshots and diff.
inline OpCounts& op_counts() {
    thread_local OpCounts counts;
    return counts;
}

inline OpCounts op_snapshot() { return op_counts(); }

inline OpCounts ops_since(const OpCounts& snapshot) { return op_counts() - snapshot; }

}  // namespace scmci
