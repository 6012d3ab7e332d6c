// Deterministic seeded RNG. Every random choice in the library flows from an
// explicit 64-bit seed so that a scenario replays byte-identically; named
// sub-seeds keep independent components decorrelated under one root seed.
#pragma once

#include <cstdint>
#include <string_view>

#include "scmci/bytes.hpp"

namespace scmci {

// splitmix64 (public-domain construction); small state, good diffusion,
// and trivially reproducible across platforms.
class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }

    void fill(Bytes& out, std::size_t n) {
        out.clear();
        out.reserve(n);
        while (out.size() < n) {
            std::uint64_t v = next_u64();
            for (int i = 0; i < 8 && out.size() < n; ++i) {
                out.push_back(static_cast<std::uint8_t>(v >> (56 - 8 * i)));
            }
        }
    }

    Bytes bytes(std::size_t n) {
        Bytes out;
        fill(out, n);
        return out;
    }

    // Uniform in [0, bound) by rejection; bound > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

private:
    std::uint64_t state_;
};

// Derives an independent stream seed from a root seed and a label
// (FNV-1a over the label, then splitmix-style mixing with the root).
inline std::uint64_t sub_seed(std::uint64_t root, std::string_view label) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : label) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 1099511628211ull;
    }
    std::uint64_t z = root ^ h;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace scmci
