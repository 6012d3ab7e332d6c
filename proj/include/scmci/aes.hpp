// AES block cipher core (128/192/256-bit keys, 16-byte block), table-free
// byte-oriented implementation. Chaining, padding and instrumentation live in
// symmetric.hpp; this header is just the raw block permutation.
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

#include "scmci/bytes.hpp"

namespace scmci {

namespace aes_detail {

inline constexpr std::array<std::uint8_t, 256> kSbox = {
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16};

inline constexpr std::array<std::uint8_t, 256> kInvSbox = [] {
    std::array<std::uint8_t, 256> inv{};
    for (int i = 0; i < 256; ++i) inv[kSbox[i]] = static_cast<std::uint8_t>(i);
    return inv;
}();

inline std::uint8_t xtime(std::uint8_t a) {
    return static_cast<std::uint8_t>((a << 1) ^ ((a & 0x80) ? 0x1b : 0x00));
}

inline std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) {
    std::uint8_t result = 0;
    while (b) {
        if (b & 1) result ^= a;
        a = xtime(a);
        b >>= 1;
    }
    return result;
}

}  // namespace aes_detail

class AesBlockCipher {
public:
    static constexpr std::size_t kBlockSize = 16;

    explicit AesBlockCipher(std::span<const std::uint8_t> key) {
        switch (key.size()) {
            case 16: rounds_ = 10; break;
            case 24: rounds_ = 12; break;
            case 32: rounds_ = 14; break;
            default: throw std::invalid_argument("AES key must be 16, 24 or 32 bytes");
        }
        expand_key(key);
    }

    void encrypt_block(const std::uint8_t* in, std::uint8_t* out) const {
        std::array<std::uint8_t, 16> state;
        std::copy(in, in + 16, state.begin());
        add_round_key(state, 0);
        for (int round = 1; round < rounds_; ++round) {
            sub_bytes(state);
            shift_rows(state);
            mix_columns(state);
            add_round_key(state, round);
        }
        sub_bytes(state);
        shift_rows(state);
        add_round_key(state, rounds_);
        std::copy(state.begin(), state.end(), out);
    }

    void decrypt_block(const std::uint8_t* in, std::uint8_t* out) const {
        std::array<std::uint8_t, 16> state;
        std::copy(in, in + 16, state.begin());
        add_round_key(state, rounds_);
        for (int round = rounds_ - 1; round > 0; --round) {
            inv_shift_rows(state);
            inv_sub_bytes(state);
            add_round_key(state, round);
            inv_mix_columns(state);
        }
        inv_shift_rows(state);
        inv_sub_bytes(state);
        add_round_key(state, 0);
        std::copy(state.begin(), state.end(), out);
    }

private:
    void expand_key(std::span<const std::uint8_t> key) {
        const std::size_t nk = key.size() / 4;
        const std::size_t total_words = 4 * (rounds_ + 1);
        round_keys_.assign(total_words * 4, 0);
        std::copy(key.begin(), key.end(), round_keys_.begin());

        std::uint8_t rcon = 0x01;
        for (std::size_t w = nk; w < total_words; ++w) {
            std::array<std::uint8_t, 4> temp = {
                round_keys_[4 * (w - 1) + 0], round_keys_[4 * (w - 1) + 1],
                round_keys_[4 * (w - 1) + 2], round_keys_[4 * (w - 1) + 3]};
            if (w % nk == 0) {
                std::rotate(temp.begin(), temp.begin() + 1, temp.end());
                for (auto& b : temp) b = aes_detail::kSbox[b];
                temp[0] ^= rcon;
                rcon = aes_detail::xtime(rcon);
            } else if (nk > 6 && w % nk == 4) {
                for (auto& b : temp) b = aes_detail::kSbox[b];
            }
            for (int i = 0; i < 4; ++i)
                round_keys_[4 * w + i] = round_keys_[4 * (w - nk) + i] ^ temp[i];
        }
    }

    void add_round_key(std::array<std::uint8_t, 16>& s, int round) const {
        for (int i = 0; i < 16; ++i) s[i] ^= round_keys_[16 * round + i];
    }

    static void sub_bytes(std::array<std::uint8_t, 16>& s) {
        for (auto& b : s) b = aes_detail::kSbox[b];
    }

    static void inv_sub_bytes(std::array<std::uint8_t, 16>& s) {
        for (auto& b : s) b = aes_detail::kInvSbox[b];
    }

    // State layout is column-major: byte index = 4*col + row.
    static void shift_rows(std::array<std::uint8_t, 16>& s) {
        std::array<std::uint8_t, 16> t = s;
        for (int row = 1; row < 4; ++row)
            for (int col = 0; col < 4; ++col)
                s[4 * col + row] = t[4 * ((col + row) % 4) + row];
    }

    static void inv_shift_rows(std::array<std::uint8_t, 16>& s) {
        std::array<std::uint8_t, 16> t = s;
        for (int row = 1; row < 4; ++row)
            for (int col = 0; col < 4; ++col)
                s[4 * ((col + row) % 4) + row] = t[4 * col + row];
    }

    static void mix_columns(std::array<std::uint8_t, 16>& s) {
        using aes_detail::gf_mul;
        for (int col = 0; col < 4; ++col) {
            std::uint8_t* c = s.data() + 4 * col;
            const std::uint8_t a0 = c[0], a1 = c[1], a2 = c[2], a3 = c[3];
            c[0] = gf_mul(a0, 2) ^ gf_mul(a1, 3) ^ a2 ^ a3;
            c[1] = a0 ^ gf_mul(a1, 2) ^ gf_mul(a2, 3) ^ a3;
            c[2] = a0 ^ a1 ^ gf_mul(a2, 2) ^ gf_mul(a3, 3);
            c[3] = gf_mul(a0, 3) ^ a1 ^ a2 ^ gf_mul(a3, 2);
        }
    }

    static void inv_mix_columns(std::array<std::uint8_t, 16>& s) {
        using aes_detail::gf_mul;
        for (int col = 0; col < 4; ++col) {
            std::uint8_t* c = s.data() + 4 * col;
            const std::uint8_t a0 = c[0], a1 = c[1], a2 = c[2], a3 = c[3];
            c[0] = gf_mul(a0, 14) ^ gf_mul(a1, 11) ^ gf_mul(a2, 13) ^ gf_mul(a3, 9);
            c[1] = gf_mul(a0, 9) ^ gf_mul(a1, 14) ^ gf_mul(a2, 11) ^ gf_mul(a3, 13);
            c[2] = gf_mul(a0, 13) ^ gf_mul(a1, 9) ^ gf_mul(a2, 14) ^ gf_mul(a3, 11);
            c[3] = gf_mul(a0, 11) ^ gf_mul(a1, 13) ^ gf_mul(a2, 9) ^ gf_mul(a3, 14);
        }
    }

    int rounds_;
    std::vector<std::uint8_t> round_keys_;
};

}  // namespace scmci
