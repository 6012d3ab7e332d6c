// MD5 message digest (RFC 1321 construction). Retained here because the
// protocol's default digest is MD5; output checked against reference vectors
// in the golden file.
#pragma once

#include <array>
#include <cstdint>
#include <cstring>

#include "scmci/bytes.hpp"

namespace scmci {

class Md5 {
public:
    Md5() { reset(); }

    void reset() {
        state_ = {0x67452301u, 0xefcdab89u, 0x98badcfeu, 0x10325476u};
        total_len_ = 0;
        buf_len_ = 0;
    }

    void update(std::span<const std::uint8_t> data) {
        total_len_ += data.size();
        std::size_t off = 0;
        if (buf_len_ > 0) {
            const std::size_t take = std::min<std::size_t>(64 - buf_len_, data.size());
            std::memcpy(buf_.data() + buf_len_, data.data(), take);
            buf_len_ += take;
            off += take;
            if (buf_len_ == 64) {
                process(buf_.data());
                buf_len_ = 0;
            }
        }
        while (off + 64 <= data.size()) {
            process(data.data() + off);
            off += 64;
        }
        if (off < data.size()) {
            buf_len_ = data.size() - off;
            std::memcpy(buf_.data(), data.data() + off, buf_len_);
        }
    }

    std::array<std::uint8_t, 16> finish() {
        const std::uint64_t bit_len = total_len_ * 8;
        std::array<std::uint8_t, 1> pad1 = {0x80};
        update(pad1);
        static constexpr std::array<std::uint8_t, 64> kZeros{};
        while (buf_len_ != 56) {
            const std::size_t pad = buf_len_ < 56 ? 56 - buf_len_ : 64 - buf_len_ + 56;
            update(std::span<const std::uint8_t>(kZeros.data(), std::min<std::size_t>(pad, 64)));
        }
        std::array<std::uint8_t, 8> len_le{};
        for (int i = 0; i < 8; ++i) len_le[i] = static_cast<std::uint8_t>(bit_len >> (8 * i));
        update(len_le);
        std::array<std::uint8_t, 16> out{};
        for (int i = 0; i < 4; ++i) {
            out[4 * i + 0] = static_cast<std::uint8_t>(state_[i]);
            out[4 * i + 1] = static_cast<std::uint8_t>(state_[i] >> 8);
            out[4 * i + 2] = static_cast<std::uint8_t>(state_[i] >> 16);
            out[4 * i + 3] = static_cast<std::uint8_t>(state_[i] >> 24);
        }
        return out;
    }

    static std::array<std::uint8_t, 16> digest(std::span<const std::uint8_t> data) {
        Md5 h;
        h.update(data);
        return h.finish();
    }

private:
    static std::uint32_t rotl(std::uint32_t x, int c) { return (x << c) | (x >> (32 - c)); }

    void process(const std::uint8_t* block) {
        static constexpr std::array<std::uint32_t, 64> K = {
            0xd76aa478u, 0xe8c7b756u, 0x242070dbu, 0xc1bdceeeu, 0xf57c0fafu, 0x4787c62au,
            0xa8304613u, 0xfd469501u, 0x698098d8u, 0x8b44f7afu, 0xffff5bb1u, 0x895cd7beu,
            0x6b901122u, 0xfd987193u, 0xa679438eu, 0x49b40821u, 0xf61e2562u, 0xc040b340u,
            0x265e5a51u, 0xe9b6c7aau, 0xd62f105du, 0x02441453u, 0xd8a1e681u, 0xe7d3fbc8u,
            0x21e1cde6u, 0xc33707d6u, 0xf4d50d87u, 0x455a14edu, 0xa9e3e905u, 0xfcefa3f8u,
            0x676f02d9u, 0x8d2a4c8au, 0xfffa3942u, 0x8771f681u, 0x6d9d6122u, 0xfde5380cu,
            0xa4beea44u, 0x4bdecfa9u, 0xf6bb4b60u, 0xbebfbc70u, 0x289b7ec6u, 0xeaa127fau,
            0xd4ef3085u, 0x04881d05u, 0xd9d4d039u, 0xe6db99e5u, 0x1fa27cf8u, 0xc4ac5665u,
            0xf4292244u, 0x432aff97u, 0xab9423a7u, 0xfc93a039u, 0x655b59c3u, 0x8f0ccc92u,
            0xffeff47du, 0x85845dd1u, 0x6fa87e4fu, 0xfe2ce6e0u, 0xa3014314u, 0x4e0811a1u,
            0xf7537e82u, 0xbd3af235u, 0x2ad7d2bbu, 0xeb86d391u};
        static constexpr std::array<int, 64> S = {
            7, 12, 17, 22, 7, 12, 17, 22, 7, 12, 17, 22, 7, 12, 17, 22,
            5, 9,  14, 20, 5, 9,  14, 20, 5, 9,  14, 20, 5, 9,  14, 20,
            4, 11, 16, 23, 4, 11, 16, 23, 4, 11, 16, 23, 4, 11, 16, 23,
            6, 10, 15, 21, 6, 10, 15, 21, 6, 10, 15, 21, 6, 10, 15, 21};

        std::array<std::uint32_t, 16> M;
        for (int i = 0; i < 16; ++i) {
            M[i] = std::uint32_t(block[4 * i]) | (std::uint32_t(block[4 * i + 1]) << 8) |
                   (std::uint32_t(block[4 * i + 2]) << 16) | (std::uint32_t(block[4 * i + 3]) << 24);
        }
        std::uint32_t a = state_[0], b = state_[1], c = state_[2], d = state_[3];
        for (int i = 0; i < 64; ++i) {
            std::uint32_t f;
            int g;
            if (i < 16) {
                f = (b & c) | (~b & d);
                g = i;
            } else if (i < 32) {
                f = (d & b) | (~d & c);
                g = (5 * i + 1) % 16;
            } else if (i < 48) {
                f = b ^ c ^ d;
                g = (3 * i + 5) % 16;
            } else {
                f = c ^ (b | ~d);
                g = (7 * i) % 16;
            }
            const std::uint32_t tmp = d;
            d = c;
            c = b;
            b = b + rotl(a + f + K[i] + M[g], S[i]);
            a = tmp;
        }
        state_[0] += a;
        state_[1] += b;
        state_[2] += c;
        state_[3] += d;
    }

    std::array<std::uint32_t, 4> state_{};
    std::array<std::uint8_t, 64> buf_{};
    std::size_t buf_len_ = 0;
    std::uint64_t total_len_ = 0;
};

}  // namespace scmci
