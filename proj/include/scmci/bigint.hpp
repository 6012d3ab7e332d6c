// Arbitrary-precision unsigned integers on 32-bit limbs: schoolbook multiply,
// Knuth algorithm-D division, modular exponentiation/inversion, Miller-Rabin,
// and seeded prime search. Big enough and fast enough for 2048-bit moduli.
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scmci/bytes.hpp"
#include "scmci/rng.hpp"

namespace scmci {

class BigUint {
public:
    BigUint() = default;

    static BigUint from_u64(std::uint64_t v) {
        BigUint out;
        if (v) out.limbs_.push_back(static_cast<std::uint32_t>(v));
        if (v >> 32) out.limbs_.push_back(static_cast<std::uint32_t>(v >> 32));
        return out;
    }

    static BigUint from_bytes_be(std::span<const std::uint8_t> bytes) {
        BigUint out;
        out.limbs_.assign((bytes.size() + 3) / 4, 0);
        std::size_t limb = 0, shift = 0;
        for (std::size_t i = bytes.size(); i-- > 0;) {
            out.limbs_[limb] |= std::uint32_t(bytes[i]) << shift;
            shift += 8;
            if (shift == 32) {
                shift = 0;
                ++limb;
            }
        }
        out.trim();
        return out;
    }

    static BigUint from_hex(std::string_view hex) {
        std::string padded(hex);
        if (padded.size() % 2) padded.insert(padded.begin(), '0');
        return from_bytes_be(scmci::from_hex(padded));
    }

    // Big-endian bytes, left-padded with zeros to at least min_len.
    Bytes to_bytes_be(std::size_t min_len = 0) const {
        Bytes out;
        std::size_t nbytes = (bit_length() + 7) / 8;
        std::size_t total = std::max(nbytes, std::max<std::size_t>(min_len, 1));
        out.assign(total, 0);
        for (std::size_t i = 0; i < nbytes; ++i) {
            std::uint32_t limb = limbs_[i / 4];
            out[total - 1 - i] = static_cast<std::uint8_t>(limb >> (8 * (i % 4)));
        }
        return out;
    }

    std::string to_hex() const {
        if (is_zero()) return "0";
        std::string s = scmci::to_hex(to_bytes_be());
        std::size_t first = s.find_first_not_of('0');
        return s.substr(first);
    }

    bool is_zero() const { return limbs_.empty(); }
    bool is_odd() const { return !limbs_.empty() && (limbs_[0] & 1); }
    bool is_one() const { return limbs_.size() == 1 && limbs_[0] == 1; }

    std::uint64_t to_u64() const {
        std::uint64_t v = 0;
        if (limbs_.size() > 2) throw std::overflow_error("BigUint does not fit in u64");
        if (limbs_.size() > 1) v = std::uint64_t(limbs_[1]) << 32;
        if (!limbs_.empty()) v |= limbs_[0];
        return v;
    }

    std::size_t bit_length() const {
        if (limbs_.empty()) return 0;
        return 32 * (limbs_.size() - 1) + (32 - std::countl_zero(limbs_.back()));
    }

    bool bit(std::size_t i) const {
        std::size_t limb = i / 32;
        if (limb >= limbs_.size()) return false;
        return (limbs_[limb] >> (i % 32)) & 1;
    }

    static int compare(const BigUint& a, const BigUint& b) {
        if (a.limbs_.size() != b.limbs_.size())
            return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
        for (std::size_t i = a.limbs_.size(); i-- > 0;) {
            if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
        }
        return 0;
    }

    friend bool operator==(const BigUint& a, const BigUint& b) { return compare(a, b) == 0; }
    friend std::strong_ordering operator<=>(const BigUint& a, const BigUint& b) {
        int c = compare(a, b);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend BigUint operator+(const BigUint& a, const BigUint& b) {
        BigUint out;
        const std::size_t n = std::max(a.limbs_.size(), b.limbs_.size());
        out.limbs_.assign(n + 1, 0);
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t sum = carry;
            if (i < a.limbs_.size()) sum += a.limbs_[i];
            if (i < b.limbs_.size()) sum += b.limbs_[i];
            out.limbs_[i] = static_cast<std::uint32_t>(sum);
            carry = sum >> 32;
        }
        out.limbs_[n] = static_cast<std::uint32_t>(carry);
        out.trim();
        return out;
    }

    // Requires a >= b.
    friend BigUint operator-(const BigUint& a, const BigUint& b) {
        if (compare(a, b) < 0) throw std::underflow_error("BigUint subtraction underflow");
        BigUint out;
        out.limbs_.assign(a.limbs_.size(), 0);
        std::int64_t borrow = 0;
        for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
            std::int64_t d = std::int64_t(a.limbs_[i]) - borrow -
                             (i < b.limbs_.size() ? std::int64_t(b.limbs_[i]) : 0);
            if (d < 0) {
                d += (std::int64_t(1) << 32);
                borrow = 1;
            } else {
                borrow = 0;
            }
            out.limbs_[i] = static_cast<std::uint32_t>(d);
        }
        out.trim();
        return out;
    }

    friend BigUint operator*(const BigUint& a, const BigUint& b) {
        if (a.is_zero() || b.is_zero()) return {};
        BigUint out;
        out.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
        for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
            std::uint64_t carry = 0;
            const std::uint64_t ai = a.limbs_[i];
            for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
                std::uint64_t cur = std::uint64_t(out.limbs_[i + j]) + ai * b.limbs_[j] + carry;
                out.limbs_[i + j] = static_cast<std::uint32_t>(cur);
                carry = cur >> 32;
            }
            std::size_t k = i + b.limbs_.size();
            while (carry) {
                std::uint64_t cur = std::uint64_t(out.limbs_[k]) + carry;
                out.limbs_[k] = static_cast<std::uint32_t>(cur);
                carry = cur >> 32;
                ++k;
            }
        }
        out.trim();
        return out;
    }

    BigUint operator<<(std::size_t bits) const {
        if (is_zero()) return {};
        const std::size_t limb_shift = bits / 32, bit_shift = bits % 32;
        BigUint out;
        out.limbs_.assign(limbs_.size() + limb_shift + 1, 0);
        for (std::size_t i = 0; i < limbs_.size(); ++i) {
            std::uint64_t v = std::uint64_t(limbs_[i]) << bit_shift;
            out.limbs_[i + limb_shift] |= static_cast<std::uint32_t>(v);
            out.limbs_[i + limb_shift + 1] |= static_cast<std::uint32_t>(v >> 32);
        }
        out.trim();
        return out;
    }

    BigUint operator>>(std::size_t bits) const {
        const std::size_t limb_shift = bits / 32, bit_shift = bits % 32;
        if (limb_shift >= limbs_.size()) return {};
        BigUint out;
        out.limbs_.assign(limbs_.size() - limb_shift, 0);
        for (std::size_t i = 0; i < out.limbs_.size(); ++i) {
            std::uint64_t v = limbs_[i + limb_shift] >> bit_shift;
            if (bit_shift && i + limb_shift + 1 < limbs_.size())
                v |= std::uint64_t(limbs_[i + limb_shift + 1]) << (32 - bit_shift);
            out.limbs_[i] = static_cast<std::uint32_t>(v);
        }
        out.trim();
        return out;
    }

    static void divmod(const BigUint& u, const BigUint& v, BigUint& q, BigUint& r) {
        if (v.is_zero()) throw std::domain_error("BigUint division by zero");
        if (compare(u, v) < 0) {
            q = BigUint{};
            r = u;
            return;
        }
        if (v.limbs_.size() == 1) {
            std::uint64_t rem = 0;
            const std::uint32_t d = v.limbs_[0];
            BigUint quotient;
            quotient.limbs_.assign(u.limbs_.size(), 0);
            for (std::size_t i = u.limbs_.size(); i-- > 0;) {
                std::uint64_t cur = (rem << 32) | u.limbs_[i];
                quotient.limbs_[i] = static_cast<std::uint32_t>(cur / d);
                rem = cur % d;
            }
            quotient.trim();
            q = std::move(quotient);
            r = from_u64(rem);
            return;
        }
        divmod_knuth(u, v, q, r);
    }

    friend BigUint operator/(const BigUint& a, const BigUint& b) {
        BigUint q, r;
        divmod(a, b, q, r);
        return q;
    }
    friend BigUint operator%(const BigUint& a, const BigUint& b) {
        BigUint q, r;
        divmod(a, b, q, r);
        return r;
    }

    static BigUint mod_mul(const BigUint& a, const BigUint& b, const BigUint& m) {
        return (a * b) % m;
    }

    static BigUint mod_pow(const BigUint& base, const BigUint& exp, const BigUint& mod) {
        if (mod.is_zero()) throw std::domain_error("mod_pow modulus is zero");
        if (mod.is_one()) return {};
        BigUint result = from_u64(1);
        BigUint b = base % mod;
        const std::size_t nbits = exp.bit_length();
        for (std::size_t i = nbits; i-- > 0;) {
            result = mod_mul(result, result, mod);
            if (exp.bit(i)) result = mod_mul(result, b, mod);
        }
        return result;
    }

    static BigUint gcd(BigUint a, BigUint b) {
        while (!b.is_zero()) {
            BigUint r = a % b;
            a = std::move(b);
            b = std::move(r);
        }
        return a;
    }

    // Inverse of a modulo m (extended Euclid tracked in non-negative
    // residues mod m). Returns zero value when gcd(a, m) != 1.
    static BigUint mod_inverse(const BigUint& a, const BigUint& m) {
        if (m.is_zero() || m.is_one()) throw std::domain_error("mod_inverse bad modulus");
        BigUint r0 = m, r1 = a % m;
        BigUint t0, t1 = from_u64(1);
        while (!r1.is_zero()) {
            BigUint quotient, remainder;
            divmod(r0, r1, quotient, remainder);
            BigUint t2 = sub_mod(t0, mod_mul(quotient, t1, m), m);
            r0 = std::move(r1);
            r1 = std::move(remainder);
            t0 = std::move(t1);
            t1 = std::move(t2);
        }
        if (!r0.is_one()) return {};
        return t0;
    }

    static BigUint sub_mod(const BigUint& a, const BigUint& b, const BigUint& m) {
        BigUint aa = a % m, bb = b % m;
        if (compare(aa, bb) >= 0) return aa - bb;
        return (aa + m) - bb;
    }

    // Uniform value with exactly `bits` random bits (top bit not forced).
    static BigUint random_bits(DetRng& rng, std::size_t bits) {
        BigUint out;
        out.limbs_.assign((bits + 31) / 32, 0);
        for (auto& limb : out.limbs_) limb = rng.next_u32();
        const std::size_t top = bits % 32;
        if (top) out.limbs_.back() &= (std::uint32_t(1) << top) - 1;
        out.trim();
        return out;
    }

    // Uniform in [0, bound) by rejection.
    static BigUint random_below(DetRng& rng, const BigUint& bound) {
        if (bound.is_zero()) throw std::domain_error("random_below zero bound");
        const std::size_t bits = bound.bit_length();
        for (;;) {
            BigUint candidate = random_bits(rng, bits);
            if (compare(candidate, bound) < 0) return candidate;
        }
    }

    bool is_probable_prime(DetRng& rng, int rounds = 24) const {
        if (limbs_.empty()) return false;
        if (limbs_.size() == 1) {
            const std::uint32_t v = limbs_[0];
            if (v < 2) return false;
            for (std::uint32_t p : small_primes()) {
                if (v == p) return true;
                if (v % p == 0) return false;
            }
        } else {
            if (!is_odd()) return false;
            for (std::uint32_t p : small_primes()) {
                if (mod_u32(p) == 0) return false;
            }
        }
        // Miller-Rabin
        const BigUint one = from_u64(1);
        const BigUint n_minus_1 = *this - one;
        BigUint d = n_minus_1;
        std::size_t r = 0;
        while (!d.is_odd()) {
            d = d >> 1;
            ++r;
        }
        const BigUint n_minus_3 = *this - from_u64(3);
        for (int round = 0; round < rounds; ++round) {
            BigUint a = random_below(rng, n_minus_3) + from_u64(2);
            BigUint x = mod_pow(a, d, *this);
            if (x.is_one() || x == n_minus_1) continue;
            bool witness = true;
            for (std::size_t i = 0; i + 1 < r; ++i) {
                x = mod_mul(x, x, *this);
                if (x == n_minus_1) {
                    witness = false;
                    break;
                }
            }
            if (witness) return false;
        }
        return true;
    }

    // Random prime with exactly `bits` bits; top two bits forced so that a
    // product of two such primes has exactly 2*bits bits.
    static BigUint random_prime(DetRng& rng, std::size_t bits) {
        if (bits < 8) throw std::invalid_argument("prime size too small");
        for (;;) {
            BigUint candidate = random_bits(rng, bits);
            candidate.set_bit(bits - 1);
            candidate.set_bit(bits - 2);
            candidate.set_bit(0);
            if (candidate.is_probable_prime(rng)) return candidate;
        }
    }

    void set_bit(std::size_t i) {
        const std::size_t limb = i / 32;
        if (limb >= limbs_.size()) limbs_.resize(limb + 1, 0);
        limbs_[limb] |= std::uint32_t(1) << (i % 32);
    }

    std::uint32_t mod_u32(std::uint32_t d) const {
        std::uint64_t rem = 0;
        for (std::size_t i = limbs_.size(); i-- > 0;) {
            rem = ((rem << 32) | limbs_[i]) % d;
        }
        return static_cast<std::uint32_t>(rem);
    }

private:
    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    }

    static const std::vector<std::uint32_t>& small_primes() {
        static const std::vector<std::uint32_t> primes = [] {
            std::vector<std::uint32_t> out;
            std::array<bool, 2000> sieve{};
            for (std::uint32_t i = 2; i < sieve.size(); ++i) {
                if (sieve[i]) continue;
                out.push_back(i);
                for (std::uint32_t j = i * i; j < sieve.size(); j += i) sieve[j] = true;
            }
            return out;
        }();
        return primes;
    }

    // Knuth TAOCP vol 2, algorithm D, on 32-bit limbs. Requires v >= 2 limbs
    // and u >= v.
    static void divmod_knuth(const BigUint& u, const BigUint& v, BigUint& q_out, BigUint& r_out) {
        const int s = std::countl_zero(v.limbs_.back());
        const BigUint vn = v << static_cast<std::size_t>(s);
        BigUint un_big = u << static_cast<std::size_t>(s);

        const std::size_t n = vn.limbs_.size();
        std::vector<std::uint32_t> un = un_big.limbs_;
        un.resize(u.limbs_.size() + 2, 0);
        const std::size_t m = un.size() - 1 - n;

        BigUint quotient;
        quotient.limbs_.assign(m + 1, 0);
        const std::uint64_t kBase = std::uint64_t(1) << 32;

        for (std::size_t j = m + 1; j-- > 0;) {
            std::uint64_t top = (std::uint64_t(un[j + n]) << 32) | un[j + n - 1];
            std::uint64_t qhat = top / vn.limbs_[n - 1];
            std::uint64_t rhat = top % vn.limbs_[n - 1];
            while (qhat >= kBase ||
                   qhat * vn.limbs_[n - 2] > ((rhat << 32) | un[j + n - 2])) {
                --qhat;
                rhat += vn.limbs_[n - 1];
                if (rhat >= kBase) break;
            }
            // Multiply and subtract.
            std::int64_t borrow = 0;
            std::uint64_t carry = 0;
            for (std::size_t i = 0; i < n; ++i) {
                std::uint64_t p = qhat * vn.limbs_[i] + carry;
                carry = p >> 32;
                std::int64_t t = std::int64_t(un[i + j]) - borrow - std::int64_t(p & 0xFFFFFFFFull);
                if (t < 0) {
                    t += std::int64_t(kBase);
                    borrow = 1;
                } else {
                    borrow = 0;
                }
                un[i + j] = static_cast<std::uint32_t>(t);
            }
            std::int64_t t = std::int64_t(un[j + n]) - borrow - std::int64_t(carry);
            if (t < 0) {
                // qhat was one too large: add divisor back.
                un[j + n] = static_cast<std::uint32_t>(t + std::int64_t(kBase));
                --qhat;
                std::uint64_t c = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    std::uint64_t sum = std::uint64_t(un[i + j]) + vn.limbs_[i] + c;
                    un[i + j] = static_cast<std::uint32_t>(sum);
                    c = sum >> 32;
                }
                un[j + n] = static_cast<std::uint32_t>(un[j + n] + c);
            } else {
                un[j + n] = static_cast<std::uint32_t>(t);
            }
            quotient.limbs_[j] = static_cast<std::uint32_t>(qhat);
        }
        quotient.trim();
        q_out = std::move(quotient);

        BigUint rem;
        rem.limbs_.assign(un.begin(), un.begin() + n);
        rem.trim();
        r_out = rem >> static_cast<std::size_t>(s);
    }

    std::vector<std::uint32_t> limbs_;  // little-endian, normalized
};

struct DivModResult {
    BigUint quotient;
    BigUint remainder;
};

inline DivModResult divmod(const BigUint& a, const BigUint& b) {
    DivModResult out;
    BigUint::divmod(a, b, out.quotient, out.remainder);
    return out;
}

}  // namespace scmci
