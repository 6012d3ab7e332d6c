// Purchase-side domain records (order summary, purchase details) plus the
// authorization/settlement artifacts and the double-entry bank ledger with
// its one-settlement-per-order guard.
#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "scmci/bigint.hpp"
#include "scmci/bytes.hpp"

namespace scmci {

inline bool luhn_valid(std::string_view digits) {
    if (digits.size() != 16) return false;
    int sum = 0;
    bool double_it = false;
    for (std::size_t i = digits.size(); i-- > 0;) {
        if (!std::isdigit(static_cast<unsigned char>(digits[i]))) return false;
        int d = digits[i] - '0';
        if (double_it) {
            d *= 2;
            if (d > 9) d -= 9;
        }
        sum += d;
        double_it = !double_it;
    }
    return sum % 10 == 0;
}

struct OrderSummary {
    std::uint64_t order_id = 0;
    Bytes item_list;
    std::int64_t total_amount_cents = 0;
    std::string currency = "USD";  // 3-char code

    void validate() const {
        if (total_amount_cents < 0) throw std::invalid_argument("order amount must be >= 0");
        if (currency.size() != 3) throw std::invalid_argument("currency must be 3 characters");
    }

    Bytes encode() const {
        validate();
        Bytes out;
        put_u64_be(out, order_id);
        put_u64_be(out, static_cast<std::uint64_t>(total_amount_cents));
        append(out, bytes_of(currency));
        append(out, item_list);
        return out;
    }

    static OrderSummary decode(std::span<const std::uint8_t> bytes) {
        ByteReader r(bytes);
        OrderSummary os;
        os.order_id = r.u64_be();
        os.total_amount_cents = static_cast<std::int64_t>(r.u64_be());
        os.currency = string_of(r.take(3));
        os.item_list = r.rest();
        os.validate();
        return os;
    }

    bool operator==(const OrderSummary&) const = default;
};

struct PurchaseDetails {
    std::uint64_t order_id = 0;
    std::string card_number;  // 16 digits
    std::string expiry;       // MMYY
    std::int64_t amount_cents = 0;

    void validate() const {
        if (card_number.size() != 16) throw std::invalid_argument("card number must be 16 digits");
        if (expiry.size() != 4) throw std::invalid_argument("expiry must be MMYY");
        if (amount_cents < 0) throw std::invalid_argument("amount must be >= 0");
    }

    Bytes encode() const {
        validate();
        Bytes out;
        put_u64_be(out, order_id);
        put_u64_be(out, static_cast<std::uint64_t>(amount_cents));
        append(out, bytes_of(card_number));
        append(out, bytes_of(expiry));
        return out;
    }

    static PurchaseDetails decode(std::span<const std::uint8_t> bytes) {
        ByteReader r(bytes);
        PurchaseDetails pd;
        pd.order_id = r.u64_be();
        pd.amount_cents = static_cast<std::int64_t>(r.u64_be());
        pd.card_number = string_of(r.take(16));
        pd.expiry = string_of(r.take(4));
        if (!r.done()) throw std::invalid_argument("trailing bytes after purchase details");
        pd.validate();
        return pd;
    }

    bool operator==(const PurchaseDetails&) const = default;
};

enum class AuthReason : std::uint8_t {
    kOk = 0,
    kInsufficientFunds = 1,
    kBadPan = 2,
    kExpired = 3,
    kUnknownAccount = 4,
};

inline const char* auth_reason_name(AuthReason r) {
    switch (r) {
        case AuthReason::kOk: return "OK";
        case AuthReason::kInsufficientFunds: return "INSUFFICIENT_FUNDS";
        case AuthReason::kBadPan: return "BAD_PAN";
        case AuthReason::kExpired: return "EXPIRED";
        case AuthReason::kUnknownAccount: return "UNKNOWN_ACCOUNT";
    }
    return "?";
}

struct AuthorizationInfo {
    std::uint64_t order_id = 0;
    bool approved = false;
    AuthReason reason = AuthReason::kOk;
    std::uint64_t auth_code = 0;

    Bytes encode() const {
        Bytes out;
        put_u64_be(out, order_id);
        out.push_back(approved ? 1 : 0);
        out.push_back(static_cast<std::uint8_t>(reason));
        put_u64_be(out, auth_code);
        return out;
    }

    static AuthorizationInfo decode(std::span<const std::uint8_t> bytes) {
        ByteReader r(bytes);
        AuthorizationInfo ai;
        ai.order_id = r.u64_be();
        ai.approved = r.u8() != 0;
        ai.reason = static_cast<AuthReason>(r.u8());
        ai.auth_code = r.u64_be();
        return ai;
    }

    bool operator==(const AuthorizationInfo&) const = default;
};

struct AuthorizationResponse {
    AuthorizationInfo info;
    BigUint signature;  // over the digest of info.encode(), under the gateway key
};

struct PaymentResponse {
    std::uint64_t order_id = 0;
    std::int64_t amount_cents = 0;
    std::uint64_t debit_ref = 0;
    std::uint64_t credit_ref = 0;

    Bytes encode() const {
        Bytes out;
        put_u64_be(out, order_id);
        put_u64_be(out, static_cast<std::uint64_t>(amount_cents));
        put_u64_be(out, debit_ref);
        put_u64_be(out, credit_ref);
        return out;
    }

    static PaymentResponse decode(std::span<const std::uint8_t> bytes) {
        ByteReader r(bytes);
        PaymentResponse pr;
        pr.order_id = r.u64_be();
        pr.amount_cents = static_cast<std::int64_t>(r.u64_be());
        pr.debit_ref = r.u64_be();
        pr.credit_ref = r.u64_be();
        return pr;
    }

    bool operator==(const PaymentResponse&) const = default;
};

class DoubleSettlement : public std::runtime_error {
public:
    explicit DoubleSettlement(const std::string& what) : std::runtime_error(what) {}
};

class UnknownAccount : public std::runtime_error {
public:
    explicit UnknownAccount(const std::string& what) : std::runtime_error(what) {}
};

// Account balances plus an order-keyed journal. Applying the same order twice
// is refused, which is what makes settlement idempotent.
class BankLedger {
public:
    struct JournalEntry {
        std::uint64_t order_id;
        std::string account;
        std::int64_t delta_cents;
        std::uint64_t ref;
    };

    void open_account(const std::string& account, std::int64_t initial_cents) {
        balances_[account] = initial_cents;
    }

    bool has_account(const std::string& account) const { return balances_.count(account) > 0; }

    std::int64_t balance(const std::string& account) const {
        auto it = balances_.find(account);
        if (it == balances_.end()) throw UnknownAccount("no account " + account);
        return it->second;
    }

    std::uint64_t debit(const std::string& account, std::uint64_t order_id,
                        std::int64_t amount_cents) {
        return apply(account, order_id, -amount_cents);
    }

    std::uint64_t credit(const std::string& account, std::uint64_t order_id,
                         std::int64_t amount_cents) {
        return apply(account, order_id, amount_cents);
    }

    const std::vector<JournalEntry>& journal() const { return journal_; }

    std::size_t entries_for(std::uint64_t order_id) const {
        std::size_t n = 0;
        for (const auto& e : journal_)
            if (e.order_id == order_id) ++n;
        return n;
    }

private:
    std::uint64_t apply(const std::string& account, std::uint64_t order_id,
                        std::int64_t delta_cents) {
        auto it = balances_.find(account);
        if (it == balances_.end()) throw UnknownAccount("no account " + account);
        if (!settled_orders_.insert(order_id).second)
            throw DoubleSettlement("order " + std::to_string(order_id) + " already journaled");
        it->second += delta_cents;
        const std::uint64_t ref = journal_.size() + 1;
        journal_.push_back({order_id, account, delta_cents, ref});
        return ref;
    }

    std::map<std::string, std::int64_t> balances_;
    std::vector<JournalEntry> journal_;
    std::set<std::uint64_t> settled_orders_;
};

}  // namespace scmci
