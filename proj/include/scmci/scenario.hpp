// Scenario configuration: one flat key=value file (or flag overrides) drives
// a whole reproducible experiment. Every random choice downstream derives
// from the single seed recorded here.
#pragma once

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include "scmci/digest.hpp"
#include "scmci/envelope.hpp"
#include "scmci/run.hpp"

namespace scmci {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error("config field '" + field + "': " + what),
          field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct ScenarioConfig {
    std::uint64_t seed = 42;
    std::string protocol = "scmci";  // scmci | baseline
    unsigned rsa_bits = 512;
    unsigned sym_bits = 128;
    std::string hash = "md5";  // md5 | sha256
    std::string sealing = "textbook";  // textbook | masked
    std::string out_dir = "out";

    std::uint64_t order_id = 1001;
    std::string order_items = "2 pens, 1 notebook";
    std::int64_t amount_cents = 2500;
    std::string currency = "USD";
    std::string card_number = "4111111111111111";
    std::string card_expiry = "1227";  // MMYY
    std::int64_t cb_balance_cents = 10000;
    std::int64_t mb_balance_cents = 0;
    std::string expiry_floor = "0125";  // MMYY validity lower bound

    // Fixture texts for baseline messages and the entropy pipelines.
    std::string order_text =
        "Order 1001: 2 pens, 1 notebook; ship to 221B Baker Street; total 25.00 USD";
    std::string payment_text =
        "Card 4111111111111111 exp 12/27 amount 25.00 USD authorization requested";

    std::optional<std::pair<std::size_t, std::size_t>> tamper;  // frame index : bit index

    void set(const std::string& key, const std::string& value) {
        auto to_u64 = [&](const char* field) -> std::uint64_t {
            try {
                std::size_t pos = 0;
                std::uint64_t v = std::stoull(value, &pos, 0);
                if (pos != value.size()) throw std::invalid_argument("trailing characters");
                return v;
            } catch (const std::exception&) {
                throw ConfigError(field, "not an unsigned integer: '" + value + "'");
            }
        };
        auto to_i64 = [&](const char* field) -> std::int64_t {
            try {
                std::size_t pos = 0;
                std::int64_t v = std::stoll(value, &pos, 0);
                if (pos != value.size()) throw std::invalid_argument("trailing characters");
                return v;
            } catch (const std::exception&) {
                throw ConfigError(field, "not an integer: '" + value + "'");
            }
        };

        if (key == "seed") seed = to_u64("seed");
        else if (key == "protocol") protocol = value;
        else if (key == "rsa_bits") rsa_bits = static_cast<unsigned>(to_u64("rsa_bits"));
        else if (key == "sym_bits") sym_bits = static_cast<unsigned>(to_u64("sym_bits"));
        else if (key == "hash") hash = value;
        else if (key == "sealing") sealing = value;
        else if (key == "out_dir") out_dir = value;
        else if (key == "order_id") order_id = to_u64("order_id");
        else if (key == "order_items") order_items = value;
        else if (key == "amount_cents") amount_cents = to_i64("amount_cents");
        else if (key == "currency") currency = value;
        else if (key == "card_number") card_number = value;
        else if (key == "card_expiry") card_expiry = value;
        else if (key == "cb_balance_cents") cb_balance_cents = to_i64("cb_balance_cents");
        else if (key == "mb_balance_cents") mb_balance_cents = to_i64("mb_balance_cents");
        else if (key == "expiry_floor") expiry_floor = value;
        else if (key == "order_text") order_text = value;
        else if (key == "payment_text") payment_text = value;
        else if (key == "tamper") set_tamper(value);
        else throw ConfigError(key, "unknown key");
    }

    void set_tamper(const std::string& value) {
        const auto colon = value.find(':');
        if (colon == std::string::npos)
            throw ConfigError("tamper", "expected <frame-index>:<bit-index>");
        try {
            tamper = {std::stoull(value.substr(0, colon)),
                      std::stoull(value.substr(colon + 1))};
        } catch (const std::exception&) {
            throw ConfigError("tamper", "expected numeric <frame-index>:<bit-index>");
        }
    }

    void validate() const {
        if (protocol != "scmci" && protocol != "baseline")
            throw ConfigError("protocol", "must be 'scmci' or 'baseline', got '" + protocol + "'");
        if (rsa_bits < 64 || rsa_bits > 2048 || rsa_bits % 2 != 0)
            throw ConfigError("rsa_bits", "must be even and within [64, 2048]");
        if (hash != "md5" && hash != "sha256")
            throw ConfigError("hash", "must be 'md5' or 'sha256', got '" + hash + "'");
        if (sealing != "textbook" && sealing != "masked")
            throw ConfigError("sealing", "must be 'textbook' or 'masked'");
        if (protocol == "scmci") {
            if (sym_bits != 128 && sym_bits != 192 && sym_bits != 256)
                throw ConfigError("sym_bits", "scmci session keys must be 128, 192 or 256 bits");
        } else {
            if (sym_bits % 8 != 0 || sym_bits < 8 || sym_bits > 128)
                throw ConfigError("sym_bits",
                                  "baseline session keys must be 8..128 bits in byte steps");
        }
        if (card_number.size() != 16)
            throw ConfigError("card_number", "must be 16 digits");
        if (card_expiry.size() != 4)
            throw ConfigError("card_expiry", "must be MMYY");
        if (expiry_floor.size() != 4)
            throw ConfigError("expiry_floor", "must be MMYY");
        if (currency.size() != 3)
            throw ConfigError("currency", "must be a 3-character code");
        if (amount_cents < 0) throw ConfigError("amount_cents", "must be >= 0");
        if (out_dir.empty()) throw ConfigError("out_dir", "must not be empty");
    }

    static ScenarioConfig from_file(const std::string& path) {
        std::ifstream file(path);
        if (!file) throw ConfigError("config", "cannot open file: " + path);
        ScenarioConfig cfg;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(file, line)) {
            ++line_no;
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config", "line " + std::to_string(line_no) +
                                                " is not 'key = value'");
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t");
                const auto b = s.find_last_not_of(" \t\r");
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
        return cfg;
    }

    HashAlgorithm algorithm() const {
        return hash == "md5" ? HashAlgorithm::kMd5 : HashAlgorithm::kSha256;
    }

    SealingMode sealing_mode() const {
        return sealing == "textbook" ? SealingMode::kTextbook : SealingMode::kMasked;
    }

    proto::ScmciConfig to_protocol_config() const {
        validate();
        proto::ScmciConfig cfg;
        cfg.seed = seed;
        cfg.rsa_bits = rsa_bits;
        cfg.sym_key_len = sym_bits / 8;
        cfg.algorithm = algorithm();
        cfg.sealing = sealing_mode();
        cfg.order = OrderSummary{order_id, bytes_of(order_items), amount_cents, currency};
        cfg.card = PurchaseDetails{order_id, card_number, card_expiry, amount_cents};
        cfg.cb_balance_cents = cb_balance_cents;
        cfg.mb_balance_cents = mb_balance_cents;
        cfg.expiry_floor = expiry_floor;
        return cfg;
    }
};

}  // namespace scmci
