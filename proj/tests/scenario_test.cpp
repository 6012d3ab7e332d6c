#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "scmci/scenario.hpp"

namespace scmci {
namespace {

TEST(Scenario, DefaultsValidate) {
    ScenarioConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    proto::ScmciConfig pc = cfg.to_protocol_config();
    EXPECT_EQ(pc.seed, 42u);
    EXPECT_EQ(pc.sym_key_len, 16u);
    EXPECT_EQ(pc.order.order_id, pc.card.order_id);
    EXPECT_EQ(pc.order.total_amount_cents, pc.card.amount_cents);
}

TEST(Scenario, FileParsingWithCommentsAndSpaces) {
    const std::string path = std::string(::testing::TempDir()) + "scenario_test.cfg";
    {
        std::ofstream f(path);
        f << "# experiment fixture\n"
          << "seed = 777\n"
          << "protocol=baseline\n"
          << "sym_bits = 64\n"
          << "  rsa_bits = 256\n"
          << "order_text = plain order words\n"
          << "tamper = 3:17\n"
          << "\n";
    }
    ScenarioConfig cfg = ScenarioConfig::from_file(path);
    std::remove(path.c_str());

    EXPECT_EQ(cfg.seed, 777u);
    EXPECT_EQ(cfg.protocol, "baseline");
    EXPECT_EQ(cfg.sym_bits, 64u);
    EXPECT_EQ(cfg.rsa_bits, 256u);
    EXPECT_EQ(cfg.order_text, "plain order words");
    ASSERT_TRUE(cfg.tamper.has_value());
    EXPECT_EQ(cfg.tamper->first, 3u);
    EXPECT_EQ(cfg.tamper->second, 17u);
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Scenario, UnknownKeyNamesTheField) {
    ScenarioConfig cfg;
    try {
        cfg.set("rsa_bitz", "512");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "rsa_bitz");
    }
}

TEST(Scenario, InvalidValuesNameTheField) {
    auto expect_field = [](ScenarioConfig cfg, const std::string& field) {
        try {
            cfg.validate();
            FAIL() << "expected ConfigError for " << field;
        } catch (const ConfigError& e) {
            EXPECT_EQ(e.field(), field);
        }
    };

    ScenarioConfig bad_protocol;
    bad_protocol.protocol = "ssl";
    expect_field(bad_protocol, "protocol");

    ScenarioConfig bad_rsa;
    bad_rsa.rsa_bits = 63;
    expect_field(bad_rsa, "rsa_bits");

    ScenarioConfig bad_hash;
    bad_hash.hash = "sha1";
    expect_field(bad_hash, "hash");

    ScenarioConfig small_scmci_key;
    small_scmci_key.sym_bits = 64;  // fine for baseline, not for the protocol
    expect_field(small_scmci_key, "sym_bits");

    ScenarioConfig big_baseline_key;
    big_baseline_key.protocol = "baseline";
    big_baseline_key.sym_bits = 192;
    expect_field(big_baseline_key, "sym_bits");

    ScenarioConfig bad_card;
    bad_card.card_number = "411";
    expect_field(bad_card, "card_number");

    ScenarioConfig bad_seed_value;
    EXPECT_THROW(bad_seed_value.set("seed", "not-a-number"), ConfigError);
    EXPECT_THROW(bad_seed_value.set("tamper", "17"), ConfigError);
}

TEST(Scenario, HashAndSealingMapping) {
    ScenarioConfig cfg;
    EXPECT_EQ(cfg.algorithm(), HashAlgorithm::kMd5);
    EXPECT_EQ(cfg.sealing_mode(), SealingMode::kTextbook);
    cfg.hash = "sha256";
    cfg.sealing = "masked";
    EXPECT_EQ(cfg.algorithm(), HashAlgorithm::kSha256);
    EXPECT_EQ(cfg.sealing_mode(), SealingMode::kMasked);
}

}  // namespace
}  // namespace scmci
