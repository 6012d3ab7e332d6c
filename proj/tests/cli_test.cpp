// Drives the command-line runner end to end: exit codes, step log, and the
// stable schema of its machine-readable outputs.
#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace {

using nlohmann::json;

struct CliResult {
    int exit_code;
    std::string stdout_text;
};

CliResult run_cli(const std::string& args) {
    const std::string out_file = std::string(::testing::TempDir()) + "cli_stdout.txt";
    const std::string cmd =
        std::string(SCMCI_CLI_PATH) + " " + args + " >" + out_file + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    std::ifstream f(out_file);
    std::stringstream ss;
    ss << f.rdbuf();
    return {WEXITSTATUS(status), ss.str()};
}

json load_json(const std::string& path) {
    std::ifstream f(path);
    EXPECT_TRUE(static_cast<bool>(f)) << path;
    return json::parse(f);
}

std::string temp_out(const std::string& tag) {
    return std::string(::testing::TempDir()) + "cli_" + tag;
}

TEST(Cli, RunListsAllThirtySteps) {
    const std::string out = temp_out("run");
    CliResult r = run_cli("run --out " + out);
    EXPECT_EQ(r.exit_code, 0);
    for (int step = 1; step <= 30; ++step) {
        EXPECT_NE(r.stdout_text.find("[step " + std::to_string(step) + "]"),
                  std::string::npos)
            << "step " << step << " missing from the log";
    }

    json summary = load_json(out + "/summary.json");
    for (const char* key : {"protocol", "seed", "completed", "frames", "op_counts",
                            "balances", "transcript"}) {
        EXPECT_TRUE(summary.contains(key)) << key;
    }
    EXPECT_TRUE(summary["completed"].get<bool>());
    EXPECT_EQ(summary["frames"]["ENVELOPE"].get<int>(), 5);
    EXPECT_EQ(summary["op_counts"]["purchase"]["rsa_enc"].get<int>(), 0);
    EXPECT_EQ(summary["op_counts"]["purchase"]["rsa_dec"].get<int>(), 0);
}

TEST(Cli, TamperedRunExitsTwoAndNamesTheStep) {
    const std::string out = temp_out("tamper");
    // Frame 10 is the purchase bundle; flip one bit mid-payload.
    CliResult r = run_cli("run --tamper 10:200 --out " + out);
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.stdout_text.find("aborted at step 17"), std::string::npos) << r.stdout_text;
}

TEST(Cli, AttackReportsSchemaForBothTargets) {
    const std::string out = temp_out("attack_b");
    CliResult r = run_cli("attack --protocol baseline --out " + out);
    EXPECT_EQ(r.exit_code, 0);
    json report = load_json(out + "/attack_report.json");
    EXPECT_EQ(report["outcome"], "RECOVERED");
    EXPECT_LE(report["query_count"].get<std::size_t>(), 130u);
    EXPECT_EQ(report["budget"].get<std::size_t>(), 130u);
    EXPECT_EQ(report["recovered_key"].get<std::string>().size(), 32u);
    EXPECT_EQ(report["iterations"].size(), report["query_count"].get<std::size_t>());

    const std::string out2 = temp_out("attack_s");
    CliResult r2 = run_cli("attack --protocol scmci --out " + out2);
    EXPECT_EQ(r2.exit_code, 0);  // a failed attack is a successful experiment
    json report2 = load_json(out2 + "/attack_report.json");
    EXPECT_EQ(report2["outcome"], "FAILED");
    EXPECT_EQ(report2["reason"], "NO_ITERATIVE_ORACLE");
    EXPECT_TRUE(report2["honest_rerun_completed"].get<bool>());
    EXPECT_EQ(report2["target"]["candidates_captured"].get<int>(), 5);
}

TEST(Cli, AnalyzeProducesReportsAndHistograms) {
    const std::string run_out = temp_out("ana_run");
    ASSERT_EQ(run_cli("run --out " + run_out).exit_code, 0);

    const std::string out = temp_out("ana");
    CliResult r = run_cli("analyze " + run_out + "/scmci.transcript --histograms --out " + out);
    EXPECT_EQ(r.exit_code, 0);

    json report = load_json(out + "/report.json");
    ASSERT_TRUE(report.contains("pipeline_comparison"));
    EXPECT_EQ(report["pipeline_comparison"]["cells"].size(), 4u);
    ASSERT_EQ(report["transcripts"].size(), 1u);
    EXPECT_GT(report["transcripts"][0]["payload_bytes"].get<std::size_t>(), 0u);

    std::ifstream csv(out + "/report.csv");
    EXPECT_TRUE(static_cast<bool>(csv));
    std::ifstream hist(out + "/histogram_scmci.csv");
    EXPECT_TRUE(static_cast<bool>(hist));
}

TEST(Cli, BadInputsExitThree) {
    EXPECT_EQ(run_cli("run --hash sha1 --out " + temp_out("bad1")).exit_code, 3);
    EXPECT_EQ(run_cli("run --protocol ssl --out " + temp_out("bad2")).exit_code, 3);
    EXPECT_EQ(run_cli("run --tamper nonsense --out " + temp_out("bad3")).exit_code, 3);
    EXPECT_EQ(run_cli("analyze /nonexistent.transcript --out " + temp_out("bad4")).exit_code,
              3);
    EXPECT_EQ(run_cli("attack --protocol baseline --rsa-bits 128 --sym-bits 128 --out " +
                      temp_out("bad5"))
                  .exit_code,
              3);
}

}  // namespace
