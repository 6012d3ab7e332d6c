// Scenario runner for the purchase-protocol experiments.
//
//   scmci_cli run      execute a protocol scenario and write its transcript
//   scmci_cli attack   run the key-recovery campaign against a scenario
//   scmci_cli analyze  entropy/op-count reports over saved transcripts
//
// All outputs are reproducible from the scenario config alone; wall-clock
// timings go to stderr only so report files stay byte-stable.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "scmci/adversary.hpp"
#include "scmci/analysis.hpp"
#include "scmci/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitProtocolAbort = 2;
constexpr int kExitBadInput = 3;

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> protocol;
    std::optional<unsigned> rsa_bits;
    std::optional<unsigned> sym_bits;
    std::optional<std::string> hash;
    std::optional<std::string> sealing;
    std::optional<std::string> out_dir;
    std::optional<std::string> tamper;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "scenario config file (flat key = value)");
    cmd->add_option("--seed", o.seed, "root seed for all randomness");
    cmd->add_option("--protocol", o.protocol, "scmci | baseline");
    cmd->add_option("--rsa-bits", o.rsa_bits, "RSA modulus size [64, 2048]");
    cmd->add_option("--sym-bits", o.sym_bits, "session key size in bits");
    cmd->add_option("--hash", o.hash, "md5 | sha256");
    cmd->add_option("--sealing", o.sealing, "textbook | masked envelope sealing");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--tamper", o.tamper, "flip <frame-index>:<bit-index> in flight");
}

scmci::ScenarioConfig resolve_config(const Overrides& o) {
    scmci::ScenarioConfig cfg;
    if (!o.config_path.empty()) cfg = scmci::ScenarioConfig::from_file(o.config_path);
    if (o.seed) cfg.seed = *o.seed;
    if (o.protocol) cfg.protocol = *o.protocol;
    if (o.rsa_bits) cfg.rsa_bits = *o.rsa_bits;
    if (o.sym_bits) cfg.sym_bits = *o.sym_bits;
    if (o.hash) cfg.hash = *o.hash;
    if (o.sealing) cfg.sealing = *o.sealing;
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.tamper) cfg.set_tamper(*o.tamper);
    cfg.validate();
    return cfg;
}

void install_tamper_hook(scmci::Bus& bus, std::size_t frame_index, std::size_t bit_index) {
    auto counter = std::make_shared<std::size_t>(0);
    bus.set_hook([counter, frame_index, bit_index](scmci::WireMessage& msg,
                                                   std::vector<scmci::WireMessage>&) {
        if ((*counter)++ == frame_index && bit_index / 8 < msg.payload.size()) {
            msg.payload[bit_index / 8] ^= static_cast<std::uint8_t>(1u << (bit_index % 8));
        }
        return true;
    });
}

json ops_json(const scmci::OpCounts& ops) { return scmci::analysis::ops_to_json(ops); }

json frame_census(const scmci::Transcript& transcript) {
    std::map<std::string, std::size_t> census;
    for (const auto& e : transcript.entries()) ++census[msg_type_name(e.msg.msg_type)];
    json out = json::object();
    for (const auto& [name, count] : census) out[name] = count;
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream file(path, std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    file << text;
}

int cmd_run(const scmci::ScenarioConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const auto t0 = std::chrono::steady_clock::now();

    if (cfg.protocol == "scmci") {
        scmci::proto::ProtocolRun run(cfg.to_protocol_config());
        if (cfg.tamper) install_tamper_hook(run.bus(), cfg.tamper->first, cfg.tamper->second);
        scmci::proto::RunResult result = run.run_all();

        for (const auto& step : run.journal().steps())
            std::cout << "[step " << step.number << "] " << step.note << "\n";
        for (const auto& reject : run.journal().rejects())
            std::cout << "[reject] " << reject << "\n";

        const fs::path transcript_path = fs::path(cfg.out_dir) / "scmci.transcript";
        run.bus().transcript().save(transcript_path.string());

        json summary = {
            {"protocol", "scmci"},
            {"seed", cfg.seed},
            {"rsa_bits", cfg.rsa_bits},
            {"sym_bits", cfg.sym_bits},
            {"hash", cfg.hash},
            {"sealing", cfg.sealing},
            {"completed", result.completed},
            {"failed_step", result.failed_step},
            {"failure", result.failure},
            {"steps_logged", run.journal().steps().size()},
            {"frames", frame_census(run.bus().transcript())},
            {"op_counts",
             {{"setup", ops_json(result.setup_ops)},
              {"purchase", ops_json(result.purchase_ops)},
              {"settlement", ops_json(result.settlement_ops)}}},
            {"balances",
             {{"customer_bank", result.cb_balance_after},
              {"merchant_bank", result.mb_balance_after}}},
            {"transcript",
             {{"path", transcript_path.string()}, {"md5", result.transcript_checksum}}},
        };
        write_text(fs::path(cfg.out_dir) / "summary.json", summary.dump(2) + "\n");

        std::chrono::duration<double, std::milli> elapsed =
            std::chrono::steady_clock::now() - t0;
        std::cerr << "run time: " << elapsed.count() << " ms\n";

        if (!result.completed) {
            std::cout << "aborted at step " << result.failed_step << ": " << result.failure
                      << "\n";
            return kExitProtocolAbort;
        }
        std::cout << "completed: steps 1-30, transcript " << transcript_path.string() << "\n";
        return kExitOk;
    }

    // Baseline: one hybrid message per fixture text.
    scmci::baseline::BaselineSession session(cfg.seed, cfg.rsa_bits, cfg.sym_bits / 8);
    if (cfg.tamper) install_tamper_hook(session.bus(), cfg.tamper->first, cfg.tamper->second);
    const scmci::OpCounts before = scmci::op_snapshot();
    session.send_message(scmci::bytes_of(cfg.order_text));
    session.send_message(scmci::bytes_of(cfg.payment_text));
    const scmci::OpCounts used = scmci::ops_since(before);

    const fs::path transcript_path = fs::path(cfg.out_dir) / "baseline.transcript";
    session.bus().transcript().save(transcript_path.string());

    json verdicts = json::array();
    for (const auto& v : session.verdicts())
        verdicts.push_back({{"accepted", v.accepted}, {"reason", v.reason}});
    json summary = {
        {"protocol", "baseline"},
        {"seed", cfg.seed},
        {"rsa_bits", cfg.rsa_bits},
        {"sym_bits", cfg.sym_bits},
        {"messages", 2},
        {"verdicts", verdicts},
        {"op_counts", ops_json(used)},
        {"frames", frame_census(session.bus().transcript())},
        {"transcript",
         {{"path", transcript_path.string()},
          {"md5", session.bus().transcript().checksum()}}},
    };
    write_text(fs::path(cfg.out_dir) / "summary.json", summary.dump(2) + "\n");

    std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - t0;
    std::cerr << "run time: " << elapsed.count() << " ms\n";
    for (std::size_t i = 0; i < session.verdicts().size(); ++i)
        std::cout << "message " << i << ": "
                  << (session.verdicts()[i].accepted ? "ACCEPT" : "REJECT") << "\n";
    std::cout << "completed: transcript " << transcript_path.string() << "\n";
    return kExitOk;
}

int cmd_attack(const scmci::ScenarioConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const auto t0 = std::chrono::steady_clock::now();

    scmci::attack::AttackOutcome outcome;
    json target_info;
    bool honest_rerun_completed = false;

    if (cfg.protocol == "baseline") {
        if (cfg.rsa_bits < 2 * cfg.sym_bits)
            throw scmci::ConfigError("rsa_bits",
                                     "attack needs rsa_bits >= 2 * sym_bits for the baseline");
        scmci::baseline::BaselineSession session(cfg.seed, cfg.rsa_bits, cfg.sym_bits / 8);
        session.send_message(scmci::bytes_of(cfg.order_text));
        auto candidates = scmci::attack::capture(session.bus().transcript());
        if (candidates.empty()) throw std::logic_error("no sealed-key frame captured");

        scmci::attack::AttackState state = scmci::attack::AttackState::for_target(
            candidates[0], session.merchant_keys().pub(), cfg.sym_bits);
        outcome = scmci::attack::run_attack_cycle(
            state, scmci::attack::baseline_oracle(session.merchant_keys().priv(),
                                                  cfg.sym_bits / 8));
        target_info = {{"protocol", "baseline"},
                       {"frame_index", candidates[0].frame_index},
                       {"frame_type", msg_type_name(candidates[0].type)}};
        honest_rerun_completed = true;  // baseline receiver is stateless
    } else {
        scmci::proto::ScmciConfig pc = cfg.to_protocol_config();
        scmci::proto::ProtocolRun run(pc);
        scmci::proto::RunResult run_result = run.run_all();
        if (!run_result.completed)
            throw std::logic_error("scenario did not complete: " + run_result.failure);
        auto candidates = scmci::attack::capture(run.bus().transcript());
        if (candidates.empty()) throw std::logic_error("no sealed-key frame captured");

        scmci::attack::ScmciSetupOracle oracle(pc, scmci::KeyId::kSk1);
        scmci::attack::AttackState state = scmci::attack::AttackState::for_target(
            candidates[0], run.customer().rsa().pub(), cfg.sym_bits);
        outcome = scmci::attack::run_attack_cycle(state, oracle.oracle());
        target_info = {{"protocol", "scmci"},
                       {"frame_index", candidates[0].frame_index},
                       {"frame_type", msg_type_name(candidates[0].type)},
                       {"candidates_captured", candidates.size()}};

        scmci::proto::ProtocolRun rerun(pc);
        honest_rerun_completed = rerun.run_all().completed;
    }

    json iterations = json::array();
    for (const auto& it : outcome.iterations)
        iterations.push_back({{"query", it.index},
                              {"probe", it.probe},
                              {"verdict", scmci::attack::verdict_name(it.verdict)}});
    json report = {
        {"target", target_info},
        {"key_bits", cfg.sym_bits},
        {"budget", outcome.budget},
        {"query_count", outcome.query_count},
        {"outcome", outcome.recovered ? "RECOVERED" : "FAILED"},
        {"reason", scmci::attack::fail_reason_name(outcome.reason)},
        {"recovered_key", outcome.recovered ? scmci::to_hex(outcome.recovered_key) : ""},
        {"honest_rerun_completed", honest_rerun_completed},
        {"iterations", iterations},
    };
    write_text(fs::path(cfg.out_dir) / "attack_report.json", report.dump(2) + "\n");

    std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - t0;
    std::cerr << "attack time: " << elapsed.count() << " ms\n";

    std::cout << "target: " << cfg.protocol << "\n"
              << "outcome: " << (outcome.recovered ? "RECOVERED" : "FAILED") << "\n"
              << "queries: " << outcome.query_count << " / budget " << outcome.budget << "\n";
    if (outcome.recovered)
        std::cout << "recovered key: " << scmci::to_hex(outcome.recovered_key) << "\n";
    else
        std::cout << "reason: " << scmci::attack::fail_reason_name(outcome.reason) << "\n";
    return kExitOk;
}

int cmd_analyze(const scmci::ScenarioConfig& cfg, const std::vector<std::string>& paths,
                bool write_histograms) {
    fs::create_directories(cfg.out_dir);
    const auto t0 = std::chrono::steady_clock::now();

    json transcript_rows = json::array();
    std::string csv_rows;
    for (const std::string& path : paths) {
        std::vector<scmci::WireMessage> frames = scmci::Transcript::load(path);
        scmci::analysis::Histogram h = scmci::analysis::transcript_payload_histogram(frames);
        if (h.total == 0)
            throw scmci::ConfigError("transcript",
                                     "no payload bytes to analyze in " + path);
        const double entropy = scmci::analysis::shannon_entropy(h);
        transcript_rows.push_back({{"path", path},
                                   {"frames", frames.size()},
                                   {"payload_bytes", h.total},
                                   {"entropy_bits_per_byte", entropy}});
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.9f", entropy);
        csv_rows += fs::path(path).filename().string() + ",TRANSCRIPT," + buf + "," +
                    std::to_string(h.total) + "\n";
        if (write_histograms) {
            const std::string stem = fs::path(path).stem().string();
            write_text(fs::path(cfg.out_dir) / ("histogram_" + stem + ".csv"),
                       scmci::analysis::histogram_table(h));
        }
    }

    scmci::analysis::EntropyReport pipeline = scmci::analysis::compare_pipelines(
        scmci::bytes_of(cfg.order_text), scmci::bytes_of(cfg.payment_text), cfg.seed,
        cfg.rsa_bits);

    json report = {
        {"transcripts", transcript_rows},
        {"pipeline_comparison", scmci::analysis::report_to_json(pipeline)},
    };
    write_text(fs::path(cfg.out_dir) / "report.json", report.dump(2) + "\n");
    write_text(fs::path(cfg.out_dir) / "report.csv",
               scmci::analysis::report_to_csv(pipeline) + csv_rows);

    std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - t0;
    std::cerr << "analyze time: " << elapsed.count() << " ms (scmci pipeline "
              << pipeline.scmci_micros << " us, baseline pipeline " << pipeline.baseline_micros
              << " us)\n";

    for (const auto& cell : pipeline.cells)
        std::cout << cell.stream << "/" << cell.protocol << ": " << cell.entropy_bits_per_byte
                  << " bits/byte over " << cell.byte_count << " bytes\n";
    for (const auto& row : transcript_rows)
        std::cout << row["path"].get<std::string>() << ": "
                  << row["entropy_bits_per_byte"].get<double>() << " bits/byte\n";
    std::cout << "reports written to " << cfg.out_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"purchase-protocol scenario runner"};
    app.require_subcommand(1);

    Overrides run_opts, attack_opts, analyze_opts;
    std::vector<std::string> transcript_paths;
    bool write_histograms = false;

    CLI::App* run_cmd = app.add_subcommand("run", "execute a protocol scenario");
    add_common_options(run_cmd, run_opts);

    CLI::App* attack_cmd = app.add_subcommand("attack", "run the key-recovery campaign");
    add_common_options(attack_cmd, attack_opts);

    CLI::App* analyze_cmd = app.add_subcommand("analyze", "entropy reports over transcripts");
    add_common_options(analyze_cmd, analyze_opts);
    analyze_cmd->add_option("transcripts", transcript_paths, "transcript files to analyze")
        ->required();
    analyze_cmd->add_flag("--histograms", write_histograms,
                          "also write 256-row histogram tables");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(resolve_config(run_opts));
        if (attack_cmd->parsed()) return cmd_attack(resolve_config(attack_opts));
        return cmd_analyze(resolve_config(analyze_opts), transcript_paths, write_histograms);
    } catch (const scmci::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
}
