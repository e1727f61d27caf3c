// fslab command line: backtests, baseline tuning, pipeline ablations and
// table rendering, all through the C API of the shared library.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fslab.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

int exit_code_for(fslab_status status) {
    switch (status) {
        case FSLAB_OK: return kExitOk;
        case FSLAB_ERROR_DOMAIN: return kExitDomain;
        case FSLAB_ERROR_IO:
        case FSLAB_ERROR_INVALID_ARGUMENT: return kExitUsage;
        case FSLAB_ERROR_INTERNAL: return kExitDomain;
    }
    return kExitDomain;
}

int fail(fslab_status status) {
    std::cerr << "error: " << fslab_last_error() << "\n";
    return exit_code_for(status);
}

struct OwnedString {
    char* ptr = nullptr;
    ~OwnedString() { fslab_string_free(ptr); }
    std::string str() const { return ptr == nullptr ? std::string{} : std::string(ptr); }
};

// Flag values shared by the run-style subcommands. Flags win over the
// config file so a stored experiment can be re-run with small variations.
struct CommonFlags {
    std::string config_path;
    std::string asset;
    std::string split;
    std::string strategy;
    double fee_rate = -1.0;
    std::string backend;
    std::string fixture;
    std::vector<std::string> ablate;
    bool deterministic = false;
    std::string data_dir;
    std::string out;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file (flags override it)");
    cmd->add_option("--asset", flags.asset, "Asset symbol, e.g. BTC");
    cmd->add_option("--split", flags.split, "validation | test_bull | test_bear");
    cmd->add_option("--strategy", flags.strategy,
                    "buy_and_hold | sma[:W] | slma[:S,L] | macd | bollinger | agent");
    cmd->add_option("--fee-rate", flags.fee_rate, "Proportional fee on traded value")
        ->check(CLI::Range(0.0, 0.999));
    cmd->add_option("--backend", flags.backend, "scripted | http");
    cmd->add_option("--fixture", flags.fixture, "Scripted backend reply fixture (JSON)");
    cmd->add_option("--ablate", flags.ablate, "Agents to disable")->delimiter(',');
    cmd->add_flag("--deterministic", flags.deterministic,
                  "Refuse any non-scripted backend; omit timestamps");
    cmd->add_option("--data-dir", flags.data_dir, "Fixture directory (default: data)");
    cmd->add_option("--out", flags.out, "Write the result JSON here");
}

json load_config(const CommonFlags& flags) {
    json config = json::object();
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in.is_open()) {
            std::cerr << "error: file not found: " << flags.config_path << "\n";
            std::exit(kExitUsage);
        }
        try {
            in >> config;
        } catch (const json::exception& e) {
            std::cerr << "error: malformed config " << flags.config_path << ": " << e.what()
                      << "\n";
            std::exit(kExitUsage);
        }
    }
    if (!flags.asset.empty()) config["asset"] = flags.asset;
    if (!flags.split.empty()) config["split"] = flags.split;
    if (!flags.strategy.empty()) config["strategy"] = flags.strategy;
    if (flags.fee_rate >= 0.0) config["fee_rate"] = flags.fee_rate;
    if (!flags.backend.empty()) config["backend"]["kind"] = flags.backend;
    if (!flags.fixture.empty()) {
        config["backend"]["kind"] = "scripted";
        config["backend"]["fixture"] = flags.fixture;
    }
    if (!flags.ablate.empty()) config["ablate"] = flags.ablate;
    if (flags.deterministic) config["deterministic"] = true;
    if (!flags.data_dir.empty()) config["data_dir"] = flags.data_dir;
    return config;
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out.is_open()) {
        std::cerr << "error: cannot write " << path << "\n";
        return false;
    }
    out << content;
    return out.good();
}

std::string round2(const json& value) {
    if (value.is_null()) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", value.get<double>());
    return buf;
}

int run_backtest(const CommonFlags& flags) {
    const auto config = load_config(flags);
    OwnedString report;
    const auto status = fslab_backtest_run(config.dump().c_str(), &report.ptr);
    if (status != FSLAB_OK) return fail(status);

    const auto doc = json::parse(report.str());
    const auto& metrics = doc.at("metrics");
    std::cout << doc.value("asset", "?") << " " << doc.at("split").value("kind", "?") << " "
              << doc.at("strategy").value("label", "?")
              << ": total return " << round2(metrics.at("total_return_pct")) << "%, sharpe "
              << round2(metrics.at("sharpe_ratio")) << "\n";

    if (!flags.out.empty() && !write_file(flags.out, report.str())) return kExitUsage;
    if (config.contains("transcript_out") && doc.contains("transcript_jsonl")) {
        if (!write_file(config.at("transcript_out").get<std::string>(),
                        doc.at("transcript_jsonl").get<std::string>()))
            return kExitUsage;
    }
    return kExitOk;
}

int run_tune(const CommonFlags& flags, const std::vector<std::size_t>& windows) {
    auto config = load_config(flags);
    if (!windows.empty()) config["grid"]["windows"] = windows;
    if (!flags.strategy.empty()) config["grid"]["family"] = flags.strategy;
    OwnedString result;
    const auto status = fslab_tune_run(config.dump().c_str(), &result.ptr);
    if (status != FSLAB_OK) return fail(status);

    const auto doc = json::parse(result.str());
    std::cout << "chosen: " << doc.at("chosen").value("label", "?") << " (validation return "
              << round2(doc.at("chosen_return_pct")) << "%)\n";
    for (const auto& c : doc.at("candidates")) {
        std::cout << "  " << c.at("params").value("label", "?") << " -> "
                  << round2(c.at("total_return_pct")) << "%\n";
    }
    if (!flags.out.empty() && !write_file(flags.out, result.str())) return kExitUsage;
    return kExitOk;
}

int run_ablate(const CommonFlags& flags, const std::vector<std::string>& variants,
               bool markdown) {
    auto config = load_config(flags);
    if (!variants.empty()) config["variants"] = variants;
    OwnedString result;
    auto status = fslab_ablation_run(config.dump().c_str(), &result.ptr);
    if (status != FSLAB_OK) return fail(status);

    OwnedString table;
    status = fslab_render_ablation_table(result.ptr, markdown ? 1 : 0, &table.ptr);
    if (status != FSLAB_OK) return fail(status);
    std::cout << table.str();
    if (!flags.out.empty() && !write_file(flags.out, result.str())) return kExitUsage;
    return kExitOk;
}

int run_report(const std::vector<std::string>& files, bool markdown, const std::string& out) {
    json array = json::array();
    for (const auto& path : files) {
        std::ifstream in(path);
        if (!in.is_open()) {
            std::cerr << "error: file not found: " << path << "\n";
            return kExitUsage;
        }
        json body;
        try {
            in >> body;
        } catch (const json::exception& e) {
            std::cerr << "error: malformed report " << path << ": " << e.what() << "\n";
            return kExitUsage;
        }
        array.push_back({{"path", path}, {"report", body}});
    }
    OwnedString table;
    const auto status = fslab_render_table(array.dump().c_str(), markdown ? 1 : 0, &table.ptr);
    if (status != FSLAB_OK) return fail(status);
    std::cout << table.str();
    if (!out.empty() && !write_file(out, table.str())) return kExitUsage;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fslab: crypto trading lab (version " + std::string(fslab_version()) + ")"};
    app.require_subcommand(1);

    CommonFlags backtest_flags;
    auto* backtest = app.add_subcommand("backtest", "Run one backtest and write a JSON report");
    add_common_flags(backtest, backtest_flags);

    CommonFlags tune_flags;
    std::vector<std::size_t> tune_windows;
    auto* tune = app.add_subcommand("tune", "Grid-tune sma/slma on a validation split");
    add_common_flags(tune, tune_flags);
    tune->add_option("--windows", tune_windows, "Window grid (default 5,10,15,20,25,30)")
        ->delimiter(',');

    CommonFlags ablate_flags;
    std::vector<std::string> ablate_variants;
    bool ablate_markdown = false;
    auto* ablate = app.add_subcommand("ablate", "Run the agent pipeline and its ablations");
    add_common_flags(ablate, ablate_flags);
    ablate->add_option("--variants", ablate_variants,
                       "Variants to run (default: full plus each single-agent removal)")
        ->delimiter(',');
    ablate->add_flag("--markdown", ablate_markdown, "Markdown table output");

    std::vector<std::string> report_files;
    bool report_markdown = false;
    std::string report_out;
    auto* report = app.add_subcommand("report", "Render stored reports as a results table");
    report->add_option("files", report_files, "Backtest report JSON files")->required();
    report->add_flag("--markdown", report_markdown, "Markdown table output");
    report->add_option("--out", report_out, "Write the table here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (backtest->parsed()) return run_backtest(backtest_flags);
    if (tune->parsed()) return run_tune(tune_flags, tune_windows);
    if (ablate->parsed()) return run_ablate(ablate_flags, ablate_variants, ablate_markdown);
    if (report->parsed()) return run_report(report_files, report_markdown, report_out);
    return kExitUsage;
}
