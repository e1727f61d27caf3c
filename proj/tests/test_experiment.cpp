#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "fslab/error.hpp"
#include "fslab/experiment.hpp"
#include "test_support.hpp"

using namespace fslab;
using nlohmann::json;

namespace {

json base_config() {
    json config;
    config["asset"] = "BTC";
    config["split"] = "test_bull";
    config["strategy"] = "buy_and_hold";
    config["data_dir"] = testsupport::repo_path("data").string();
    config["deterministic"] = true;
    return config;
}

json agent_config() {
    auto config = base_config();
    config["strategy"] = "agent";
    config["backend"] = {
        {"kind", "scripted"},
        {"fixture", testsupport::repo_path("data/fixtures/agent_replies.json").string()}};
    return config;
}

}  // namespace

TEST_CASE("run_backtest from config") {
    SUBCASE("rule strategy") {
        const auto report = experiment::run_backtest(base_config());
        CHECK(report.at("schema") == "fslab.backtest_report.v1");
        CHECK(std::abs(report.at("metrics").at("total_return_pct").get<double>() - 79.63) <=
              0.01);
        CHECK(report.at("records").size() == 49);
        CHECK(report.at("strategy").at("label") == "Buy and Hold");
        CHECK(!report.contains("metadata"));  // deterministic: no timestamp
    }
    SUBCASE("strategy string with parameters") {
        auto config = base_config();
        config["strategy"] = "slma:5,20";
        const auto report = experiment::run_backtest(config);
        CHECK(report.at("strategy").at("short_window") == 5);
        CHECK(report.at("strategy").at("long_window") == 20);
    }
    SUBCASE("agent strategy is reproducible byte for byte") {
        const auto r1 = experiment::run_backtest(agent_config());
        const auto r2 = experiment::run_backtest(agent_config());
        CHECK(r1.dump() == r2.dump());
        CHECK(r1.at("counters").at("backend_calls") == 6 + 48 * 7);
        CHECK(r1.at("decisions").size() == 49);
        CHECK(!r1.at("transcript_jsonl").get<std::string>().empty());
    }
    SUBCASE("non-deterministic runs differ at most in the metadata timestamp") {
        auto config = base_config();
        config["deterministic"] = false;
        auto r1 = experiment::run_backtest(config);
        auto r2 = experiment::run_backtest(config);
        CHECK(r1.contains("metadata"));
        r1.erase("metadata");
        r2.erase("metadata");
        CHECK(r1.dump() == r2.dump());
    }
    SUBCASE("custom split object") {
        auto config = base_config();
        config["split"] = {{"kind", "validation"},
                           {"start_date", "2024-01-24"},
                           {"end_date", "2024-01-31"},
                           {"start_price", 39877.59},
                           {"end_price", 40000.0}};
        config["market_csv"] = testsupport::repo_path("data/btc_test_bull.csv").string();
        const auto report = experiment::run_backtest(config);
        CHECK(report.at("records").size() == 7);
    }
    SUBCASE("config validation errors") {
        CHECK_THROWS_AS(experiment::run_backtest(json::object()), DomainError);
        auto bad = base_config();
        bad["strategy"] = "wavelet";
        CHECK_THROWS_AS(experiment::run_backtest(bad), DomainError);
        auto det = agent_config();
        det["backend"] = {{"kind", "http"}, {"endpoint", "http://example.invalid"}};
        CHECK_THROWS_WITH_AS(experiment::run_backtest(det),
                             doctest::Contains("deterministic"), DomainError);
        auto nofix = agent_config();
        nofix["backend"].erase("fixture");
        CHECK_THROWS_AS(experiment::run_backtest(nofix), DomainError);
    }
    SUBCASE("missing market data file") {
        auto config = base_config();
        config["market_csv"] = "/nonexistent.csv";
        CHECK_THROWS_AS(experiment::run_backtest(config), IoError);
    }
}

TEST_CASE("run_tune from config") {
    json config;
    config["asset"] = "SYN";
    config["split"] = {{"kind", "validation"},
                       {"start_date", "2025-01-01"},
                       {"end_date", "2025-03-02"},
                       {"start_price", 115.26},
                       {"end_price", 151.22}};
    config["market_csv"] = testsupport::repo_path("data/synthetic_tune.csv").string();
    config["deterministic"] = true;

    const auto result = experiment::run_tune(config);
    CHECK(result.at("chosen").at("window") == 10);
    CHECK(result.at("candidates").size() == 6);
    CHECK(std::abs(result.at("chosen_return_pct").get<double>() - 12.145055113481) < 1e-6);

    SUBCASE("explicit grid") {
        config["grid"] = {{"family", "sma"}, {"windows", {15}}};
        const auto singleton = experiment::run_tune(config);
        CHECK(singleton.at("chosen").at("window") == 15);
    }
    SUBCASE("empty grid") {
        config["grid"] = {{"family", "sma"}, {"windows", json::array()}};
        CHECK_THROWS_AS(experiment::run_tune(config), DomainError);
    }
}

TEST_CASE("run_ablation from config") {
    json config;
    config["asset"] = "BTC";
    config["backend"] = {
        {"kind", "scripted"},
        {"fixture", testsupport::repo_path("data/fixtures/agent_replies.json").string()}};
    config["data_dir"] = testsupport::repo_path("data").string();
    config["deterministic"] = true;
    // keep the test quick: a short custom window per regime via explicit data
    config["regimes"] = {"test_bull"};

    SUBCASE("full set has five labeled rows") {
        const auto result = experiment::run_ablation(config);
        REQUIRE(result.at("rows").size() == 5);
        CHECK(result.at("rows")[0].at("label") == "Full");
        CHECK(result.at("rows")[1].at("label") == "w/o Reflection Agent");
        CHECK(result.at("rows")[2].at("label") == "w/o Fact Reasoning Agent");
        CHECK(result.at("rows")[3].at("label") == "w/o Sub. Reasoning Agent");
        CHECK(result.at("rows")[4].at("label") == "w/o Statistics Agent");
        for (const auto& row : result.at("rows"))
            CHECK(row.at("cells").contains("test_bull"));
    }
    SUBCASE("full-only mode is a one-row table") {
        config["variants"] = {"full"};
        const auto result = experiment::run_ablation(config);
        CHECK(result.at("rows").size() == 1);
    }
    SUBCASE("unknown variant is rejected with the valid names") {
        config["variants"] = {"quantum"};
        CHECK_THROWS_WITH_AS(experiment::run_ablation(config), doctest::Contains("valid:"),
                             DomainError);
    }
    SUBCASE("per-regime data paths override the conventions") {
        config["variants"] = {"full"};
        config["data"]["test_bull"] = {
            {"market_csv", testsupport::repo_path("data/btc_test_bull.csv").string()},
            {"news_json", testsupport::repo_path("data/btc_test_bull_news.json").string()}};
        config.erase("data_dir");
        const auto result = experiment::run_ablation(config);
        CHECK(result.at("rows")[0].at("cells").contains("test_bull"));
    }
}
