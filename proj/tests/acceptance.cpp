// Acceptance suite: runs every gate criterion end to end and prints one
// PASS/FAIL line per criterion. Exits non-zero if any criterion fails.
//
// Known data caveat, reported rather than hidden: the three SOL rows of the
// bundled reference split table carry published trend figures that are not
// consistent with their own open/close prices (the BTC and ETH rows are).
// Criteria 1 and 2 compare against the published figures as stated, so the
// SOL rows fail them; the diagnostics show the engine agrees with the price
// arithmetic to machine precision in every case.

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fslab.h"
#include "fslab/agents/backend.hpp"
#include "fslab/agents/pipeline.hpp"
#include "fslab/agents/prompts.hpp"
#include "fslab/engine.hpp"
#include "fslab/error.hpp"
#include "fslab/indicators.hpp"
#include "fslab/market_data.hpp"
#include "fslab/metrics.hpp"
#include "fslab/strategies.hpp"

#ifndef FSLAB_REPO_DIR
#error "acceptance needs FSLAB_REPO_DIR"
#endif

using namespace fslab;
using nlohmann::json;

namespace {

std::string repo(const std::string& rel) { return std::string(FSLAB_REPO_DIR) + "/" + rel; }

struct Criterion {
    Criterion(int id_, std::string title_) : id(id_), title(std::move(title_)) {}

    int id;
    std::string title;
    bool pass = true;
    std::vector<std::string> details;

    void fail(const std::string& detail) {
        pass = false;
        details.push_back("FAIL  " + detail);
    }
    void note(const std::string& detail) { details.push_back("      " + detail); }
    void require(bool ok, const std::string& detail) {
        if (!ok) fail(detail);
    }
};

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Split-trend reproduction over all nine reference rows.

Criterion criterion_split_trends() {
    Criterion c{1, "Split-trend reproduction (9 reference rows, ±0.01pp)"};
    for (const auto& split : market::reference_splits()) {
        const double computed = market::split_trend(split);
        const double expected = *split.expected_trend_pct;
        const double diff = std::abs(computed - expected);
        const auto line = fmt("%s %-10s computed %+9.4f%%  published %+7.2f%%  diff %8.4fpp",
                              split.asset_id.c_str(),
                              std::string(market::to_string(split.kind)).c_str(), computed,
                              expected, diff);
        if (diff <= 0.01) {
            c.note(line);
        } else {
            c.fail(line + "  (published trend inconsistent with its own open/close prices)");
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// 2. Buy-and-hold engine reproduction on each test split, fee-free.

Criterion criterion_buy_and_hold() {
    Criterion c{2, "Buy-and-hold engine reproduction (test splits, fee 0, ±0.01pp)"};
    for (const char* asset : {"BTC", "ETH", "SOL"}) {
        for (auto kind : {market::SplitKind::test_bull, market::SplitKind::test_bear}) {
            const auto& split = market::reference_split(asset, kind);
            std::string stem = asset;
            for (auto& ch : stem) ch = static_cast<char>(std::tolower(ch));
            const auto series = market::load_market_csv(
                repo("data/" + stem + "_" + std::string(market::to_string(kind)) + ".csv"),
                asset);
            strategies::StrategyKind bh;  // buy and hold
            auto strategy = strategies::make_rule_strategy(bh, series);
            const auto result = engine::run_backtest(*strategy, series, nullptr, split);

            const double got = result.metrics.total_return_pct;
            const double published = *split.expected_trend_pct;
            const double price_trend = market::split_trend(split);
            const double vs_published = std::abs(got - published);
            const double vs_prices = std::abs(got - price_trend);
            const auto line =
                fmt("%s %-9s engine %+9.4f%%  published %+7.2f%% (diff %8.4fpp)  "
                    "price-arithmetic diff %.2e",
                    asset, std::string(market::to_string(kind)).c_str(), got, published,
                    vs_published, vs_prices);
            if (vs_prices > 1e-9)
                c.fail(line + "  (engine disagrees with the price arithmetic)");
            else if (vs_published <= 0.01)
                c.note(line);
            else
                c.fail(line + "  (published trend inconsistent with its own prices)");
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// 3. Sharpe formula cross-check against the published buy-and-hold rows.

Criterion criterion_sharpe_crosscheck() {
    Criterion c{3, "Sharpe cross-check (published buy-and-hold rows, ±0.015)"};
    struct Row {
        const char* name;
        double mean, stdev, sharpe;
    };
    const Row rows[] = {
        {"BTC bull", 1.18, 2.21, 0.53}, {"BTC bear", -0.38, 1.79, -0.21},
        {"ETH bull", 1.18, 2.21, 0.53}, {"ETH bear", -0.60, 2.13, -0.28},
        {"SOL bull", 1.23, 3.39, 0.36}, {"SOL bear", -0.45, 3.97, -0.11},
    };
    for (const auto& row : rows) {
        const double ratio = row.mean / row.stdev;
        const double diff = std::abs(ratio - row.sharpe);
        const auto line = fmt("%s mean/std %+0.4f vs published sharpe %+0.2f (diff %.4f)",
                              row.name, ratio, row.sharpe, diff);
        if (diff <= 0.015)
            c.note(line);
        else
            c.fail(line);
    }
    // The same arithmetic must hold for the library's own formulas.
    const std::vector<double> sample{0.0118 - 0.0221, 0.0118, 0.0118 + 0.0221};
    c.require(std::abs(metrics::sharpe(sample) - 0.53) <= 0.01,
              "library sharpe(mean 1.18, std 2.21) not within 0.53 +- 0.01");
    return c;
}

// ---------------------------------------------------------------------------
// 4. Indicator implementations against a brute-force oracle.

namespace oracle {

std::vector<std::optional<double>> sma(const std::vector<double>& p, std::size_t w) {
    std::vector<std::optional<double>> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i + 1 < w) continue;
        double sum = 0.0;
        for (std::size_t j = i + 1 - w; j <= i; ++j) sum += p[j];
        out[i] = sum / static_cast<double>(w);
    }
    return out;
}

std::vector<std::optional<double>> ema(const std::vector<double>& p, std::size_t period) {
    const double a = 2.0 / (static_cast<double>(period) + 1.0);
    std::vector<std::optional<double>> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        double v = std::pow(1.0 - a, static_cast<double>(i)) * p[0];
        for (std::size_t j = 1; j <= i; ++j)
            v += a * std::pow(1.0 - a, static_cast<double>(i - j)) * p[j];
        out[i] = v;
    }
    return out;
}

}  // namespace oracle

Criterion criterion_indicator_oracle() {
    Criterion c{4, "Indicator oracle equivalence (200 random series, 1e-9 absolute)"};
    const auto start = std::chrono::steady_clock::now();

    std::mt19937 rng(20240124);
    std::uniform_int_distribution<std::size_t> len_dist(1, 100);
    std::uniform_real_distribution<double> scale_dist(1.0, 400.0);
    std::uniform_real_distribution<double> step(-0.05, 0.05);

    std::size_t comparisons = 0;
    double worst = 0.0;
    for (int round = 0; round < 200 && c.pass; ++round) {
        const std::size_t n = len_dist(rng);
        std::vector<double> p(n);
        double v = scale_dist(rng);
        for (std::size_t i = 0; i < n; ++i) {
            v = std::max(0.5, v * (1.0 + step(rng)));
            p[i] = v;
        }
        const std::size_t w = std::uniform_int_distribution<std::size_t>(2, 30)(rng);

        const auto check_series = [&](const indicators::IndicatorSeries& got,
                                      const std::vector<std::optional<double>>& want,
                                      const char* what) {
            if (got.size() != want.size()) {
                c.fail(fmt("%s: size mismatch on round %d", what, round));
                return;
            }
            for (std::size_t i = 0; i < got.size(); ++i) {
                if (got[i].has_value() != want[i].has_value()) {
                    c.fail(fmt("%s: warm-up mismatch at %zu on round %d", what, i, round));
                    return;
                }
                if (!got[i]) continue;
                const double diff = std::abs(*got[i] - *want[i]);
                worst = std::max(worst, diff);
                ++comparisons;
                if (diff > 1e-9) {
                    c.fail(fmt("%s: |diff| %.3e > 1e-9 at index %zu, round %d", what, diff, i,
                               round));
                    return;
                }
            }
        };

        check_series(indicators::sma(p, w), oracle::sma(p, w), "sma");
        check_series(indicators::ema(p, w), oracle::ema(p, w), "ema");

        const auto got_macd = indicators::macd(p);
        const auto e12 = oracle::ema(p, 12);
        const auto e26 = oracle::ema(p, 26);
        std::vector<double> diff_line(n);
        for (std::size_t i = 0; i < n; ++i) diff_line[i] = *e12[i] - *e26[i];
        std::vector<std::optional<double>> want_macd(diff_line.begin(), diff_line.end());
        check_series(got_macd.macd_line, want_macd, "macd line");
        check_series(got_macd.signal_line, oracle::ema(diff_line, 9), "macd signal");

        const auto got_b = indicators::bollinger(p, w, 2.0);
        const auto mid = oracle::sma(p, w);
        std::vector<std::optional<double>> upper(n), lower(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!mid[i]) continue;
            double sq = 0.0;
            for (std::size_t j = i + 1 - w; j <= i; ++j)
                sq += (p[j] - *mid[i]) * (p[j] - *mid[i]);
            const double sigma = std::sqrt(sq / static_cast<double>(w));
            upper[i] = *mid[i] + 2.0 * sigma;
            lower[i] = *mid[i] - 2.0 * sigma;
        }
        check_series(got_b.mid, mid, "bollinger mid");
        check_series(got_b.upper, upper, "bollinger upper");
        check_series(got_b.lower, lower, "bollinger lower");
    }

    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                              start);
    c.note(fmt("%zu values compared, worst |diff| %.3e, %lld ms", comparisons, worst,
               static_cast<long long>(elapsed.count())));
    c.require(elapsed.count() < 5000, "oracle comparison exceeded the 5 s budget");
    return c;
}

// ---------------------------------------------------------------------------
// 5. Engine property suite.

Criterion criterion_engine_properties() {
    Criterion c{5, "Engine properties (1,000 random action sequences; round trips)"};
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> action(-1.0, 1.0);
    std::uniform_real_distribution<double> price_dist(0.5, 60'000.0);
    std::uniform_real_distribution<double> fee_dist(0.0, 0.05);

    std::size_t executions = 0;
    for (int round = 0; round < 1000 && c.pass; ++round) {
        const double fee = (round % 4 == 0) ? 0.0 : fee_dist(rng);
        engine::PortfolioState state = engine::init_portfolio(1'000'000.0, price_dist(rng), fee);
        for (int step = 0; step < 30; ++step) {
            state = engine::execute_action(state, engine::TradeAction(action(rng)),
                                           price_dist(rng));
            ++executions;
            if (state.cash < 0.0 || state.units < 0.0) {
                c.fail(fmt("negative balance on round %d step %d: cash %.17g units %.17g",
                           round, step, state.cash, state.units));
                break;
            }
        }
    }
    c.note(fmt("%zu executions kept cash and units non-negative", executions));

    for (int round = 0; round < 1000 && c.pass; ++round) {
        const double p = price_dist(rng);
        const double a = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
        engine::PortfolioState s{1000.0, 2.0, 0.0};
        const auto bought = engine::execute_action(s, engine::TradeAction(a), p);
        const double acquired = bought.units - s.units;
        const auto back =
            engine::execute_action(bought, engine::TradeAction(-(acquired / bought.units)), p);
        const double drift =
            std::abs(engine::net_worth(back, p) - engine::net_worth(s, p)) /
            engine::net_worth(s, p);
        if (drift > 1e-9) {
            c.fail(fmt("fee-0 round trip drifted %.3e relative on round %d", drift, round));
        }

        engine::PortfolioState f{1000.0, 2.0, std::max(1e-6, fee_dist(rng))};
        const auto fb = engine::execute_action(f, engine::TradeAction(a), p);
        const auto fs = engine::execute_action(fb, engine::TradeAction(-a), p);
        if (!(engine::net_worth(fs, p) < engine::net_worth(f, p))) {
            c.fail(fmt("fee>0 round trip failed to lose value on round %d", round));
        }
    }
    if (c.pass) c.note("fee-0 round trips hold net worth to 1e-9; any fee strictly loses");
    return c;
}

// ---------------------------------------------------------------------------
// 6. Agent pipeline determinism and per-day call counts.

Criterion criterion_pipeline_determinism() {
    Criterion c{6, "Agent pipeline determinism (10-day scripted backtest)"};
    const auto series = market::load_market_csv(repo("data/btc_test_bull.csv"), "BTC");
    const auto news = market::load_news_json(repo("data/btc_test_bull_news.json"), "BTC");
    auto split = market::reference_split("BTC", market::SplitKind::test_bull);
    split.end_date = split.start_date.plus_days(10);
    split.end_price = series.at(*series.index_of(split.end_date)).open_price;

    const auto run_once = [&](const agents::AblationConfig& ablation) {
        auto backend = std::make_shared<agents::ScriptedBackend>(
            agents::ScriptedBackend::from_file(repo("data/fixtures/agent_replies.json")));
        agents::AgentStrategyOptions options;
        options.ablation = ablation;
        agents::AgentStrategy strategy(backend, agents::PromptLibrary::builtin(), "BTC",
                                       options);
        engine::run_backtest(strategy, series, &news, split);
        json decisions = json::array();
        for (const auto& d : strategy.decisions())
            decisions.push_back({{"date", d.date.to_iso()},
                                 {"action", d.action},
                                 {"fact_weight", d.fact_weight},
                                 {"subjective_weight", d.subjective_weight},
                                 {"prompt_digest", d.prompt_digest}});
        return std::make_pair(agents::transcript_to_jsonl(strategy.transcript()),
                              decisions.dump());
    };

    const auto per_day_counts = [](const std::string& transcript) {
        std::map<std::string, int> out;
        std::istringstream lines{transcript};
        std::string line;
        while (std::getline(lines, line))
            out[json::parse(line).at("date").get<std::string>()]++;
        return out;
    };

    const auto [t1, d1] = run_once({});
    const auto [t2, d2] = run_once({});
    c.require(t1 == t2, "two runs produced different transcripts");
    c.require(d1 == d2, "two runs produced different decision logs");
    c.note(fmt("transcript: %zu bytes, byte-identical across runs", t1.size()));

    const auto full_counts = per_day_counts(t1);
    c.require(full_counts.size() == 10, "expected ten trading days");
    bool first = true;
    for (const auto& [date, count] : full_counts) {
        const int expected = first ? 6 : 7;  // reflection cold start
        if (count != expected)
            c.fail(fmt("full pipeline: %s made %d calls, expected %d", date.c_str(), count,
                       expected));
        first = false;
    }
    if (c.pass) c.note("full pipeline: 6 calls on the cold-start day, 7 afterwards");

    const struct {
        agents::AgentKind kind;
        const char* name;
    } ablations[] = {
        {agents::AgentKind::statistics, "statistics"},
        {agents::AgentKind::fact_reasoning, "fact_reasoning"},
        {agents::AgentKind::subjectivity_reasoning, "subjectivity_reasoning"},
        {agents::AgentKind::reflection, "reflection"},
    };
    for (const auto& ablation : ablations) {
        const auto [transcript, decisions] = run_once(agents::AblationConfig::disable({ablation.kind}));
        const auto counts = per_day_counts(transcript);
        bool cold = true;
        for (const auto& [date, count] : counts) {
            int expected = 6;  // one call-bearing agent removed
            if (ablation.kind != agents::AgentKind::reflection && cold)
                expected = 5;  // reflection still cold on day one
            if (count != expected) {
                c.fail(fmt("w/o %s: %s made %d calls, expected %d", ablation.name, date.c_str(),
                           count, expected));
            }
            cold = false;
        }
    }
    if (c.pass) c.note("each single-agent ablation removes exactly one call per day");
    return c;
}

// ---------------------------------------------------------------------------
// 7. Trade-reply parser corpus.

Criterion criterion_parser_corpus() {
    Criterion c{7, "Trade-reply parser corpus (20 cases + fallback after 3 failures)"};
    struct Case {
        const char* text;
        bool ok;                      // parseable at all
        double action = 0.0;          // expected when ok
        std::optional<double> wf;     // expected fact weight when stated
    };
    const Case cases[] = {
        {"Action: -0.4", true, -0.4, std::nullopt},
        {"I favor facts: 0.7 factual, 0.3 subjective. Action: 0.6", true, 0.6, 0.7},
        {"Action: 1.73", true, 1.0, std::nullopt},
        {"Action: -2.5", true, -1.0, std::nullopt},
        {"Action: 0", true, 0.0, std::nullopt},
        {"action: 0.25", true, 0.3, std::nullopt},
        {"Action = 0.7", true, 0.7, std::nullopt},
        {"4. Action: first try 0.9 ... but revised. Action: -0.1", true, -0.1, std::nullopt},
        {"Action: +0.5", true, 0.5, std::nullopt},
        {"buy a bit. Action: .7", true, 0.7, std::nullopt},
        {"Action: -0.35", true, -0.4, std::nullopt},
        {"60% weighting on factual information and 40% on subjectivity. Action: 0.2", true, 0.2,
         0.6},
        {"30% factual, 70% subjective. Action: -0.2", true, -0.2, 0.3},
        {"weights 1.4 factual, rest subjective. Action: 0.1", true, 0.1, 1.0},
        {"0.9 factual early on; final weighting 0.8 factual, 0.2 subjective. Action: 0.6", true,
         0.6, 0.8},
        {"Action:\n0.3", false, 0.0, std::nullopt},
        {"no action here", false, 0.0, std::nullopt},
        {"", false, 0.0, std::nullopt},
        {"The action is to hold", false, 0.0, std::nullopt},
        {"confidence 0.9, market up", false, 0.0, std::nullopt},
    };
    static_assert(sizeof(cases) / sizeof(cases[0]) == 20);

    int index = 0;
    for (const auto& test_case : cases) {
        ++index;
        try {
            const auto decision = agents::parse_trade_decision(test_case.text);
            if (!test_case.ok) {
                c.fail(fmt("case %d unexpectedly parsed to %.1f", index,
                           decision.action.value()));
                continue;
            }
            if (std::abs(decision.action.value() - test_case.action) > 1e-12)
                c.fail(fmt("case %d action %.2f, expected %.2f", index,
                           decision.action.value(), test_case.action));
            if (test_case.wf &&
                std::abs(decision.fact_weight - *test_case.wf) > 1e-9)
                c.fail(fmt("case %d fact weight %.3f, expected %.3f", index,
                           decision.fact_weight, *test_case.wf));
            if (std::abs(decision.fact_weight + decision.subjective_weight - 1.0) > 1e-6)
                c.fail(fmt("case %d weights do not sum to 1", index));
            if (decision.action.value() < -1.0 || decision.action.value() > 1.0)
                c.fail(fmt("case %d action outside [-1, 1]", index));
        } catch (const DomainError&) {
            if (test_case.ok) c.fail(fmt("case %d failed to parse", index));
        }
    }
    if (c.pass) c.note("all 20 corpus cases parse to the documented decisions");

    // Fallback: three consecutive unparseable replies become a hold.
    agents::ScriptedBackend backend(R"(["junk one","junk two","junk three"])");
    const auto prompts = agents::PromptLibrary::builtin();
    agents::AgentRunner runner(backend, prompts, "BTC");
    const auto fr = agents::AgentReport{agents::AgentKind::fact_reasoning,
                                        Date::from_iso("2024-01-24"), "FR"};
    agents::AgentRunner::TradeInputs inputs;
    inputs.fact_reasoning = &fr;
    const auto outcome = runner.run_trade(Date::from_iso("2024-01-24"), inputs);
    c.require(outcome.decision.action.value() == 0.0, "fallback decision is not a hold");
    c.require(outcome.decision.fact_weight == 0.5 && outcome.decision.subjective_weight == 0.5,
              "fallback weights are not 0.5/0.5");
    c.require(runner.parse_fallbacks() == 1, "fallback counter did not record the event");
    c.require(runner.backend_calls() == 3, "fallback did not consume exactly three replies");
    if (c.pass) c.note("three unparseable replies fall back to hold with a logged warning");
    return c;
}

// ---------------------------------------------------------------------------
// 8. Tuning correctness through the C API.

Criterion criterion_tuning() {
    Criterion c{8, "Tuning correctness (engineered winner; ties break small)"};

    json config;
    config["asset"] = "SYN";
    config["split"] = {{"kind", "validation"},
                       {"start_date", "2025-01-01"},
                       {"end_date", "2025-03-02"},
                       {"start_price", 115.26},
                       {"end_price", 151.22}};
    config["market_csv"] = repo("data/synthetic_tune.csv");
    config["deterministic"] = true;

    char* out = nullptr;
    auto status = fslab_tune_run(config.dump().c_str(), &out);
    if (status != FSLAB_OK) {
        c.fail(std::string("tune run failed: ") + fslab_last_error());
        return c;
    }
    const auto result = json::parse(out);
    fslab_string_free(out);

    const auto chosen = result.at("chosen").at("window").get<std::size_t>();
    const auto chosen_return = result.at("chosen_return_pct").get<double>();
    c.require(chosen == 10, fmt("chosen window %zu, expected the engineered winner 10", chosen));
    c.require(std::abs(chosen_return - 12.145055113481) < 1e-6,
              fmt("chosen return %.9f%%, expected 12.145055113%% (frozen oracle value)",
                  chosen_return));
    c.note(fmt("engineered fixture: window 10 wins with %.4f%%", chosen_return));

    // Tie-break: on a constant series every window returns exactly zero.
    config["market_csv"] = repo("data/constant_price.csv");
    config["split"]["start_price"] = 250.0;
    config["split"]["end_price"] = 250.0;
    out = nullptr;
    status = fslab_tune_run(config.dump().c_str(), &out);
    if (status != FSLAB_OK) {
        c.fail(std::string("tie-break tune run failed: ") + fslab_last_error());
        return c;
    }
    const auto tie = json::parse(out);
    fslab_string_free(out);
    c.require(tie.at("chosen").at("window").get<std::size_t>() == 5,
              "tie did not break toward the smallest window");
    for (const auto& cand : tie.at("candidates"))
        c.require(cand.at("total_return_pct").get<double>() == 0.0,
                  "constant series candidate return is not exactly zero");
    if (c.pass) c.note("all candidates tie at 0%; window 5 chosen");
    return c;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria;
    criteria.push_back(criterion_split_trends());
    criteria.push_back(criterion_buy_and_hold());
    criteria.push_back(criterion_sharpe_crosscheck());
    criteria.push_back(criterion_indicator_oracle());
    criteria.push_back(criterion_engine_properties());
    criteria.push_back(criterion_pipeline_determinism());
    criteria.push_back(criterion_parser_corpus());
    criteria.push_back(criterion_tuning());

    int failures = 0;
    for (const auto& c : criteria) {
        std::printf("Criterion %d: %s — %s\n", c.id, c.pass ? "PASS" : "FAIL", c.title.c_str());
        for (const auto& d : c.details) std::printf("    %s\n", d.c_str());
        if (!c.pass) ++failures;
    }
    std::printf("\n%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
    if (failures > 0) {
        std::printf("Failing rows trace to the SOL entries of the bundled reference split "
                    "table, whose published trend column does not match its own open/close "
                    "prices. The price arithmetic and the engine agree to machine precision; "
                    "see the per-row diagnostics above.\n");
    }
    return failures == 0 ? 0 : 1;
}
