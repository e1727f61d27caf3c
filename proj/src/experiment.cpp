#include "fslab/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>

#include "fslab/agents/pipeline.hpp"
#include "fslab/engine.hpp"
#include "fslab/error.hpp"
#include "fslab/market_data.hpp"
#include "fslab/strategies.hpp"

namespace fslab::experiment {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string now_utc_iso() {
    const auto now = std::chrono::system_clock::now();
    const auto t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct ParsedConfig {
    std::string asset;
    market::DatasetSplit split;
    std::string market_csv;
    std::optional<std::string> news_json;
    strategies::StrategyKind strategy;
    engine::BacktestConfig engine_config;
    bool deterministic = false;

    // agent settings
    json backend_spec;  // null for rule strategies
    agents::AblationConfig ablation;
    std::size_t memory_capacity = 3;
    agents::AgentCallOptions call;
    std::optional<std::string> prompts_dir;
};

market::DatasetSplit parse_split(const json& config, const std::string& asset) {
    if (!config.contains("split")) throw DomainError("config needs a 'split'");
    const auto& spec = config.at("split");
    if (spec.is_string())
        return market::reference_split(asset,
                                       market::split_kind_from_string(spec.get<std::string>()));
    if (!spec.is_object()) throw DomainError("'split' must be a name or an object");
    market::DatasetSplit split;
    split.asset_id = asset;
    split.kind = market::split_kind_from_string(spec.value("kind", "validation"));
    for (const char* key : {"start_date", "end_date", "start_price", "end_price"}) {
        if (!spec.contains(key))
            throw DomainError(std::string("custom split needs '") + key + "'");
    }
    split.start_date = Date::from_iso(spec.at("start_date").get<std::string>());
    split.end_date = Date::from_iso(spec.at("end_date").get<std::string>());
    split.start_price = spec.at("start_price").get<double>();
    split.end_price = spec.at("end_price").get<double>();
    if (spec.contains("expected_trend_pct"))
        split.expected_trend_pct = spec.at("expected_trend_pct").get<double>();
    split.validate();
    return split;
}

strategies::StrategyKind parse_strategy(const json& config) {
    strategies::StrategyKind kind;
    if (!config.contains("strategy")) return kind;  // buy and hold
    const auto& spec = config.at("strategy");
    if (spec.is_string()) {
        // "sma:10" / "slma:5,20" / plain family name
        const auto text = spec.get<std::string>();
        const auto colon = text.find(':');
        kind.family = strategies::family_from_string(text.substr(0, colon));
        if (colon != std::string::npos) {
            const auto args = text.substr(colon + 1);
            const auto comma = args.find(',');
            try {
                if (kind.family == strategies::StrategyKind::Family::sma) {
                    kind.sma_window = std::stoul(args);
                } else if (kind.family == strategies::StrategyKind::Family::slma) {
                    if (comma == std::string::npos) throw std::invalid_argument(args);
                    kind.slma_short = std::stoul(args.substr(0, comma));
                    kind.slma_long = std::stoul(args.substr(comma + 1));
                } else {
                    throw DomainError("strategy '" + text + "' takes no parameters");
                }
            } catch (const std::logic_error&) {
                throw DomainError("unparseable strategy parameters in '" + text + "'");
            }
        }
    } else if (spec.is_object()) {
        kind.family = strategies::family_from_string(spec.value("kind", "buy_and_hold"));
        if (spec.contains("window")) kind.sma_window = spec.at("window").get<std::size_t>();
        if (spec.contains("short_window"))
            kind.slma_short = spec.at("short_window").get<std::size_t>();
        if (spec.contains("long_window")) kind.slma_long = spec.at("long_window").get<std::size_t>();
    } else {
        throw DomainError("'strategy' must be a string or an object");
    }
    kind.validate();
    return kind;
}

ParsedConfig parse_config(const json& config) {
    if (!config.is_object()) throw DomainError("config must be a JSON object");
    ParsedConfig parsed;
    if (!config.contains("asset")) throw DomainError("config needs an 'asset'");
    parsed.asset = config.at("asset").get<std::string>();
    parsed.split = parse_split(config, parsed.asset);
    parsed.strategy = parse_strategy(config);
    parsed.deterministic = config.value("deterministic", false);

    const std::string data_dir = config.value("data_dir", "data");
    const std::string default_stem =
        lower(parsed.asset) + "_" + std::string(market::to_string(parsed.split.kind));
    if (config.contains("market_csv"))
        parsed.market_csv = config.at("market_csv").get<std::string>();
    else
        parsed.market_csv = data_dir + "/" + default_stem + ".csv";
    if (config.contains("news_json")) {
        parsed.news_json = config.at("news_json").get<std::string>();
    } else {
        const auto candidate = data_dir + "/" + default_stem + "_news.json";
        if (std::filesystem::exists(candidate)) parsed.news_json = candidate;
    }

    parsed.engine_config.fee_rate = config.value("fee_rate", 0.0);
    parsed.engine_config.capital = config.value("capital", 1'000'000.0);
    parsed.engine_config.lookback_days = config.value("lookback_days", std::size_t{7});
    parsed.engine_config.news_days = config.value("news_days", std::size_t{1});

    if (config.contains("backend")) parsed.backend_spec = config.at("backend");
    if (config.contains("ablate")) {
        std::vector<std::string> names;
        for (const auto& n : config.at("ablate")) names.push_back(n.get<std::string>());
        parsed.ablation = agents::AblationConfig::from_names(names);
    }
    parsed.memory_capacity = config.value("memory_capacity", std::size_t{3});
    parsed.call.temperature = config.value("temperature", 0.0);
    parsed.call.model = config.value("model", std::string("scripted"));
    if (config.contains("prompts_dir"))
        parsed.prompts_dir = config.at("prompts_dir").get<std::string>();

    if (parsed.deterministic && !parsed.backend_spec.is_null() &&
        parsed.backend_spec.value("kind", "scripted") != "scripted")
        throw DomainError("deterministic runs require the scripted backend");
    return parsed;
}

std::shared_ptr<agents::LlmBackend> make_backend(const ParsedConfig& parsed) {
    if (parsed.backend_spec.is_null())
        throw DomainError("the agent strategy needs a 'backend' config");
    const auto kind = parsed.backend_spec.value("kind", "scripted");
    if (kind == "scripted") {
        if (!parsed.backend_spec.contains("fixture"))
            throw DomainError("scripted backend needs a 'fixture' file path");
        return std::make_shared<agents::ScriptedBackend>(agents::ScriptedBackend::from_file(
            parsed.backend_spec.at("fixture").get<std::string>()));
    }
    if (kind == "http") {
        if (parsed.deterministic)
            throw DomainError("deterministic runs require the scripted backend");
        if (!parsed.backend_spec.contains("endpoint"))
            throw DomainError("http backend needs an 'endpoint'");
        return std::make_shared<agents::HttpBackend>(
            parsed.backend_spec.at("endpoint").get<std::string>(),
            parsed.backend_spec.value("model", "gpt-4"),
            parsed.backend_spec.value("api_key_env", "FSLAB_API_KEY"));
    }
    throw DomainError("unknown backend kind '" + kind + "' (valid: scripted, http)");
}

json strategy_to_json(const strategies::StrategyKind& kind) {
    json out;
    out["kind"] = std::string(strategies::to_string(kind.family));
    out["label"] = kind.label();
    if (kind.family == strategies::StrategyKind::Family::sma) out["window"] = kind.sma_window;
    if (kind.family == strategies::StrategyKind::Family::slma) {
        out["short_window"] = kind.slma_short;
        out["long_window"] = kind.slma_long;
    }
    return out;
}

json split_to_json(const market::DatasetSplit& split) {
    json out;
    out["asset"] = split.asset_id;
    out["kind"] = std::string(market::to_string(split.kind));
    out["start_date"] = split.start_date.to_iso();
    out["end_date"] = split.end_date.to_iso();
    out["start_price"] = split.start_price;
    out["end_price"] = split.end_price;
    if (split.expected_trend_pct) out["expected_trend_pct"] = *split.expected_trend_pct;
    return out;
}

json metrics_to_json(const metrics::MetricsReport& m) {
    json out;
    out["total_return_pct"] = m.total_return_pct;
    out["daily_return_mean_pct"] = m.daily_return_mean_pct;
    out["daily_return_std_pct"] =
        m.daily_return_std_pct ? json(*m.daily_return_std_pct) : json(nullptr);
    out["sharpe_ratio"] = m.sharpe_ratio ? json(*m.sharpe_ratio) : json(nullptr);
    return out;
}

json result_to_json(const engine::BacktestResult& result, const ParsedConfig& parsed) {
    json out;
    out["schema"] = "fslab.backtest_report.v1";
    out["asset"] = parsed.asset;
    out["strategy"] = strategy_to_json(parsed.strategy);
    out["split"] = split_to_json(result.split);
    out["config"] = {{"fee_rate", parsed.engine_config.fee_rate},
                     {"capital", parsed.engine_config.capital},
                     {"lookback_days", parsed.engine_config.lookback_days},
                     {"news_days", parsed.engine_config.news_days},
                     {"deterministic", parsed.deterministic}};
    auto records = json::array();
    for (const auto& r : result.records) {
        json rec;
        rec["date"] = r.date.to_iso();
        rec["action"] = r.action.value();
        rec["execution_price"] = r.execution_price;
        rec["net_worth"] = r.net_worth;
        rec["daily_return"] = r.daily_return ? json(*r.daily_return) : json(nullptr);
        records.push_back(std::move(rec));
    }
    out["records"] = std::move(records);
    out["final_net_worth"] = result.final_net_worth;
    out["metrics"] = metrics_to_json(result.metrics);
    if (!parsed.deterministic) out["metadata"] = {{"generated_at", now_utc_iso()}};
    return out;
}

struct PreparedRun {
    market::MarketSeries series;
    std::optional<market::NewsFeed> news;
};

PreparedRun load_data(const ParsedConfig& parsed) {
    PreparedRun run{market::load_market_csv(parsed.market_csv, parsed.asset), std::nullopt};
    if (parsed.news_json)
        run.news = market::load_news_json(*parsed.news_json, parsed.asset);
    return run;
}

agents::PromptLibrary load_prompts(const ParsedConfig& parsed) {
    if (parsed.prompts_dir) return agents::PromptLibrary::from_directory(*parsed.prompts_dir);
    return agents::PromptLibrary::builtin();
}

json run_agent_backtest(const ParsedConfig& parsed, const PreparedRun& data,
                        const agents::AblationConfig& ablation, const std::string& variant_label) {
    agents::AgentStrategyOptions options;
    options.ablation = ablation;
    options.memory_capacity = parsed.memory_capacity;
    options.call = parsed.call;
    agents::AgentStrategy strategy(make_backend(parsed), load_prompts(parsed), parsed.asset,
                                   options);
    const auto result =
        engine::run_backtest(strategy, data.series, data.news ? &*data.news : nullptr,
                             parsed.split, parsed.engine_config);

    json out = result_to_json(result, parsed);
    if (!variant_label.empty()) out["variant_label"] = variant_label;
    auto decisions = json::array();
    for (const auto& d : strategy.decisions()) {
        decisions.push_back({{"date", d.date.to_iso()},
                             {"action", d.action},
                             {"fact_weight", d.fact_weight},
                             {"subjective_weight", d.subjective_weight},
                             {"prompt_digest", d.prompt_digest}});
    }
    out["decisions"] = std::move(decisions);
    out["transcript_jsonl"] = agents::transcript_to_jsonl(strategy.transcript());
    out["counters"] = {{"backend_calls", strategy.backend_calls()},
                       {"retries", strategy.retries()},
                       {"parse_fallbacks", strategy.parse_fallbacks()}};
    auto warnings = json::array();
    for (const auto& w : strategy.warnings()) warnings.push_back(w);
    out["warnings"] = std::move(warnings);
    return out;
}

}  // namespace

json run_backtest(const json& config) {
    const auto parsed = parse_config(config);
    const auto data = load_data(parsed);

    if (parsed.strategy.family == strategies::StrategyKind::Family::agent)
        return run_agent_backtest(parsed, data, parsed.ablation, "");

    auto strategy = strategies::make_rule_strategy(parsed.strategy, data.series);
    const auto result =
        engine::run_backtest(*strategy, data.series, data.news ? &*data.news : nullptr,
                             parsed.split, parsed.engine_config);
    return result_to_json(result, parsed);
}

json run_tune(const json& config) {
    const auto parsed = parse_config(config);
    const auto data = load_data(parsed);

    strategies::TuningGrid grid;
    if (config.contains("grid")) {
        const auto& g = config.at("grid");
        if (g.contains("family"))
            grid.family = strategies::family_from_string(g.at("family").get<std::string>());
        if (g.contains("windows")) {
            grid.windows.clear();
            for (const auto& w : g.at("windows")) grid.windows.push_back(w.get<std::size_t>());
        }
    } else if (parsed.strategy.family != strategies::StrategyKind::Family::buy_and_hold) {
        grid.family = parsed.strategy.family;
    }

    const auto result = strategies::tune(grid, data.series, parsed.split, parsed.engine_config);

    json out;
    out["schema"] = "fslab.tuning_result.v1";
    out["asset"] = parsed.asset;
    out["split"] = split_to_json(parsed.split);
    out["family"] = std::string(strategies::to_string(grid.family));
    auto candidates = json::array();
    for (const auto& c : result.candidates) {
        json item;
        item["params"] = strategy_to_json(c.params);
        item["total_return_pct"] = c.total_return_pct;
        candidates.push_back(std::move(item));
    }
    out["candidates"] = std::move(candidates);
    out["chosen"] = strategy_to_json(result.chosen);
    out["chosen_return_pct"] = result.chosen_return_pct;
    if (!parsed.deterministic) out["metadata"] = {{"generated_at", now_utc_iso()}};
    return out;
}

namespace {

struct Variant {
    std::string token;  // config name
    std::string label;  // table row label
    agents::AblationConfig ablation;
};

Variant variant_from_token(const std::string& token) {
    using agents::AgentKind;
    if (token == "full") return {token, "Full", agents::AblationConfig{}};
    if (token == "reflection")
        return {token, "w/o Reflection Agent",
                agents::AblationConfig::disable({AgentKind::reflection})};
    if (token == "fact_reasoning")
        return {token, "w/o Fact Reasoning Agent",
                agents::AblationConfig::disable({AgentKind::fact_reasoning})};
    if (token == "subjectivity_reasoning")
        return {token, "w/o Sub. Reasoning Agent",
                agents::AblationConfig::disable({AgentKind::subjectivity_reasoning})};
    if (token == "statistics")
        return {token, "w/o Statistics Agent",
                agents::AblationConfig::disable({AgentKind::statistics})};
    throw DomainError("unknown ablation variant '" + token +
                      "' (valid: full, reflection, fact_reasoning, subjectivity_reasoning, "
                      "statistics)");
}

}  // namespace

json run_ablation(const json& config) {
    json base = config;
    base["strategy"] = "agent";

    std::vector<std::string> regimes{"test_bull", "test_bear"};
    if (config.contains("regimes")) {
        regimes.clear();
        for (const auto& r : config.at("regimes")) regimes.push_back(r.get<std::string>());
    }
    std::vector<std::string> tokens{"full", "reflection", "fact_reasoning",
                                    "subjectivity_reasoning", "statistics"};
    if (config.contains("variants")) {
        tokens.clear();
        for (const auto& v : config.at("variants")) tokens.push_back(v.get<std::string>());
    }
    if (tokens.empty()) throw DomainError("ablation needs at least one variant");

    json out;
    out["schema"] = "fslab.ablation_result.v1";
    out["asset"] = base.value("asset", "");
    auto rows = json::array();
    auto reports = json::object();
    for (const auto& token : tokens) {
        const auto variant = variant_from_token(token);
        json row;
        row["label"] = variant.label;
        row["variant"] = variant.token;
        row["cells"] = json::object();
        for (const auto& regime : regimes) {
            json cfg = base;
            cfg["split"] = regime;
            cfg.erase("variants");
            cfg.erase("regimes");
            cfg.erase("market_csv");   // per-regime data comes from data_dir conventions
            cfg.erase("news_json");
            if (config.contains("data") && config.at("data").contains(regime)) {
                const auto& d = config.at("data").at(regime);
                if (d.contains("market_csv")) cfg["market_csv"] = d.at("market_csv");
                if (d.contains("news_json")) cfg["news_json"] = d.at("news_json");
            }
            const auto parsed = parse_config(cfg);
            const auto data = load_data(parsed);
            auto report = run_agent_backtest(parsed, data, variant.ablation, variant.label);
            row["cells"][regime] = {
                {"total_return_pct", report.at("metrics").at("total_return_pct")},
                {"sharpe_ratio", report.at("metrics").at("sharpe_ratio")}};
            reports[variant.token][regime] = std::move(report);
        }
        rows.push_back(std::move(row));
    }
    out["rows"] = std::move(rows);
    out["reports"] = std::move(reports);
    if (!base.value("deterministic", false)) out["metadata"] = {{"generated_at", now_utc_iso()}};
    return out;
}

}  // namespace fslab::experiment
