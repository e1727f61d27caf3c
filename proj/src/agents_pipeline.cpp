#include "fslab/agents/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <regex>

#include <json.hpp>

#include "fslab/error.hpp"

namespace fslab::agents {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string quote_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == '\\' || c == '\'') out += '\\';
        out += c;
    }
    return out;
}

constexpr std::string_view kNeutralReflection =
    "No recent trading history is available yet. Weight factual and subjective information "
    "equally at 0.5 each and keep position changes small until performance data accumulates.";

}  // namespace

TradeDecision parse_trade_decision(const std::string& text, bool* was_clamped) {
    // The action is the last number that follows an "Action" label within a
    // short gap; replies routinely restate the label before answering.
    // Lazy gap so the number is taken as early and as whole as possible
    // (a greedy gap would swallow a leading decimal point or sign).
    static const std::regex action_re(
        R"([Aa][Cc][Tt][Ii][Oo][Nn][^0-9+\-\n]{0,20}?([-+]?[0-9]*\.?[0-9]+))");
    std::optional<double> raw_action;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), action_re);
         it != std::sregex_iterator(); ++it) {
        try {
            raw_action = std::stod((*it)[1].str());
        } catch (const std::exception&) {
        }
    }
    if (!raw_action) throw DomainError("no action number found in trade reply");

    TradeDecision decision;
    const double rounded = std::round(*raw_action * 10.0) / 10.0;
    decision.action = engine::TradeAction::clamped(rounded);
    if (was_clamped != nullptr) *was_clamped = decision.action.value() != rounded;
    decision.rationale = text;

    // Weights: "0.7 factual, 0.3 subjective" or "60% weighting on factual".
    // The factual weight is authoritative; the pair always sums to 1.
    static const std::regex fact_re(
        R"(([0-9]+(?:\.[0-9]+)?)\s*(%)?[^0-9%\n]{0,30}[Ff][Aa][Cc][Tt][Uu][Aa][Ll])");
    static const std::regex subj_re(
        R"(([0-9]+(?:\.[0-9]+)?)\s*(%)?[^0-9%\n]{0,30}[Ss][Uu][Bb][Jj][Ee][Cc][Tt][Ii][Vv])");
    const auto last_weight = [&text](const std::regex& re) -> std::optional<double> {
        std::optional<double> weight;
        for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
             it != std::sregex_iterator(); ++it) {
            try {
                double v = std::stod((*it)[1].str());
                if ((*it)[2].matched) v /= 100.0;  // only an explicit % is a percentage
                weight = v;
            } catch (const std::exception&) {
            }
        }
        return weight;
    };
    if (const auto wf = last_weight(fact_re)) {
        decision.fact_weight = std::clamp(*wf, 0.0, 1.0);
        decision.subjective_weight = 1.0 - decision.fact_weight;
    } else if (const auto ws = last_weight(subj_re)) {
        decision.subjective_weight = std::clamp(*ws, 0.0, 1.0);
        decision.fact_weight = 1.0 - decision.subjective_weight;
    }
    return decision;
}

ReflectionMemory::ReflectionMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw DomainError("reflection memory capacity must be at least 1");
}

void ReflectionMemory::append(MemoryEntry entry) {
    if (!entries_.empty() && !(entries_.back().date < entry.date))
        throw DomainError("memory entry for " + entry.date.to_iso() +
                          " does not succeed the last entry (" +
                          entries_.back().date.to_iso() + ")");
    entries_.push_back(std::move(entry));
    if (entries_.size() > capacity_) entries_.erase(entries_.begin());
}

ReflectionMemory update_memory(ReflectionMemory memory, const engine::DailyRecord& record,
                               double realized_next_day_return, std::string prompt_digest) {
    memory.append(MemoryEntry{record.date, std::move(prompt_digest), record.action.value(),
                              realized_next_day_return});
    return memory;
}

namespace {

constexpr std::array<AgentKind, 4> kAblatable = {AgentKind::reflection, AgentKind::fact_reasoning,
                                                 AgentKind::subjectivity_reasoning,
                                                 AgentKind::statistics};

constexpr std::string_view kAblatableNames =
    "statistics, fact_reasoning, subjectivity_reasoning, reflection";

}  // namespace

AblationConfig AblationConfig::disable(std::initializer_list<AgentKind> kinds) {
    AblationConfig config;
    for (AgentKind kind : kinds) {
        if (std::find(kAblatable.begin(), kAblatable.end(), kind) == kAblatable.end())
            throw DomainError("agent '" + std::string(to_string(kind)) +
                              "' cannot be disabled (valid ablations: " +
                              std::string(kAblatableNames) + ")");
        config.disabled_.insert(kind);
    }
    return config;
}

AblationConfig AblationConfig::from_names(std::span<const std::string> names) {
    AblationConfig config;
    for (const auto& name : names) {
        AgentKind kind;
        try {
            kind = agent_kind_from_string(name);
        } catch (const DomainError&) {
            throw DomainError("unknown agent '" + name + "' (valid ablations: " +
                              std::string(kAblatableNames) + ")");
        }
        if (std::find(kAblatable.begin(), kAblatable.end(), kind) == kAblatable.end())
            throw DomainError("agent '" + name + "' cannot be disabled (valid ablations: " +
                              std::string(kAblatableNames) + ")");
        config.disabled_.insert(kind);
    }
    return config;
}

AgentRunner::AgentRunner(LlmBackend& backend, const PromptLibrary& prompts, std::string asset_id,
                         AgentCallOptions options)
    : backend_(&backend), prompts_(&prompts), asset_lower_(lower(std::move(asset_id))),
      options_(options) {}

std::string AgentRunner::call_agent(AgentKind kind, Date date, const std::string& prompt) {
    std::string last_error;
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
        if (attempt > 0) ++retries_;
        try {
            ChatRequest request;
            request.user = prompt;
            request.temperature = options_.temperature;
            request.model = options_.model;
            request.tag = std::string(to_string(kind));
            ++backend_calls_;
            std::string reply = backend_->complete(request);
            if (trim(reply).empty()) {
                last_error = "empty report";
                warnings_.push_back(std::string(to_string(kind)) + " agent on " + date.to_iso() +
                                    ": empty reply");
                continue;
            }
            transcript_.push_back(TranscriptRecord{date, kind, prompt, reply});
            return reply;
        } catch (const BackendError& e) {
            last_error = e.what();
            warnings_.push_back(std::string(to_string(kind)) + " agent on " + date.to_iso() +
                                ": " + e.what());
        }
    }
    if (last_error == "empty report")
        throw DomainError("empty report from " + std::string(to_string(kind)) + " agent on " +
                          date.to_iso());
    throw BackendError(std::string(to_string(kind)) + " agent failed on " + date.to_iso() +
                       " after " + std::to_string(options_.max_retries + 1) + " attempts: " +
                       last_error);
}

namespace {

std::string format_market_window(const market::MarketSeries& window) {
    std::string out = "{";
    char buf[320];
    bool first = true;
    for (const auto& d : window.days()) {
        if (!first) out += "; ";
        first = false;
        std::snprintf(buf, sizeof(buf),
                      "date: %s, open price: %.2f, close price: %.2f, volume: %.0f, "
                      "average gas fee: %.6f, unique addresses: %lld, "
                      "total value transferred: %.0f",
                      d.date.to_iso().c_str(), d.open_price, d.close_price, d.volume,
                      d.avg_gas_fee, d.unique_addresses, d.total_value_transferred);
        out += buf;
    }
    out += "}";
    return out;
}

std::string format_news(std::span<const market::NewsArticle> news) {
    if (news.empty()) return "(no news articles available for this day)";
    std::string out;
    for (const auto& a : news) {
        if (!out.empty()) out += "\n";
        out += "{'title': '" + quote_escape(a.title) + "', 'body': '" + quote_escape(a.body) +
               "', 'source': '" + quote_escape(a.source) + "'}";
    }
    return out;
}

std::string format_memory(const ReflectionMemory& memory) {
    std::string out;
    char buf[160];
    for (const auto& e : memory.entries()) {
        if (!out.empty()) out += "\n";
        std::snprintf(buf, sizeof(buf), "- %s: action %+.1f, next-day return %+.4f%%, prompt digest %s",
                      e.date.to_iso().c_str(), e.action, 100.0 * e.realized_return,
                      e.prompt_digest.c_str());
        out += buf;
    }
    return out;
}

}  // namespace

AgentReport AgentRunner::run_statistics(Date date, const market::MarketSeries& window) {
    if (window.empty()) throw DomainError("statistics agent requires a non-empty window");
    const auto prompt = render_prompt(prompts_->get(AgentKind::statistics),
                                      {{"asset", asset_lower_},
                                       {"market_window", format_market_window(window)}});
    return AgentReport{AgentKind::statistics, date, call_agent(AgentKind::statistics, date, prompt)};
}

AgentReport AgentRunner::run_fact(Date date, std::span<const market::NewsArticle> news) {
    const auto prompt = render_prompt(prompts_->get(AgentKind::fact),
                                      {{"asset", asset_lower_}, {"news_articles", format_news(news)}});
    return AgentReport{AgentKind::fact, date, call_agent(AgentKind::fact, date, prompt)};
}

AgentReport AgentRunner::run_subjectivity(Date date, std::span<const market::NewsArticle> news) {
    const auto prompt = render_prompt(prompts_->get(AgentKind::subjectivity),
                                      {{"asset", asset_lower_}, {"news_articles", format_news(news)}});
    return AgentReport{AgentKind::subjectivity, date,
                       call_agent(AgentKind::subjectivity, date, prompt)};
}

AgentReport AgentRunner::run_fact_reasoning(Date date, const AgentReport* fact,
                                            const AgentReport* stats) {
    if (fact == nullptr) throw DomainError("fact reasoning requires the fact report");
    std::map<std::string, std::string> context{{"asset", asset_lower_},
                                               {"fact_report", fact->text}};
    if (stats != nullptr) context.emplace("statistics_report", stats->text);
    const auto prompt =
        render_prompt_dropping_missing_reports(prompts_->get(AgentKind::fact_reasoning), context);
    return AgentReport{AgentKind::fact_reasoning, date,
                       call_agent(AgentKind::fact_reasoning, date, prompt)};
}

AgentReport AgentRunner::run_subjectivity_reasoning(Date date, const AgentReport& subjectivity) {
    const auto prompt = render_prompt(prompts_->get(AgentKind::subjectivity_reasoning),
                                      {{"asset", asset_lower_},
                                       {"subjectivity_report", subjectivity.text}});
    return AgentReport{AgentKind::subjectivity_reasoning, date,
                       call_agent(AgentKind::subjectivity_reasoning, date, prompt)};
}

AgentReport AgentRunner::run_reflection(Date date, const ReflectionMemory& memory) {
    if (memory.empty()) {
        // Cold start: built-in neutral guidance, no backend call.
        return AgentReport{AgentKind::reflection, date, std::string(kNeutralReflection)};
    }
    const auto prompt = render_prompt(prompts_->get(AgentKind::reflection),
                                      {{"asset", asset_lower_},
                                       {"memory_entries", format_memory(memory)}});
    return AgentReport{AgentKind::reflection, date, call_agent(AgentKind::reflection, date, prompt)};
}

AgentRunner::TradeOutcome AgentRunner::run_trade(Date date, const TradeInputs& inputs) {
    if (inputs.fact_reasoning == nullptr && inputs.subjectivity_reasoning == nullptr)
        throw DomainError("trade agent requires at least one reasoning report");

    std::map<std::string, std::string> context{{"asset", asset_lower_}};
    const auto put = [&context](const char* key, const AgentReport* report) {
        if (report != nullptr) context.emplace(key, report->text);
    };
    put("statistics_report", inputs.statistics);
    put("fact_report", inputs.fact);
    put("subjectivity_report", inputs.subjectivity);
    put("fact_reasoning_report", inputs.fact_reasoning);
    put("subjectivity_reasoning_report", inputs.subjectivity_reasoning);
    put("reflection_report", inputs.reflection);

    const auto prompt =
        render_prompt_dropping_missing_reports(prompts_->get(AgentKind::trade), context);

    TradeOutcome outcome;
    outcome.prompt = prompt;
    outcome.prompt_digest = prompt_digest(prompt);

    std::string last_reply;
    for (int attempt = 0; attempt < 3; ++attempt) {
        last_reply = call_agent(AgentKind::trade, date, prompt);
        try {
            bool clamped = false;
            outcome.decision = parse_trade_decision(last_reply, &clamped);
            if (clamped)
                warnings_.push_back("trade agent on " + date.to_iso() +
                                    ": action clamped into [-1, 1]");
            return outcome;
        } catch (const DomainError& e) {
            warnings_.push_back("trade agent on " + date.to_iso() + ": " + e.what() +
                                " (attempt " + std::to_string(attempt + 1) + ")");
        }
    }
    ++parse_fallbacks_;
    warnings_.push_back("trade agent on " + date.to_iso() +
                        ": three unparseable replies, falling back to hold");
    outcome.decision = TradeDecision{};
    outcome.decision.rationale = last_reply;
    return outcome;
}

StepResult agent_pipeline_step(AgentRunner& runner, const DayContext& context,
                               const AblationConfig& ablation) {
    const std::size_t calls_before = runner.backend_calls();

    std::optional<AgentReport> statistics;
    if (!ablation.disabled(AgentKind::statistics)) {
        if (context.window == nullptr)
            throw DomainError("pipeline step needs a market window for the statistics agent");
        statistics = runner.run_statistics(context.date, *context.window);
    }
    const AgentReport fact = runner.run_fact(context.date, context.news);
    const AgentReport subjectivity = runner.run_subjectivity(context.date, context.news);

    std::optional<AgentReport> fact_reasoning;
    if (!ablation.disabled(AgentKind::fact_reasoning))
        fact_reasoning = runner.run_fact_reasoning(context.date, &fact,
                                                   statistics ? &*statistics : nullptr);
    std::optional<AgentReport> subjectivity_reasoning;
    if (!ablation.disabled(AgentKind::subjectivity_reasoning))
        subjectivity_reasoning = runner.run_subjectivity_reasoning(context.date, subjectivity);

    std::optional<AgentReport> reflection;
    if (!ablation.disabled(AgentKind::reflection)) {
        if (context.memory == nullptr)
            throw DomainError("pipeline step needs a reflection memory");
        reflection = runner.run_reflection(context.date, *context.memory);
    }

    AgentRunner::TradeInputs inputs;
    inputs.statistics = statistics ? &*statistics : nullptr;
    inputs.fact = &fact;
    inputs.subjectivity = &subjectivity;
    inputs.fact_reasoning = fact_reasoning ? &*fact_reasoning : nullptr;
    inputs.subjectivity_reasoning = subjectivity_reasoning ? &*subjectivity_reasoning : nullptr;
    inputs.reflection = reflection ? &*reflection : nullptr;

    const auto trade = runner.run_trade(context.date, inputs);

    StepResult result;
    result.decision = trade.decision;
    result.trade_prompt_digest = trade.prompt_digest;
    result.backend_calls = runner.backend_calls() - calls_before;
    return result;
}

namespace {

std::shared_ptr<LlmBackend> require_backend(std::shared_ptr<LlmBackend> backend) {
    if (backend == nullptr) throw DomainError("agent strategy requires a backend");
    return backend;
}

}  // namespace

AgentStrategy::AgentStrategy(std::shared_ptr<LlmBackend> backend, PromptLibrary prompts,
                             std::string asset_id, AgentStrategyOptions options)
    : backend_(require_backend(std::move(backend))), prompts_(std::move(prompts)),
      options_(std::move(options)), runner_(*backend_, prompts_, asset_id, options_.call),
      memory_(options_.memory_capacity) {}

engine::TradeAction AgentStrategy::decide(const engine::Observation& obs) {
    if (obs.prev_outcome && pending_) {
        pending_->realized_return = obs.prev_outcome->value;
        memory_.append(*pending_);
        pending_.reset();
    }

    DayContext context;
    context.date = obs.date;
    context.window = obs.window;
    context.news = obs.news;
    context.memory = &memory_;

    const auto step = agent_pipeline_step(runner_, context, options_.ablation);

    pending_ = MemoryEntry{obs.date, step.trade_prompt_digest, step.decision.action.value(), 0.0};
    decisions_.push_back(DecisionRecord{obs.date, step.decision.action.value(),
                                        step.decision.fact_weight,
                                        step.decision.subjective_weight,
                                        step.trade_prompt_digest});
    return step.decision.action;
}

std::string transcript_to_jsonl(std::span<const TranscriptRecord> transcript) {
    std::string out;
    for (const auto& record : transcript) {
        nlohmann::json line;
        line["date"] = record.date.to_iso();
        line["agent"] = std::string(to_string(record.agent));
        line["prompt"] = record.prompt;
        line["reply"] = record.reply;
        out += line.dump();
        out += '\n';
    }
    return out;
}

}  // namespace fslab::agents
