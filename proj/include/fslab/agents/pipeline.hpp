#pragma once

#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fslab/agents/backend.hpp"
#include "fslab/agents/prompts.hpp"
#include "fslab/engine.hpp"
#include "fslab/market_data.hpp"

namespace fslab::agents {

struct AgentReport {
    AgentKind kind = AgentKind::statistics;
    Date date;
    std::string text;
};

struct TradeDecision {
    engine::TradeAction action;
    double fact_weight = 0.5;        // advisory metadata; always sums to 1
    double subjective_weight = 0.5;  // with fact_weight
    std::string rationale;
};

/// Pulls a TradeDecision out of a raw reply: the action is the last number
/// following an "Action" label, rounded to one decimal and clamped to
/// [-1, 1]; weights come from a "0.7 factual, 0.3 subjective" style pattern
/// and default to 0.5/0.5. Throws DomainError when no action number exists.
/// `was_clamped`, when given, reports whether the action had to be clamped.
TradeDecision parse_trade_decision(const std::string& text, bool* was_clamped = nullptr);

struct MemoryEntry {
    Date date;
    std::string prompt_digest;
    double action = 0.0;
    double realized_return = 0.0;  // next-day return, as a fraction
};

/// Bounded chronological record of recent decisions and how they played out.
class ReflectionMemory {
public:
    explicit ReflectionMemory(std::size_t capacity = 3);

    void append(MemoryEntry entry);  // DomainError unless entry.date succeeds the last
    std::span<const MemoryEntry> entries() const { return entries_; }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return entries_.empty(); }

private:
    std::size_t capacity_;
    std::vector<MemoryEntry> entries_;
};

/// Functional form: memory plus a completed daily record and its realized
/// next-day return gives the updated memory.
ReflectionMemory update_memory(ReflectionMemory memory, const engine::DailyRecord& record,
                               double realized_next_day_return, std::string prompt_digest);

/// Which agents are switched off. Only reflection, fact_reasoning,
/// subjectivity_reasoning and statistics can be ablated; the trade agent and
/// the two news extractors always run.
class AblationConfig {
public:
    AblationConfig() = default;
    static AblationConfig disable(std::initializer_list<AgentKind> kinds);
    static AblationConfig from_names(std::span<const std::string> names);

    bool disabled(AgentKind kind) const { return disabled_.contains(kind); }
    std::size_t count() const { return disabled_.size(); }

private:
    std::set<AgentKind> disabled_;
};

/// One backend call as it happened; serialized to the JSON-lines transcript.
struct TranscriptRecord {
    Date date;
    AgentKind agent = AgentKind::statistics;
    std::string prompt;
    std::string reply;
};

struct AgentCallOptions {
    int max_retries = 2;  // extra attempts after a transport failure or empty reply
    double temperature = 0.0;
    std::string model = "scripted";
};

/// Runs the individual agents for one asset against one backend, logging
/// every call. One runner serves one backtest; reuse across days is what
/// keeps the transcript in order.
class AgentRunner {
public:
    AgentRunner(LlmBackend& backend, const PromptLibrary& prompts, std::string asset_id,
                AgentCallOptions options = {});

    AgentReport run_statistics(Date date, const market::MarketSeries& window);
    AgentReport run_fact(Date date, std::span<const market::NewsArticle> news);
    AgentReport run_subjectivity(Date date, std::span<const market::NewsArticle> news);
    /// `stats` may be null (statistics agent ablated); `fact` may not.
    AgentReport run_fact_reasoning(Date date, const AgentReport* fact, const AgentReport* stats);
    AgentReport run_subjectivity_reasoning(Date date, const AgentReport& subjectivity);
    /// Empty memory is the cold start: a built-in neutral report, no call.
    AgentReport run_reflection(Date date, const ReflectionMemory& memory);

    struct TradeInputs {
        const AgentReport* statistics = nullptr;
        const AgentReport* fact = nullptr;
        const AgentReport* subjectivity = nullptr;
        const AgentReport* fact_reasoning = nullptr;
        const AgentReport* subjectivity_reasoning = nullptr;
        const AgentReport* reflection = nullptr;
    };

    struct TradeOutcome {
        TradeDecision decision;
        std::string prompt;
        std::string prompt_digest;
    };

    /// Assembles the trade prompt from every available report (a missing
    /// report's section is dropped wholesale) and parses the reply. Three
    /// unparseable replies in a row fall back to a hold decision with a
    /// warning instead of failing the day.
    TradeOutcome run_trade(Date date, const TradeInputs& inputs);

    std::span<const TranscriptRecord> transcript() const { return transcript_; }
    std::span<const std::string> warnings() const { return warnings_; }
    std::size_t backend_calls() const { return backend_calls_; }
    std::size_t retries() const { return retries_; }
    std::size_t parse_fallbacks() const { return parse_fallbacks_; }

private:
    std::string call_agent(AgentKind kind, Date date, const std::string& prompt);

    LlmBackend* backend_;
    const PromptLibrary* prompts_;
    std::string asset_lower_;
    AgentCallOptions options_;
    std::vector<TranscriptRecord> transcript_;
    std::vector<std::string> warnings_;
    std::size_t backend_calls_ = 0;
    std::size_t retries_ = 0;
    std::size_t parse_fallbacks_ = 0;
};

struct DayContext {
    Date date;
    const market::MarketSeries* window = nullptr;
    std::span<const market::NewsArticle> news;
    const ReflectionMemory* memory = nullptr;
};

struct StepResult {
    TradeDecision decision;
    std::string trade_prompt_digest;
    std::size_t backend_calls = 0;  // calls made for this day
};

/// One full day through the pipeline in dependency order:
/// {statistics, fact, subjectivity} -> {fact_reasoning, subjectivity_reasoning}
/// -> reflection -> trade, honoring the ablation set.
StepResult agent_pipeline_step(AgentRunner& runner, const DayContext& context,
                               const AblationConfig& ablation);

/// Per-day decision summary kept alongside the transcript.
struct DecisionRecord {
    Date date;
    double action = 0.0;
    double fact_weight = 0.5;
    double subjective_weight = 0.5;
    std::string prompt_digest;
};

struct AgentStrategyOptions {
    AblationConfig ablation;
    std::size_t memory_capacity = 3;
    AgentCallOptions call;
};

/// The seven-agent pipeline packaged as an engine::Strategy. Owns the
/// reflection memory and the running transcript; one instance drives one
/// backtest.
class AgentStrategy final : public engine::Strategy {
public:
    AgentStrategy(std::shared_ptr<LlmBackend> backend, PromptLibrary prompts,
                  std::string asset_id, AgentStrategyOptions options = {});

    engine::TradeAction decide(const engine::Observation& obs) override;

    std::span<const TranscriptRecord> transcript() const { return runner_.transcript(); }
    std::span<const DecisionRecord> decisions() const { return decisions_; }
    std::span<const std::string> warnings() const { return runner_.warnings(); }
    std::size_t backend_calls() const { return runner_.backend_calls(); }
    std::size_t retries() const { return runner_.retries(); }
    std::size_t parse_fallbacks() const { return runner_.parse_fallbacks(); }

private:
    std::shared_ptr<LlmBackend> backend_;
    PromptLibrary prompts_;
    AgentStrategyOptions options_;
    AgentRunner runner_;
    ReflectionMemory memory_;
    std::optional<MemoryEntry> pending_;  // last decision awaiting its realized return
    std::vector<DecisionRecord> decisions_;
};

/// JSON-lines rendering of a transcript, one record per backend call.
std::string transcript_to_jsonl(std::span<const TranscriptRecord> transcript);

}  // namespace fslab::agents
