#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fslab/date.hpp"
#include "fslab/market_data.hpp"
#include "fslab/metrics.hpp"

namespace fslab::engine {

/// A daily trading decision in [-1, 1]: the positive fraction of cash spent
/// buying, the negative fraction of holdings sold, zero to hold.
class TradeAction {
public:
    TradeAction() = default;
    explicit TradeAction(double value);  // throws DomainError outside [-1, 1]
    static TradeAction clamped(double value);

    double value() const { return value_; }

private:
    double value_ = 0.0;
};

struct PortfolioState {
    double cash = 0.0;      // USD, never negative
    double units = 0.0;     // asset quantity, never negative
    double fee_rate = 0.0;  // fraction of traded value, in [0, 1)
};

/// Half the capital stays in cash, the other half buys units at start_price.
/// No fee is charged on initialization.
PortfolioState init_portfolio(double capital, double start_price, double fee_rate);

/// Applies one action at the given price. Buys spend action*cash and the fee
/// comes out of the units received; sells liquidate |action|*units and the
/// fee comes out of the cash received.
PortfolioState execute_action(const PortfolioState& state, TradeAction action, double price);

double net_worth(const PortfolioState& state, double price);

struct DailyRecord {
    Date date;
    TradeAction action;
    double execution_price = 0.0;
    double net_worth = 0.0;                   // at the day's open, after execution
    std::optional<double> daily_return;       // vs the previous record; empty on day one
};

/// Return realized since the previous trading day's valuation, observable at
/// the current open before any trade is made.
struct RealizedOutcome {
    Date date;  // the day whose decision produced this outcome
    double value = 0.0;
};

struct Observation {
    Date date;
    std::size_t day_index = 0;     // 0-based within the split
    std::size_t series_index = 0;  // index of `date` in the full series
    const market::MarketSeries* window = nullptr;       // lookback slice ending today
    std::span<const market::NewsArticle> news;          // per config, up to today
    std::optional<RealizedOutcome> prev_outcome;        // empty on the first day
};

/// Behavioral contract for anything the engine can drive, rule-based or
/// agent-backed. Implementations must be causal: a decision may depend only
/// on the observation and state the strategy accumulated itself.
class Strategy {
public:
    virtual ~Strategy() = default;
    virtual TradeAction decide(const Observation& obs) = 0;
};

struct BacktestConfig {
    double capital = 1'000'000.0;
    double fee_rate = 0.0;
    std::size_t lookback_days = 7;
    std::size_t news_days = 1;  // how many trailing days of news each observation carries
};

struct BacktestResult {
    market::DatasetSplit split;
    std::vector<DailyRecord> records;  // exactly the trading days [start, end)
    double final_net_worth = 0.0;      // cash + units * split.end_price
    metrics::MetricsReport metrics;
};

/// Runs the daily loop over the split's trading days: observe, decide,
/// execute at the day's open, record. The final valuation uses the split's
/// recorded end price.
BacktestResult run_backtest(Strategy& strategy, const market::MarketSeries& series,
                            const market::NewsFeed* news, const market::DatasetSplit& split,
                            const BacktestConfig& config = {});

}  // namespace fslab::engine
