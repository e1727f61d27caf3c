#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fslab/engine.hpp"
#include "fslab/market_data.hpp"

namespace fslab::strategies {

/// A strategy family plus its parameters.
struct StrategyKind {
    enum class Family { buy_and_hold, sma, slma, macd, bollinger, agent };

    Family family = Family::buy_and_hold;
    std::size_t sma_window = 10;   // sma only
    std::size_t slma_short = 5;    // slma only, must be < slma_long
    std::size_t slma_long = 20;

    void validate() const;
    std::string label() const;  // e.g. "SMA(10)", "Buy and Hold"
};

StrategyKind::Family family_from_string(std::string_view name);
std::string_view to_string(StrategyKind::Family family);

// Daily signals. All return -1.0, 0.0 or +1.0 and depend only on prices up
// to and including day_index.

/// Full buy on the first trading day, hold afterwards.
engine::TradeAction buy_and_hold_signal(std::size_t day_index);

/// Price above its window mean buys, below sells, equal or warm-up holds.
engine::TradeAction sma_signal(std::span<const double> prices, std::size_t window,
                               std::size_t day_index);

/// Short/long mean crossover: buys the day the short average moves from at-
/// or-below to above the long average, sells on the opposite move. Ties
/// count as "below" so crossings are well-defined.
engine::TradeAction slma_signal(std::span<const double> prices, std::size_t short_window,
                                std::size_t long_window, std::size_t day_index);

/// Macd line vs signal line crossover, same tie rule.
engine::TradeAction macd_signal(std::span<const double> prices, std::size_t day_index);

/// Mean-reversion at the band edges: below the lower band buys, above the
/// upper sells.
engine::TradeAction bollinger_signal(std::span<const double> prices, std::size_t day_index);

/// Wraps a rule-based StrategyKind (not agent) over a full market series as
/// an engine::Strategy. Signals are evaluated at the observation's absolute
/// series index, so indicator history before the split is used when present.
std::unique_ptr<engine::Strategy> make_rule_strategy(const StrategyKind& kind,
                                                     const market::MarketSeries& series);

inline constexpr std::array<std::size_t, 6> default_tuning_windows{5, 10, 15, 20, 25, 30};

struct TuningGrid {
    StrategyKind::Family family = StrategyKind::Family::sma;  // sma or slma
    std::vector<std::size_t> windows{default_tuning_windows.begin(),
                                     default_tuning_windows.end()};

    /// Candidates in canonical order: ascending windows for sma; ordered
    /// (short, long) pairs with short < long for slma.
    std::vector<StrategyKind> candidates() const;
};

struct TuningCandidate {
    StrategyKind params;
    double total_return_pct = 0.0;
};

struct TuningResult {
    std::vector<TuningCandidate> candidates;  // in canonical order
    StrategyKind chosen;
    double chosen_return_pct = 0.0;
};

/// Backtests every candidate on the validation split with the fee-free
/// engine and returns the argmax by total return. Ties break toward the
/// earliest candidate in canonical order, i.e. the smallest window and, for
/// slma, the smallest short window first.
TuningResult tune(const TuningGrid& grid, const market::MarketSeries& series,
                  const market::DatasetSplit& validation,
                  const engine::BacktestConfig& config = {});

}  // namespace fslab::strategies
