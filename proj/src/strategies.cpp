#include "fslab/strategies.hpp"

#include <algorithm>
#include <future>

#include "fslab/error.hpp"
#include "fslab/indicators.hpp"

namespace fslab::strategies {

void StrategyKind::validate() const {
    switch (family) {
        case Family::sma:
            if (sma_window == 0) throw DomainError("sma window must be at least 1");
            break;
        case Family::slma:
            if (!(slma_short < slma_long))
                throw DomainError("slma requires short window < long window");
            if (slma_short == 0) throw DomainError("slma windows must be at least 1");
            break;
        default:
            break;
    }
}

std::string StrategyKind::label() const {
    switch (family) {
        case Family::buy_and_hold: return "Buy and Hold";
        case Family::sma: return "SMA(" + std::to_string(sma_window) + ")";
        case Family::slma:
            return "SLMA(" + std::to_string(slma_short) + "," + std::to_string(slma_long) + ")";
        case Family::macd: return "MACD";
        case Family::bollinger: return "Bollinger Bands";
        case Family::agent: return "Agent";
    }
    return "?";
}

StrategyKind::Family family_from_string(std::string_view name) {
    if (name == "buy_and_hold") return StrategyKind::Family::buy_and_hold;
    if (name == "sma") return StrategyKind::Family::sma;
    if (name == "slma") return StrategyKind::Family::slma;
    if (name == "macd") return StrategyKind::Family::macd;
    if (name == "bollinger") return StrategyKind::Family::bollinger;
    if (name == "agent") return StrategyKind::Family::agent;
    throw DomainError("unknown strategy '" + std::string(name) +
                      "' (valid: buy_and_hold, sma, slma, macd, bollinger, agent)");
}

std::string_view to_string(StrategyKind::Family family) {
    switch (family) {
        case StrategyKind::Family::buy_and_hold: return "buy_and_hold";
        case StrategyKind::Family::sma: return "sma";
        case StrategyKind::Family::slma: return "slma";
        case StrategyKind::Family::macd: return "macd";
        case StrategyKind::Family::bollinger: return "bollinger";
        case StrategyKind::Family::agent: return "agent";
    }
    return "?";
}

engine::TradeAction buy_and_hold_signal(std::size_t day_index) {
    return engine::TradeAction(day_index == 0 ? 1.0 : 0.0);
}

engine::TradeAction sma_signal(std::span<const double> prices, std::size_t window,
                               std::size_t day_index) {
    if (day_index >= prices.size()) throw DomainError("day index outside price series");
    const auto mean = indicators::sma(prices, window)[day_index];
    if (!mean) return engine::TradeAction(0.0);
    const double price = prices[day_index];
    if (price > *mean) return engine::TradeAction(1.0);
    if (price < *mean) return engine::TradeAction(-1.0);
    return engine::TradeAction(0.0);
}

namespace {

// above(i) = short strictly above long; equality groups with "below".
engine::TradeAction crossover_signal(const indicators::IndicatorSeries& fast,
                                     const indicators::IndicatorSeries& slow,
                                     std::size_t day_index) {
    if (day_index == 0) return engine::TradeAction(0.0);
    const auto& f0 = fast[day_index - 1];
    const auto& s0 = slow[day_index - 1];
    const auto& f1 = fast[day_index];
    const auto& s1 = slow[day_index];
    if (!f0 || !s0 || !f1 || !s1) return engine::TradeAction(0.0);
    const bool above_prev = *f0 > *s0;
    const bool above_now = *f1 > *s1;
    if (!above_prev && above_now) return engine::TradeAction(1.0);
    if (above_prev && !above_now) return engine::TradeAction(-1.0);
    return engine::TradeAction(0.0);
}

}  // namespace

engine::TradeAction slma_signal(std::span<const double> prices, std::size_t short_window,
                                std::size_t long_window, std::size_t day_index) {
    if (!(short_window < long_window))
        throw DomainError("slma requires short window < long window");
    if (day_index >= prices.size()) throw DomainError("day index outside price series");
    const auto fast = indicators::sma(prices, short_window);
    const auto slow = indicators::sma(prices, long_window);
    return crossover_signal(fast, slow, day_index);
}

engine::TradeAction macd_signal(std::span<const double> prices, std::size_t day_index) {
    if (day_index >= prices.size()) throw DomainError("day index outside price series");
    const auto lines = indicators::macd(prices);
    return crossover_signal(lines.macd_line, lines.signal_line, day_index);
}

engine::TradeAction bollinger_signal(std::span<const double> prices, std::size_t day_index) {
    if (day_index >= prices.size()) throw DomainError("day index outside price series");
    const auto bands = indicators::bollinger(prices);
    if (!bands.lower[day_index]) return engine::TradeAction(0.0);
    const double price = prices[day_index];
    if (price < *bands.lower[day_index]) return engine::TradeAction(1.0);
    if (price > *bands.upper[day_index]) return engine::TradeAction(-1.0);
    return engine::TradeAction(0.0);
}

namespace {

class RuleStrategy final : public engine::Strategy {
public:
    RuleStrategy(StrategyKind kind, std::vector<double> prices)
        : kind_(kind), prices_(std::move(prices)) {}

    engine::TradeAction decide(const engine::Observation& obs) override {
        switch (kind_.family) {
            case StrategyKind::Family::buy_and_hold:
                return buy_and_hold_signal(obs.day_index);
            case StrategyKind::Family::sma:
                return sma_signal(prices_, kind_.sma_window, obs.series_index);
            case StrategyKind::Family::slma:
                return slma_signal(prices_, kind_.slma_short, kind_.slma_long, obs.series_index);
            case StrategyKind::Family::macd:
                return macd_signal(prices_, obs.series_index);
            case StrategyKind::Family::bollinger:
                return bollinger_signal(prices_, obs.series_index);
            case StrategyKind::Family::agent:
                break;
        }
        throw DomainError("agent strategies are not rule strategies");
    }

private:
    StrategyKind kind_;
    std::vector<double> prices_;
};

}  // namespace

std::unique_ptr<engine::Strategy> make_rule_strategy(const StrategyKind& kind,
                                                     const market::MarketSeries& series) {
    kind.validate();
    if (kind.family == StrategyKind::Family::agent)
        throw DomainError("agent strategies are constructed with a backend, not as rule strategies");
    return std::make_unique<RuleStrategy>(kind, series.open_prices());
}

std::vector<StrategyKind> TuningGrid::candidates() const {
    std::vector<StrategyKind> out;
    auto sorted = windows;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (family == StrategyKind::Family::sma) {
        for (auto w : sorted) {
            StrategyKind k;
            k.family = family;
            k.sma_window = w;
            out.push_back(k);
        }
    } else if (family == StrategyKind::Family::slma) {
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            for (std::size_t j = i + 1; j < sorted.size(); ++j) {
                StrategyKind k;
                k.family = family;
                k.slma_short = sorted[i];
                k.slma_long = sorted[j];
                out.push_back(k);
            }
        }
    } else {
        throw DomainError("tuning grids exist for sma and slma only");
    }
    return out;
}

TuningResult tune(const TuningGrid& grid, const market::MarketSeries& series,
                  const market::DatasetSplit& validation, const engine::BacktestConfig& config) {
    const auto candidates = grid.candidates();
    if (candidates.empty()) throw DomainError("tuning grid is empty");
    if (!series.covers(validation.start_date, validation.end_date))
        throw DomainError("validation data does not cover the split");

    engine::BacktestConfig tuning_config = config;
    tuning_config.fee_rate = 0.0;  // candidates are ranked fee-free

    // Candidates are independent; evaluate concurrently but reduce in
    // canonical order so ties always resolve the same way.
    std::vector<std::future<double>> futures;
    futures.reserve(candidates.size());
    for (const auto& candidate : candidates) {
        futures.push_back(std::async(std::launch::async, [&, candidate] {
            auto strategy = make_rule_strategy(candidate, series);
            const auto result =
                engine::run_backtest(*strategy, series, nullptr, validation, tuning_config);
            return result.metrics.total_return_pct;
        }));
    }

    TuningResult result;
    result.candidates.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        result.candidates.push_back({candidates[i], futures[i].get()});

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.candidates.size(); ++i) {
        if (result.candidates[i].total_return_pct > result.candidates[best].total_return_pct)
            best = i;
    }
    result.chosen = result.candidates[best].params;
    result.chosen_return_pct = result.candidates[best].total_return_pct;
    return result;
}

}  // namespace fslab::strategies
