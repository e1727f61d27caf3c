#include "fslab/engine.hpp"

#include <algorithm>
#include <cmath>

#include "fslab/error.hpp"

namespace fslab::engine {

TradeAction::TradeAction(double value) : value_(value) {
    if (!(value >= -1.0 && value <= 1.0))
        throw DomainError("trade action " + std::to_string(value) + " outside [-1, 1]");
}

TradeAction TradeAction::clamped(double value) {
    if (std::isnan(value)) return TradeAction(0.0);
    return TradeAction(std::clamp(value, -1.0, 1.0));
}

PortfolioState init_portfolio(double capital, double start_price, double fee_rate) {
    if (capital <= 0.0) throw DomainError("capital must be positive");
    if (start_price <= 0.0) throw DomainError("start price must be positive");
    if (fee_rate < 0.0 || fee_rate >= 1.0) throw DomainError("fee rate must be in [0, 1)");
    PortfolioState state;
    state.cash = capital / 2.0;
    state.units = (capital / 2.0) / start_price;
    state.fee_rate = fee_rate;
    return state;
}

PortfolioState execute_action(const PortfolioState& state, TradeAction action, double price) {
    if (price <= 0.0) throw DomainError("execution price must be positive");
    PortfolioState next = state;
    const double a = action.value();
    if (a > 0.0) {
        const double spend = a * state.cash;
        next.cash = state.cash - spend;
        next.units = state.units + spend * (1.0 - state.fee_rate) / price;
    } else if (a < 0.0) {
        const double sold = -a * state.units;
        next.units = state.units - sold;
        next.cash = state.cash + sold * price * (1.0 - state.fee_rate);
    }
    return next;
}

double net_worth(const PortfolioState& state, double price) {
    if (price <= 0.0) throw DomainError("valuation price must be positive");
    return state.cash + state.units * price;
}

BacktestResult run_backtest(Strategy& strategy, const market::MarketSeries& series,
                            const market::NewsFeed* news, const market::DatasetSplit& split,
                            const BacktestConfig& config) {
    split.validate();
    if (config.lookback_days == 0) throw DomainError("lookback must be at least 1 day");
    const auto trading_days = split.start_date.days_until(split.end_date);
    if (trading_days <= 0) throw DomainError("empty trading range");
    if (!series.covers(split.start_date, split.end_date))
        throw DomainError("market series does not cover split " + split.start_date.to_iso() +
                          " .. " + split.end_date.to_iso());

    BacktestResult result;
    result.split = split;
    result.records.reserve(static_cast<std::size_t>(trading_days));

    PortfolioState state = init_portfolio(config.capital, split.start_price, config.fee_rate);

    for (std::int32_t i = 0; i < trading_days; ++i) {
        const Date day = split.start_date.plus_days(i);
        const std::size_t series_index = *series.index_of(day);
        const double price = series.at(series_index).open_price;

        Observation obs;
        obs.date = day;
        obs.day_index = static_cast<std::size_t>(i);
        obs.series_index = series_index;
        const auto window = market::slice_window(series, day, config.lookback_days);
        obs.window = &window;
        if (news != nullptr) {
            const Date from = day.plus_days(-(static_cast<std::int32_t>(config.news_days) - 1));
            obs.news = news->between(from, day);
        }
        if (!result.records.empty()) {
            const auto& prev = result.records.back();
            obs.prev_outcome = RealizedOutcome{
                prev.date, net_worth(state, price) / prev.net_worth - 1.0};
        }

        TradeAction action;
        try {
            action = strategy.decide(obs);
        } catch (const IoError& e) {
            throw IoError("strategy failed on " + day.to_iso() + ": " + e.what());
        } catch (const std::exception& e) {
            throw DomainError("strategy failed on " + day.to_iso() + ": " + e.what());
        }

        state = execute_action(state, action, price);

        DailyRecord record;
        record.date = day;
        record.action = action;
        record.execution_price = price;
        record.net_worth = net_worth(state, price);
        if (!result.records.empty())
            record.daily_return = record.net_worth / result.records.back().net_worth - 1.0;
        result.records.push_back(record);
    }

    result.final_net_worth = net_worth(state, split.end_price);

    std::vector<double> worths;
    worths.reserve(result.records.size() + 1);
    for (const auto& r : result.records) worths.push_back(r.net_worth);
    worths.push_back(result.final_net_worth);
    result.metrics = metrics::compute_report(config.capital, worths);
    return result;
}

}  // namespace fslab::engine
