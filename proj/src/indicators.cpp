#include "fslab/indicators.hpp"

#include <cmath>

#include "fslab/error.hpp"

namespace fslab::indicators {

IndicatorSeries sma(std::span<const double> prices, std::size_t window) {
    if (window == 0) throw DomainError("sma window must be at least 1");
    IndicatorSeries out(prices.size());
    if (prices.size() + 1 <= window) return out;
    // Direct window sums; at daily scale there is no reason to trade the
    // exactness of fresh summation for a running total.
    for (std::size_t i = window - 1; i < prices.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j = i + 1 - window; j <= i; ++j) sum += prices[j];
        out[i] = sum / static_cast<double>(window);
    }
    return out;
}

IndicatorSeries ema(std::span<const double> prices, std::size_t period) {
    if (period == 0) throw DomainError("ema period must be at least 1");
    if (prices.empty()) throw DomainError("ema requires a non-empty series");
    const double alpha = 2.0 / (static_cast<double>(period) + 1.0);
    IndicatorSeries out(prices.size());
    double value = prices[0];
    out[0] = value;
    for (std::size_t i = 1; i < prices.size(); ++i) {
        value = alpha * prices[i] + (1.0 - alpha) * value;
        out[i] = value;
    }
    return out;
}

MacdLines macd(std::span<const double> prices) {
    if (prices.empty()) throw DomainError("macd requires a non-empty series");
    const auto fast = ema(prices, 12);
    const auto slow = ema(prices, 26);
    std::vector<double> diff(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i) diff[i] = *fast[i] - *slow[i];

    MacdLines lines;
    lines.macd_line.assign(diff.begin(), diff.end());
    // 9-day EMA over the macd line, same seeding rule.
    const double alpha = 2.0 / 10.0;
    lines.signal_line.resize(diff.size());
    double value = diff[0];
    lines.signal_line[0] = value;
    for (std::size_t i = 1; i < diff.size(); ++i) {
        value = alpha * diff[i] + (1.0 - alpha) * value;
        lines.signal_line[i] = value;
    }
    return lines;
}

BollingerBands bollinger(std::span<const double> prices, std::size_t window, double k) {
    if (window < 2) throw DomainError("bollinger window must be at least 2");
    BollingerBands bands;
    bands.mid = sma(prices, window);
    bands.upper.resize(prices.size());
    bands.lower.resize(prices.size());
    if (prices.size() + 1 <= window) return bands;
    for (std::size_t i = window - 1; i < prices.size(); ++i) {
        if (!bands.mid[i]) continue;
        const double mean = *bands.mid[i];
        double sq = 0.0;
        for (std::size_t j = i + 1 - window; j <= i; ++j) {
            const double d = prices[j] - mean;
            sq += d * d;
        }
        const double sigma = std::sqrt(sq / static_cast<double>(window));
        bands.upper[i] = mean + k * sigma;
        bands.lower[i] = mean - k * sigma;
    }
    return bands;
}

}  // namespace fslab::indicators
