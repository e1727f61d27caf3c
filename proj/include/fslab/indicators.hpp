#pragma once

#include <optional>
#include <span>
#include <vector>

namespace fslab::indicators {

/// Per-day indicator values; disengaged until the warm-up window fills.
using IndicatorSeries = std::vector<std::optional<double>>;

/// Arithmetic mean of the trailing `window` prices. Defined from index
/// window-1 onward.
IndicatorSeries sma(std::span<const double> prices, std::size_t window);

/// Exponential moving average with alpha = 2/(period+1), seeded with the
/// first price, so it is defined at every index.
IndicatorSeries ema(std::span<const double> prices, std::size_t period);

struct MacdLines {
    IndicatorSeries macd_line;    // EMA(12) - EMA(26)
    IndicatorSeries signal_line;  // EMA(9) of the macd line
};

MacdLines macd(std::span<const double> prices);

struct BollingerBands {
    IndicatorSeries mid;    // sma(window)
    IndicatorSeries upper;  // mid + k * sigma
    IndicatorSeries lower;  // mid - k * sigma
};

/// Bands at k population standard deviations around the window mean.
BollingerBands bollinger(std::span<const double> prices, std::size_t window = 20, double k = 2.0);

}  // namespace fslab::indicators
