#pragma once

#include <optional>
#include <span>
#include <vector>

namespace fslab::metrics {

/// The four evaluation figures computed from a net-worth sequence. Daily
/// mean/std are reported in percent; the Sharpe ratio is dimensionless and
/// disengaged when the return standard deviation is zero or undefined.
struct MetricsReport {
    double total_return_pct = 0.0;
    double daily_return_mean_pct = 0.0;
    std::optional<double> daily_return_std_pct;
    std::optional<double> sharpe_ratio;
};

/// 100 * (w_end - w_start) / w_start. Requires w_start > 0.
double total_return(double w_start, double w_end);

/// r_t = (w_t - w_{t-1}) / w_{t-1} as fractions; length n-1. Requires at
/// least two positive net-worth points.
std::vector<double> daily_returns(std::span<const double> net_worths);

/// (mean - risk_free) / sample standard deviation (n-1 divisor). Throws
/// DomainError when fewer than two returns are given or the deviation is
/// zero; the ratio is undefined there, not infinite.
double sharpe(std::span<const double> returns, double risk_free = 0.0);

/// Full report for a backtest: w_start is the initial capital, net_worths
/// the recorded per-day values followed by the final valuation point.
MetricsReport compute_report(double w_start, std::span<const double> net_worths);

}  // namespace fslab::metrics
