#include "fslab/metrics.hpp"

#include <cmath>

#include "fslab/error.hpp"

namespace fslab::metrics {

double total_return(double w_start, double w_end) {
    if (w_start <= 0.0) throw DomainError("total_return requires a positive starting net worth");
    return 100.0 * (w_end - w_start) / w_start;
}

std::vector<double> daily_returns(std::span<const double> net_worths) {
    if (net_worths.size() < 2)
        throw DomainError("daily_returns requires at least two net-worth points");
    std::vector<double> out;
    out.reserve(net_worths.size() - 1);
    for (std::size_t i = 1; i < net_worths.size(); ++i) {
        if (net_worths[i - 1] <= 0.0)
            throw DomainError("daily_returns requires positive net worth values");
        out.push_back((net_worths[i] - net_worths[i - 1]) / net_worths[i - 1]);
    }
    return out;
}

namespace {

double mean_of(std::span<const double> xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
    const double m = mean_of(xs);
    double sq = 0.0;
    for (double x : xs) sq += (x - m) * (x - m);
    return std::sqrt(sq / static_cast<double>(xs.size() - 1));
}

}  // namespace

double sharpe(std::span<const double> returns, double risk_free) {
    if (returns.size() < 2)
        throw DomainError("sharpe requires at least two returns");
    const double sigma = sample_std(returns);
    if (sigma == 0.0) throw DomainError("sharpe is undefined for zero return deviation");
    return (mean_of(returns) - risk_free) / sigma;
}

MetricsReport compute_report(double w_start, std::span<const double> net_worths) {
    MetricsReport report;
    if (net_worths.empty()) throw DomainError("metrics need at least one net-worth point");
    report.total_return_pct = total_return(w_start, net_worths.back());
    if (net_worths.size() < 2) return report;

    const auto returns = daily_returns(net_worths);
    report.daily_return_mean_pct = 100.0 * mean_of(returns);
    if (returns.size() >= 2) {
        const double sigma = sample_std(returns);
        report.daily_return_std_pct = 100.0 * sigma;
        if (sigma > 0.0) report.sharpe_ratio = mean_of(returns) / sigma;
    }
    return report;
}

}  // namespace fslab::metrics
