#pragma once

#include <span>
#include <string>

#include <json.hpp>

namespace fslab::report {

struct LoadedReport {
    std::string path;  // used in error messages
    nlohmann::json body;
};

/// Renders stored backtest reports as one table row per strategy with
/// column groups per market regime: Total Return (%), Daily Return (%)
/// as mean ± std, and Sharpe Ratio, all rounded to two decimals.
std::string render_table(std::span<const LoadedReport> reports, bool markdown);

/// Renders an ablation result (rows per pipeline variant, bull and bear
/// columns with Return and Sharpe).
std::string render_ablation_table(const nlohmann::json& ablation_result, bool markdown);

}  // namespace fslab::report
