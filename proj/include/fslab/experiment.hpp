#pragma once

#include <string>

#include <json.hpp>

namespace fslab::experiment {

/// Runs one backtest described by a JSON config and returns the report
/// document. Recognized keys:
///   asset (required), split (name or custom object), strategy,
///   market_csv / news_json or data_dir, fee_rate, capital, lookback_days,
///   news_days, backend {kind: scripted|http, ...}, ablate [names],
///   memory_capacity, temperature, model, prompts_dir, deterministic.
nlohmann::json run_backtest(const nlohmann::json& config);

/// Grid-tunes sma or slma on a validation split. Extra keys:
///   grid {family, windows}.
nlohmann::json run_tune(const nlohmann::json& config);

/// Runs the full agent pipeline plus ablated variants over the configured
/// regimes. Extra keys: variants [full|reflection|fact_reasoning|
/// subjectivity_reasoning|statistics], regimes [split names].
nlohmann::json run_ablation(const nlohmann::json& config);

}  // namespace fslab::experiment
