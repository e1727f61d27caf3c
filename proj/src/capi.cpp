#include "fslab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "fslab/error.hpp"
#include "fslab/experiment.hpp"
#include "fslab/market_data.hpp"
#include "fslab/report.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
fslab_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return FSLAB_OK;
    } catch (const fslab::IoError& e) {
        g_last_error = e.what();
        return FSLAB_ERROR_IO;
    } catch (const fslab::DomainError& e) {
        g_last_error = e.what();
        return FSLAB_ERROR_DOMAIN;
    } catch (const fslab::Error& e) {
        g_last_error = e.what();
        return FSLAB_ERROR_DOMAIN;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return FSLAB_ERROR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return FSLAB_ERROR_INTERNAL;
    }
}

fslab_status invalid_argument(const char* what) {
    g_last_error = what;
    return FSLAB_ERROR_INVALID_ARGUMENT;
}

json parse_json_arg(const char* text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw fslab::DomainError(std::string("malformed ") + what + ": " + e.what());
    }
}

}  // namespace

struct fslab_market_series {
    fslab::market::MarketSeries series;
};

struct fslab_news_feed {
    fslab::market::NewsFeed feed;
};

extern "C" {

const char* fslab_version(void) { return "0.1.0"; }

const char* fslab_last_error(void) { return g_last_error.c_str(); }

void fslab_string_free(char* s) { std::free(s); }

fslab_status fslab_market_series_load_csv(const char* asset_id, const char* path,
                                          fslab_market_series** out_series) {
    if (asset_id == nullptr || path == nullptr || out_series == nullptr)
        return invalid_argument("fslab_market_series_load_csv: null argument");
    return guarded([&] {
        auto series = fslab::market::load_market_csv(path, asset_id);
        *out_series = new fslab_market_series{std::move(series)};
    });
}

fslab_status fslab_market_series_size(const fslab_market_series* series, size_t* out_size) {
    if (series == nullptr || out_size == nullptr)
        return invalid_argument("fslab_market_series_size: null argument");
    *out_size = series->series.size();
    return FSLAB_OK;
}

fslab_status fslab_market_series_date_range(const fslab_market_series* series,
                                            char** out_first_iso, char** out_last_iso) {
    if (series == nullptr || out_first_iso == nullptr || out_last_iso == nullptr)
        return invalid_argument("fslab_market_series_date_range: null argument");
    return guarded([&] {
        *out_first_iso = dup_string(series->series.first_date().to_iso());
        *out_last_iso = dup_string(series->series.last_date().to_iso());
    });
}

void fslab_market_series_free(fslab_market_series* series) { delete series; }

fslab_status fslab_news_feed_load_json(const char* asset_id, const char* path,
                                       fslab_news_feed** out_feed) {
    if (asset_id == nullptr || path == nullptr || out_feed == nullptr)
        return invalid_argument("fslab_news_feed_load_json: null argument");
    return guarded([&] {
        auto feed = fslab::market::load_news_json(path, asset_id);
        *out_feed = new fslab_news_feed{std::move(feed)};
    });
}

fslab_status fslab_news_feed_size(const fslab_news_feed* feed, size_t* out_size) {
    if (feed == nullptr || out_size == nullptr)
        return invalid_argument("fslab_news_feed_size: null argument");
    *out_size = feed->feed.size();
    return FSLAB_OK;
}

void fslab_news_feed_free(fslab_news_feed* feed) { delete feed; }

fslab_status fslab_reference_splits_json(char** out_json) {
    if (out_json == nullptr) return invalid_argument("fslab_reference_splits_json: null argument");
    return guarded([&] {
        auto arr = json::array();
        for (const auto& s : fslab::market::reference_splits()) {
            json item;
            item["asset"] = s.asset_id;
            item["kind"] = std::string(fslab::market::to_string(s.kind));
            item["start_date"] = s.start_date.to_iso();
            item["end_date"] = s.end_date.to_iso();
            item["start_price"] = s.start_price;
            item["end_price"] = s.end_price;
            if (s.expected_trend_pct) item["expected_trend_pct"] = *s.expected_trend_pct;
            arr.push_back(std::move(item));
        }
        *out_json = dup_string(arr.dump());
    });
}

fslab_status fslab_split_trend(const char* asset_id, const char* split_kind,
                               double* out_trend_pct) {
    if (asset_id == nullptr || split_kind == nullptr || out_trend_pct == nullptr)
        return invalid_argument("fslab_split_trend: null argument");
    return guarded([&] {
        const auto& split = fslab::market::reference_split(
            asset_id, fslab::market::split_kind_from_string(split_kind));
        *out_trend_pct = fslab::market::split_trend(split);
    });
}

fslab_status fslab_backtest_run(const char* config_json, char** out_report_json) {
    if (config_json == nullptr || out_report_json == nullptr)
        return invalid_argument("fslab_backtest_run: null argument");
    return guarded([&] {
        const auto report =
            fslab::experiment::run_backtest(parse_json_arg(config_json, "config"));
        *out_report_json = dup_string(report.dump(2));
    });
}

fslab_status fslab_tune_run(const char* config_json, char** out_result_json) {
    if (config_json == nullptr || out_result_json == nullptr)
        return invalid_argument("fslab_tune_run: null argument");
    return guarded([&] {
        const auto result = fslab::experiment::run_tune(parse_json_arg(config_json, "config"));
        *out_result_json = dup_string(result.dump(2));
    });
}

fslab_status fslab_ablation_run(const char* config_json, char** out_result_json) {
    if (config_json == nullptr || out_result_json == nullptr)
        return invalid_argument("fslab_ablation_run: null argument");
    return guarded([&] {
        const auto result =
            fslab::experiment::run_ablation(parse_json_arg(config_json, "config"));
        *out_result_json = dup_string(result.dump(2));
    });
}

fslab_status fslab_render_table(const char* reports_json, int markdown, char** out_table) {
    if (reports_json == nullptr || out_table == nullptr)
        return invalid_argument("fslab_render_table: null argument");
    return guarded([&] {
        const auto doc = parse_json_arg(reports_json, "reports array");
        if (!doc.is_array()) throw fslab::DomainError("reports document must be a JSON array");
        std::vector<fslab::report::LoadedReport> reports;
        reports.reserve(doc.size());
        for (const auto& item : doc) {
            fslab::report::LoadedReport loaded;
            loaded.path = item.value("path", "<inline>");
            if (!item.contains("report"))
                throw fslab::DomainError("reports array entries need a 'report' field");
            loaded.body = item.at("report");
            reports.push_back(std::move(loaded));
        }
        *out_table = dup_string(fslab::report::render_table(reports, markdown != 0));
    });
}

fslab_status fslab_render_ablation_table(const char* ablation_result_json, int markdown,
                                         char** out_table) {
    if (ablation_result_json == nullptr || out_table == nullptr)
        return invalid_argument("fslab_render_ablation_table: null argument");
    return guarded([&] {
        const auto doc = parse_json_arg(ablation_result_json, "ablation result");
        *out_table = dup_string(fslab::report::render_ablation_table(doc, markdown != 0));
    });
}

}  // extern "C"
