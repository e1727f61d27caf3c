#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fslab/date.hpp"

namespace fslab::market {

/// One day of price and on-chain statistics for one asset.
struct MarketDaySnapshot {
    Date date;
    double open_price = 0.0;               // USD per unit
    double close_price = 0.0;              // USD per unit
    double volume = 0.0;                   // USD
    double avg_gas_fee = 0.0;              // asset-native units
    long long unique_addresses = 0;
    double total_value_transferred = 0.0;  // USD
};

/// A validated daily series: strictly increasing dates with no duplicates
/// and no missing calendar days inside the covered range. Immutable after
/// construction, safe to share across threads.
class MarketSeries {
public:
    MarketSeries(std::string asset_id, std::vector<MarketDaySnapshot> days);

    const std::string& asset_id() const { return asset_id_; }
    std::span<const MarketDaySnapshot> days() const { return days_; }
    std::size_t size() const { return days_.size(); }
    bool empty() const { return days_.empty(); }
    const MarketDaySnapshot& at(std::size_t i) const { return days_.at(i); }

    Date first_date() const;
    Date last_date() const;
    std::optional<std::size_t> index_of(Date d) const;
    bool covers(Date first, Date last) const;

    /// Open prices in day order; the price stream used by indicators and
    /// the execution engine.
    std::vector<double> open_prices() const;

private:
    std::string asset_id_;
    std::vector<MarketDaySnapshot> days_;
};

struct NewsArticle {
    Date date;
    std::string title;
    std::string body;
    std::string source;
    std::string url;  // optional, may be empty
};

/// Dated news articles for one asset, sorted ascending by date.
class NewsFeed {
public:
    NewsFeed() = default;
    NewsFeed(std::string asset_id, std::vector<NewsArticle> articles);

    const std::string& asset_id() const { return asset_id_; }
    std::span<const NewsArticle> articles() const { return articles_; }
    std::size_t size() const { return articles_.size(); }

    /// Articles dated exactly `d`.
    std::span<const NewsArticle> on(Date d) const;
    /// Articles with first <= date <= last.
    std::span<const NewsArticle> between(Date first, Date last) const;

private:
    std::string asset_id_;
    std::vector<NewsArticle> articles_;
};

enum class SplitKind { validation, test_bull, test_bear };

std::string_view to_string(SplitKind kind);
SplitKind split_kind_from_string(std::string_view name);

/// A named trading window. Trading days are [start_date, end_date); the end
/// date is excluded from trading and supplies the final valuation via
/// end_price. start_price/end_price are the recorded valuation prices and
/// are treated as opaque anchors.
struct DatasetSplit {
    std::string asset_id;
    SplitKind kind = SplitKind::validation;
    Date start_date;
    Date end_date;
    double start_price = 0.0;
    double end_price = 0.0;
    std::optional<double> expected_trend_pct;

    void validate() const;  // throws DomainError on a broken invariant
};

/// Price trend of a split as a signed percentage:
/// 100 * (end_price - start_price) / start_price.
double split_trend(const DatasetSplit& split);

/// The built-in reference splits for BTC, ETH and SOL (validation plus the
/// bull and bear test windows), with their recorded prices and the trend
/// values published alongside them.
std::span<const DatasetSplit> reference_splits();
const DatasetSplit& reference_split(std::string_view asset_id, SplitKind kind);

/// Loads a market CSV: UTF-8, header row
///   date,open,close,volume,avg_gas_fee,unique_addresses,total_value_transferred
/// ISO-8601 dates, decimal-point numbers. Rows may arrive unsorted; the
/// result is sorted and fully validated. Errors carry the line number.
MarketSeries load_market_csv(const std::filesystem::path& path, std::string asset_id);

/// Inverse of load_market_csv; load(save(s)) == s.
void save_market_csv(const MarketSeries& series, const std::filesystem::path& path);

/// Loads a news JSON file: an array of objects with keys date, title, body,
/// source and optional url.
NewsFeed load_news_json(const std::filesystem::path& path, std::string asset_id);

/// The `lookback` most recent snapshots ending at and including `as_of`;
/// shorter when `as_of` is near the head of the series.
MarketSeries slice_window(const MarketSeries& series, Date as_of, std::size_t lookback);

struct DateRange {
    Date first;
    Date last;  // inclusive
};

/// Best-effort remote news fetch:
///   GET {endpoint}?keyword={asset}&from={first}&to={last}&lang=en
/// expecting a JSON array in the news-article schema. When `source_allowlist`
/// is non-empty, articles from other publishers are dropped. Throws
/// BackendError on transport failure and RateLimitError on HTTP 429.
/// Never used by fixture-driven runs.
NewsFeed fetch_news_remote(std::string asset_id, DateRange range, const std::string& endpoint,
                           std::span<const std::string> source_allowlist = {});

}  // namespace fslab::market
