#include "fslab/market_data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fslab/error.hpp"

// httplib is only needed by the remote fetch path.
#include <httplib.h>

namespace fslab::market {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& field, const std::string& column, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(field, &pos);
        if (pos != field.size()) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        throw IoError("line " + std::to_string(line_no) + ": unparseable number '" + field +
                      "' in column " + column);
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

constexpr std::array<std::string_view, 7> kCsvColumns = {
    "date", "open", "close", "volume", "avg_gas_fee", "unique_addresses",
    "total_value_transferred"};

}  // namespace

MarketSeries::MarketSeries(std::string asset_id, std::vector<MarketDaySnapshot> days)
    : asset_id_(std::move(asset_id)), days_(std::move(days)) {
    if (asset_id_.empty()) throw DomainError("asset id must be non-empty");
    std::stable_sort(days_.begin(), days_.end(),
                     [](const auto& a, const auto& b) { return a.date < b.date; });
    for (std::size_t i = 0; i < days_.size(); ++i) {
        const auto& d = days_[i];
        if (d.open_price <= 0.0 || d.close_price <= 0.0)
            throw DomainError("non-positive price on " + d.date.to_iso());
        if (d.volume < 0.0 || d.unique_addresses < 0 || d.total_value_transferred < 0.0)
            throw DomainError("negative statistic on " + d.date.to_iso());
        if (i > 0) {
            const auto gap = days_[i - 1].date.days_until(d.date);
            if (gap == 0) throw DomainError("duplicate date " + d.date.to_iso());
            if (gap > 1)
                throw DomainError("gap in series between " + days_[i - 1].date.to_iso() +
                                  " and " + d.date.to_iso());
        }
    }
}

Date MarketSeries::first_date() const {
    if (days_.empty()) throw DomainError("empty series has no first date");
    return days_.front().date;
}

Date MarketSeries::last_date() const {
    if (days_.empty()) throw DomainError("empty series has no last date");
    return days_.back().date;
}

std::optional<std::size_t> MarketSeries::index_of(Date d) const {
    if (days_.empty() || d < first_date() || d > last_date()) return std::nullopt;
    // Contiguous daily coverage makes the index pure arithmetic.
    return static_cast<std::size_t>(first_date().days_until(d));
}

bool MarketSeries::covers(Date first, Date last) const {
    return !days_.empty() && first_date() <= first && last <= last_date();
}

std::vector<double> MarketSeries::open_prices() const {
    std::vector<double> out;
    out.reserve(days_.size());
    for (const auto& d : days_) out.push_back(d.open_price);
    return out;
}

NewsFeed::NewsFeed(std::string asset_id, std::vector<NewsArticle> articles)
    : asset_id_(std::move(asset_id)), articles_(std::move(articles)) {
    for (const auto& a : articles_) {
        if (trim(a.title).empty())
            throw DomainError("news article on " + a.date.to_iso() + " has an empty title");
    }
    std::stable_sort(articles_.begin(), articles_.end(),
                     [](const auto& a, const auto& b) { return a.date < b.date; });
}

std::span<const NewsArticle> NewsFeed::on(Date d) const { return between(d, d); }

std::span<const NewsArticle> NewsFeed::between(Date first, Date last) const {
    const auto lo = std::lower_bound(articles_.begin(), articles_.end(), first,
                                     [](const NewsArticle& a, Date d) { return a.date < d; });
    const auto hi = std::upper_bound(articles_.begin(), articles_.end(), last,
                                     [](Date d, const NewsArticle& a) { return d < a.date; });
    if (lo == hi) return {};
    return {articles_.data() + (lo - articles_.begin()), static_cast<std::size_t>(hi - lo)};
}

std::string_view to_string(SplitKind kind) {
    switch (kind) {
        case SplitKind::validation: return "validation";
        case SplitKind::test_bull: return "test_bull";
        case SplitKind::test_bear: return "test_bear";
    }
    return "unknown";
}

SplitKind split_kind_from_string(std::string_view name) {
    if (name == "validation") return SplitKind::validation;
    if (name == "test_bull") return SplitKind::test_bull;
    if (name == "test_bear") return SplitKind::test_bear;
    throw DomainError("unknown split kind '" + std::string(name) +
                      "' (valid: validation, test_bull, test_bear)");
}

void DatasetSplit::validate() const {
    if (asset_id.empty()) throw DomainError("split asset id must be non-empty");
    if (!(start_date < end_date))
        throw DomainError("split start date " + start_date.to_iso() +
                          " must precede end date " + end_date.to_iso());
    if (start_price <= 0.0 || end_price <= 0.0)
        throw DomainError("split prices must be positive");
}

double split_trend(const DatasetSplit& split) {
    split.validate();
    return 100.0 * (split.end_price - split.start_price) / split.start_price;
}

namespace {

DatasetSplit make_split(const char* asset, SplitKind kind, const char* start, const char* end,
                        double open, double close, double trend) {
    DatasetSplit s;
    s.asset_id = asset;
    s.kind = kind;
    s.start_date = Date::from_iso(start);
    s.end_date = Date::from_iso(end);
    s.start_price = open;
    s.end_price = close;
    s.expected_trend_pct = trend;
    return s;
}

const std::vector<DatasetSplit>& reference_split_table() {
    // Recorded verbatim from the reference dataset table: open/close anchors
    // plus the trend figure published next to them. The SOL rows' published
    // trends are not consistent with their own prices; both are kept so the
    // discrepancy stays visible to the consistency checks.
    static const std::vector<DatasetSplit> table = {
        make_split("BTC", SplitKind::validation, "2023-11-16", "2024-01-15", 37879.97, 42511.96, 12.23),
        make_split("BTC", SplitKind::test_bull, "2024-01-24", "2024-03-13", 39877.59, 71631.35, 79.63),
        make_split("BTC", SplitKind::test_bear, "2024-05-21", "2024-07-13", 71443.06, 59231.95, -17.09),
        make_split("ETH", SplitKind::validation, "2023-11-10", "2024-01-08", 2121.06, 2333.03, 9.99),
        make_split("ETH", SplitKind::test_bull, "2024-01-24", "2024-03-13", 2241.74, 4006.45, 78.72),
        make_split("ETH", SplitKind::test_bear, "2024-05-27", "2024-07-08", 3826.13, 2929.86, -23.42),
        make_split("SOL", SplitKind::validation, "2023-11-16", "2024-01-08", 65.53, 97.79, 49.18),
        make_split("SOL", SplitKind::test_bull, "2024-01-24", "2024-03-13", 84.28, 151.02, 77.35),
        make_split("SOL", SplitKind::test_bear, "2024-05-21", "2024-07-11", 186.51, 127.61, -15.53),
    };
    return table;
}

}  // namespace

std::span<const DatasetSplit> reference_splits() { return reference_split_table(); }

const DatasetSplit& reference_split(std::string_view asset_id, SplitKind kind) {
    for (const auto& s : reference_split_table()) {
        if (s.asset_id == asset_id && s.kind == kind) return s;
    }
    throw DomainError("no reference split for asset '" + std::string(asset_id) + "' and kind '" +
                      std::string(to_string(kind)) + "'");
}

MarketSeries load_market_csv(const std::filesystem::path& path, std::string asset_id) {
    std::ifstream in(path);
    if (!in.is_open()) throw IoError("file not found: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw IoError("empty market CSV: " + path.string());
    const auto header = split_csv_line(line);
    if (header.size() != kCsvColumns.size())
        throw IoError("market CSV header must name the seven columns, got " +
                      std::to_string(header.size()) + " in " + path.string());
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
        if (header[i] != kCsvColumns[i])
            throw IoError("unexpected market CSV column '" + header[i] + "' (expected '" +
                          std::string(kCsvColumns[i]) + "')");
    }

    std::vector<MarketDaySnapshot> days;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != kCsvColumns.size())
            throw IoError("line " + std::to_string(line_no) + ": malformed row (expected " +
                          std::to_string(kCsvColumns.size()) + " fields, got " +
                          std::to_string(fields.size()) + ")");
        MarketDaySnapshot snap;
        const auto date = Date::try_from_iso(fields[0]);
        if (!date)
            throw IoError("line " + std::to_string(line_no) + ": unparseable date '" + fields[0] +
                          "'");
        snap.date = *date;
        snap.open_price = parse_number(fields[1], "open", line_no);
        snap.close_price = parse_number(fields[2], "close", line_no);
        snap.volume = parse_number(fields[3], "volume", line_no);
        snap.avg_gas_fee = parse_number(fields[4], "avg_gas_fee", line_no);
        snap.unique_addresses =
            static_cast<long long>(parse_number(fields[5], "unique_addresses", line_no));
        snap.total_value_transferred =
            parse_number(fields[6], "total_value_transferred", line_no);
        days.push_back(snap);
    }
    return MarketSeries(std::move(asset_id), std::move(days));
}

void save_market_csv(const MarketSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out.is_open()) throw IoError("cannot write " + path.string());
    out << "date,open,close,volume,avg_gas_fee,unique_addresses,total_value_transferred\n";
    // %.17g keeps the round trip lossless for every double.
    char buf[320];
    for (const auto& d : series.days()) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%lld,%.17g",
                      d.date.to_iso().c_str(), d.open_price, d.close_price, d.volume,
                      d.avg_gas_fee, d.unique_addresses, d.total_value_transferred);
        out << buf << '\n';
    }
    if (!out.good()) throw IoError("failed writing " + path.string());
}

namespace {

NewsArticle article_from_json(const nlohmann::json& rec) {
    if (!rec.is_object()) throw IoError("news record is not an object");
    for (const char* key : {"date", "title", "body", "source"}) {
        if (!rec.contains(key)) throw IoError(std::string("missing field: ") + key);
    }
    NewsArticle a;
    a.date = Date::from_iso(rec.at("date").get<std::string>());
    a.title = rec.at("title").get<std::string>();
    a.body = rec.at("body").get<std::string>();
    a.source = rec.at("source").get<std::string>();
    if (rec.contains("url") && rec.at("url").is_string()) a.url = rec.at("url").get<std::string>();
    return a;
}

NewsFeed feed_from_json(const nlohmann::json& doc, std::string asset_id) {
    if (!doc.is_array()) throw IoError("news JSON must be an array of article records");
    std::vector<NewsArticle> articles;
    articles.reserve(doc.size());
    for (const auto& rec : doc) articles.push_back(article_from_json(rec));
    return NewsFeed(std::move(asset_id), std::move(articles));
}

}  // namespace

NewsFeed load_news_json(const std::filesystem::path& path, std::string asset_id) {
    std::ifstream in(path);
    if (!in.is_open()) throw IoError("file not found: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed news JSON in " + path.string() + ": " + e.what());
    }
    return feed_from_json(doc, std::move(asset_id));
}

MarketSeries slice_window(const MarketSeries& series, Date as_of, std::size_t lookback) {
    if (lookback == 0) throw DomainError("lookback must be at least 1");
    const auto idx = series.index_of(as_of);
    if (!idx) throw DomainError("date " + as_of.to_iso() + " is not in the series");
    const std::size_t begin = *idx + 1 >= lookback ? *idx + 1 - lookback : 0;
    std::vector<MarketDaySnapshot> days(series.days().begin() + static_cast<std::ptrdiff_t>(begin),
                                        series.days().begin() + static_cast<std::ptrdiff_t>(*idx + 1));
    return MarketSeries(series.asset_id(), std::move(days));
}

NewsFeed fetch_news_remote(std::string asset_id, DateRange range, const std::string& endpoint,
                           std::span<const std::string> source_allowlist) {
    if (range.last < range.first) throw DomainError("news date range is empty");

    // Split the endpoint into host part and path prefix.
    std::string host = endpoint;
    std::string prefix;
    const auto scheme_pos = host.find("://");
    const auto path_pos = host.find('/', scheme_pos == std::string::npos ? 0 : scheme_pos + 3);
    if (path_pos != std::string::npos) {
        prefix = host.substr(path_pos);
        host = host.substr(0, path_pos);
    }

    httplib::Client client(host);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);

    httplib::Params params{{"keyword", asset_id},
                           {"from", range.first.to_iso()},
                           {"to", range.last.to_iso()},
                           {"lang", "en"}};
    const auto res = client.Get(prefix.empty() ? "/" : prefix, params, httplib::Headers{});
    if (!res)
        throw BackendError("network failure fetching news from " + endpoint + ": " +
                           httplib::to_string(res.error()));
    if (res->status == 429) {
        int retry_after = 1;
        if (res->has_header("Retry-After")) {
            try {
                retry_after = std::stoi(res->get_header_value("Retry-After"));
            } catch (const std::exception&) {
            }
        }
        throw RateLimitError("rate limited by " + endpoint + " (retry after " +
                                 std::to_string(retry_after) + "s)",
                             retry_after);
    }
    if (res->status != 200)
        throw BackendError("news endpoint returned HTTP " + std::to_string(res->status));
    if (trim(res->body).empty()) return NewsFeed(std::move(asset_id), {});

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("unparseable news response: ") + e.what());
    }
    auto feed = feed_from_json(doc, asset_id);

    std::vector<NewsArticle> kept;
    for (const auto& a : feed.articles()) {
        if (a.date < range.first || range.last < a.date) continue;
        if (!source_allowlist.empty() &&
            std::find(source_allowlist.begin(), source_allowlist.end(), a.source) ==
                source_allowlist.end())
            continue;
        kept.push_back(a);
    }
    return NewsFeed(std::move(asset_id), std::move(kept));
}

}  // namespace fslab::market
