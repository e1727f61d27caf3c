#include "fslab/date.hpp"

#include <cctype>
#include <chrono>

#include "fslab/error.hpp"

namespace fslab {

namespace {

bool all_digits(std::string_view s) {
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return !s.empty();
}

}  // namespace

std::optional<Date> Date::try_from_iso(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    const auto ys = text.substr(0, 4);
    const auto ms = text.substr(5, 2);
    const auto ds = text.substr(8, 2);
    if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds)) return std::nullopt;

    const int y = std::stoi(std::string(ys));
    const unsigned m = static_cast<unsigned>(std::stoi(std::string(ms)));
    const unsigned d = static_cast<unsigned>(std::stoi(std::string(ds)));
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    const std::chrono::sys_days days{ymd};
    return Date::from_day_number(static_cast<std::int32_t>(days.time_since_epoch().count()));
}

Date Date::from_iso(std::string_view text) {
    auto d = try_from_iso(text);
    if (!d) throw DomainError("unparseable date: '" + std::string(text) + "' (expected YYYY-MM-DD)");
    return *d;
}

Date Date::from_day_number(std::int32_t days_since_epoch) {
    return Date(days_since_epoch);
}

std::string Date::to_iso() const {
    const std::chrono::sys_days days{std::chrono::days{days_}};
    const std::chrono::year_month_day ymd{days};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

}  // namespace fslab
