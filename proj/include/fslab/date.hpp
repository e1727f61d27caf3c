#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace fslab {

/// A UTC calendar day. Stored as days since 1970-01-01 so ordering and
/// day arithmetic are trivial.
class Date {
public:
    Date() = default;

    /// Parses strict ISO-8601 "YYYY-MM-DD". Throws DomainError otherwise.
    static Date from_iso(std::string_view text);
    static std::optional<Date> try_from_iso(std::string_view text);
    static Date from_day_number(std::int32_t days_since_epoch);

    std::string to_iso() const;
    std::int32_t day_number() const { return days_; }

    Date plus_days(std::int32_t n) const { return Date(days_ + n); }
    /// Number of calendar days from *this to `later` (negative if earlier).
    std::int32_t days_until(Date later) const { return later.days_ - days_; }

    auto operator<=>(const Date&) const = default;

private:
    explicit Date(std::int32_t days) : days_(days) {}

    std::int32_t days_ = 0;
};

}  // namespace fslab
