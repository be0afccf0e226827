#pragma once

#include <span>
#include <string>
#include <vector>

namespace tailhazard {

// Calendar date, ISO-8601. Comparison is lexicographic on (year, month, day).
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    static Date parse(const std::string& iso);
    std::string to_string() const;
    Date next_day() const;
};

// Dated index levels I(t). Dates strictly increasing, prices strictly positive.
struct PriceSeries {
    std::vector<Date> dates;
    std::vector<double> prices;

    std::size_t size() const { return prices.size(); }
    void validate() const;
};

// Dated log returns. Finite values only.
struct ReturnSeries {
    std::vector<Date> dates;
    std::vector<double> returns;

    std::size_t size() const { return returns.size(); }
    void validate() const;
};

// CSV loaders for the `date,value` schema. Malformed rows are reported by
// 1-based row number (header is row 1).
PriceSeries load_price_series(const std::string& path);
ReturnSeries load_return_series(const std::string& path);

void save_price_series(const PriceSeries& series, const std::string& path);
void save_return_series(const ReturnSeries& series, const std::string& path);

// r(t) = ln I(t) - ln I(t-1); output has n-1 rows, dated at the later day.
ReturnSeries to_returns(const PriceSeries& prices);

// Empirical quantile by linear interpolation of order statistics at rank
// q*(n-1)+1 (the "type-7" convention shared by most default implementations).
double quantile(std::span<const double> sample, double q);
double quantile(const ReturnSeries& series, double q);

}  // namespace tailhazard
