#include "tailhazard/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tailhazard/serialize.hpp"

namespace tailhazard {

namespace {

bool is_leap(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap(year)) return 29;
    return kDays[month - 1];
}

}  // namespace

Date Date::parse(const std::string& iso) {
    Date d;
    char extra = 0;
    if (std::sscanf(iso.c_str(), "%4d-%2d-%2d%c", &d.year, &d.month, &d.day, &extra) != 3 ||
        iso.size() != 10) {
        throw std::invalid_argument("invalid date '" + iso + "': expected YYYY-MM-DD");
    }
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) {
        throw std::invalid_argument("invalid calendar date '" + iso + "'");
    }
    return d;
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

Date Date::next_day() const {
    Date d = *this;
    if (++d.day > days_in_month(d.year, d.month)) {
        d.day = 1;
        if (++d.month > 12) {
            d.month = 1;
            ++d.year;
        }
    }
    return d;
}

void PriceSeries::validate() const {
    if (dates.size() != prices.size()) {
        throw std::invalid_argument("price series: dates/prices length mismatch");
    }
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!(prices[i] > 0.0) || !std::isfinite(prices[i])) {
            throw std::invalid_argument("price series: non-positive price at row " +
                                        std::to_string(i + 2));
        }
        if (i > 0 && !(dates[i - 1] < dates[i])) {
            throw std::invalid_argument("price series: dates not strictly increasing at row " +
                                        std::to_string(i + 2));
        }
    }
}

void ReturnSeries::validate() const {
    if (dates.size() != returns.size()) {
        throw std::invalid_argument("return series: dates/returns length mismatch");
    }
    for (std::size_t i = 0; i < returns.size(); ++i) {
        if (!std::isfinite(returns[i])) {
            throw std::invalid_argument("return series: non-finite return at row " +
                                        std::to_string(i + 2));
        }
        if (i > 0 && !(dates[i - 1] < dates[i])) {
            throw std::invalid_argument("return series: dates not strictly increasing at row " +
                                        std::to_string(i + 2));
        }
    }
}

namespace {

struct CsvRow {
    Date date;
    double value = 0;
};

std::vector<CsvRow> load_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "date,value") {
        throw std::runtime_error("'" + path + "': expected header 'date,value', got '" + line + "'");
    }

    std::vector<CsvRow> rows;
    std::size_t row_number = 1;  // header
    while (std::getline(in, line)) {
        ++row_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error("'" + path + "' row " + std::to_string(row_number) +
                                     ": expected 'date,value'");
        }
        CsvRow row;
        try {
            row.date = Date::parse(line.substr(0, comma));
        } catch (const std::exception& e) {
            throw std::runtime_error("'" + path + "' row " + std::to_string(row_number) + ": " +
                                     e.what());
        }
        const std::string value_text = line.substr(comma + 1);
        std::size_t consumed = 0;
        try {
            row.value = std::stod(value_text, &consumed);
        } catch (const std::exception&) {
            consumed = std::string::npos;
        }
        if (consumed != value_text.size() || value_text.empty()) {
            throw std::runtime_error("'" + path + "' row " + std::to_string(row_number) +
                                     ": malformed value '" + value_text + "'");
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

PriceSeries load_price_series(const std::string& path) {
    PriceSeries series;
    for (const CsvRow& row : load_rows(path)) {
        series.dates.push_back(row.date);
        series.prices.push_back(row.value);
    }
    series.validate();
    return series;
}

ReturnSeries load_return_series(const std::string& path) {
    ReturnSeries series;
    for (const CsvRow& row : load_rows(path)) {
        series.dates.push_back(row.date);
        series.returns.push_back(row.value);
    }
    series.validate();
    return series;
}

namespace {

std::string render_series(std::span<const Date> dates, std::span<const double> values) {
    std::ostringstream out;
    out << "date,value\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        out << dates[i].to_string() << ',' << format_double(values[i]) << '\n';
    }
    return out.str();
}

}  // namespace

void save_price_series(const PriceSeries& series, const std::string& path) {
    atomic_write(path, render_series(series.dates, series.prices));
}

void save_return_series(const ReturnSeries& series, const std::string& path) {
    atomic_write(path, render_series(series.dates, series.returns));
}

ReturnSeries to_returns(const PriceSeries& prices) {
    if (prices.size() < 2) {
        throw std::invalid_argument("to_returns: need at least 2 prices");
    }
    prices.validate();
    ReturnSeries r;
    r.dates.assign(prices.dates.begin() + 1, prices.dates.end());
    r.returns.resize(prices.size() - 1);
    for (std::size_t i = 1; i < prices.size(); ++i) {
        r.returns[i - 1] = std::log(prices.prices[i]) - std::log(prices.prices[i - 1]);
    }
    return r;
}

double quantile(std::span<const double> sample, double q) {
    if (sample.empty()) throw std::invalid_argument("quantile: empty sample");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile: q must be in (0,1)");

    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());

    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double quantile(const ReturnSeries& series, double q) {
    return quantile(std::span<const double>(series.returns), q);
}

}  // namespace tailhazard
