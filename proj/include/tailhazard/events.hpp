#pragma once

#include <span>
#include <vector>

#include "tailhazard/series.hpp"

namespace tailhazard {

enum class Side { Positive, Negative };

// Which tail to treat as extreme. Positive extremes live above a high
// quantile (e.g. 0.90/0.95/0.99), negative ones below a low quantile.
struct ExtremeSpec {
    double quantile = 0.90;
    Side side = Side::Positive;

    void validate() const;
};

// POT extremes of a return series: day indices, recurrence intervals tau
// (trading days between consecutive extremes) and exceeding sizes y
// (distance beyond the threshold, always >= 0).
struct EventSeries {
    double threshold = 0.0;
    std::vector<std::size_t> indices;
    std::vector<int> tau;    // tau[k] = indices[k+1] - indices[k]
    std::vector<double> y;   // one per event

    std::size_t count() const { return indices.size(); }
};

// Exceedance is strict: a return exactly equal to the threshold is not an
// extreme. Throws if fewer than 2 events are found.
EventSeries extract_events(const ReturnSeries& r, const ExtremeSpec& spec,
                           double threshold);
EventSeries extract_events(std::span<const double> returns, const ExtremeSpec& spec,
                           double threshold);

// How an interval is matched with an event size when forming (tau, y) pairs:
// End pairs tau[k] with the event that closes it, Start with the event that
// opens it.
enum class Pairing { End, Start };

struct TauYPairs {
    std::vector<double> tau;
    std::vector<double> y;
};

TauYPairs paired_samples(const EventSeries& events, Pairing pairing);

// Moment statistics in the usual reporting shape. kurt is plain (Pearson)
// kurtosis, so a normal sample sits near 3. Constant samples report
// skew = kurt = 0 with the degenerate flag set.
struct DescriptiveStats {
    std::size_t obsv = 0;
    double mean = 0, max = 0, min = 0, median = 0;
    double stdev = 0, skew = 0, kurt = 0;
    bool degenerate = false;
};

DescriptiveStats describe(std::span<const double> sample);

struct PearsonResult {
    double rho = 0;
    double p_value = 1;
};

// Sample Pearson correlation with the two-sided p-value of
// t = rho * sqrt((n-2)/(1-rho^2)) under n-2 degrees of freedom.
PearsonResult pearson_test(std::span<const double> a, std::span<const double> b);

}  // namespace tailhazard
