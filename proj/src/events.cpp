#include "tailhazard/events.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace tailhazard {

void ExtremeSpec::validate() const {
    if (!(quantile > 0.0 && quantile < 1.0)) {
        throw std::invalid_argument("extreme spec: quantile must be in (0,1)");
    }
    if (side == Side::Positive && quantile <= 0.5) {
        throw std::invalid_argument("extreme spec: positive side requires quantile > 0.5");
    }
    if (side == Side::Negative && quantile >= 0.5) {
        throw std::invalid_argument("extreme spec: negative side requires quantile < 0.5");
    }
}

EventSeries extract_events(const ReturnSeries& r, const ExtremeSpec& spec,
                           double threshold) {
    return extract_events(std::span<const double>(r.returns), spec, threshold);
}

EventSeries extract_events(std::span<const double> returns, const ExtremeSpec& spec,
                           double threshold) {
    spec.validate();

    EventSeries events;
    events.threshold = threshold;
    for (std::size_t i = 0; i < returns.size(); ++i) {
        const double x = returns[i];
        const bool hit = spec.side == Side::Positive ? x > threshold : x < threshold;
        if (!hit) continue;
        events.indices.push_back(i);
        events.y.push_back(spec.side == Side::Positive ? x - threshold : threshold - x);
    }
    if (events.indices.size() < 2) {
        throw std::runtime_error("extract_events: fewer than 2 events above threshold");
    }
    events.tau.resize(events.indices.size() - 1);
    for (std::size_t k = 0; k + 1 < events.indices.size(); ++k) {
        events.tau[k] = static_cast<int>(events.indices[k + 1] - events.indices[k]);
    }
    return events;
}

TauYPairs paired_samples(const EventSeries& events, Pairing pairing) {
    TauYPairs pairs;
    pairs.tau.reserve(events.tau.size());
    pairs.y.reserve(events.tau.size());
    for (std::size_t k = 0; k < events.tau.size(); ++k) {
        pairs.tau.push_back(static_cast<double>(events.tau[k]));
        // interval k runs from event k to event k+1
        pairs.y.push_back(pairing == Pairing::End ? events.y[k + 1] : events.y[k]);
    }
    return pairs;
}

DescriptiveStats describe(std::span<const double> sample) {
    if (sample.size() < 2) {
        throw std::invalid_argument("describe: need at least 2 observations");
    }
    const auto n = static_cast<double>(sample.size());

    DescriptiveStats s;
    s.obsv = sample.size();

    double sum = 0;
    s.min = sample[0];
    s.max = sample[0];
    for (double x : sample) {
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean = sum / n;

    double m2 = 0, m3 = 0, m4 = 0;
    for (double x : sample) {
        const double d = x - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    s.stdev = std::sqrt(m2 * n / (n - 1.0));
    if (m2 <= 0.0) {
        s.degenerate = true;  // constant sample: report 0 rather than NaN
        s.skew = 0.0;
        s.kurt = 0.0;
    } else {
        s.skew = m3 / std::pow(m2, 1.5);
        s.kurt = m4 / (m2 * m2);
    }

    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    s.median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    return s;
}

PearsonResult pearson_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("pearson_test: samples differ in length");
    }
    if (a.size() < 3) {
        throw std::invalid_argument("pearson_test: need at least 3 pairs");
    }
    const auto n = static_cast<double>(a.size());

    double mean_a = 0, mean_b = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= n;
    mean_b /= n;

    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) {
        throw std::invalid_argument("pearson_test: zero variance sample");
    }

    PearsonResult result;
    result.rho = sab / std::sqrt(saa * sbb);
    result.rho = std::clamp(result.rho, -1.0, 1.0);

    const double df = n - 2.0;
    const double denom = 1.0 - result.rho * result.rho;
    if (denom < 1e-15) {
        result.p_value = 0.0;
        return result;
    }
    const double t = result.rho * std::sqrt(df / denom);
    boost::math::students_t dist(df);
    result.p_value = 2.0 * boost::math::cdf(dist, -std::fabs(t));
    return result;
}

}  // namespace tailhazard
