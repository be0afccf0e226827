#include "tailhazard/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tailhazard {

namespace {

// Solve dC/du(u, v) = w for v by bisection; the conditional CDF is monotone
// in v with range [0,1].
double invert_conditional(CopulaFamily family, double theta, double u, double w) {
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (copula_conditional(family, theta, u, mid) < w) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-10) return 0.5 * (lo + hi);
    }
    throw std::runtime_error("sample_copula: conditional inversion failed (theta=" +
                             std::to_string(theta) + ", u=" + std::to_string(u) +
                             ", quantile=" + std::to_string(w) + ")");
}

}  // namespace

std::vector<double> sample_ri(const RIFit& fit, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (double& x : out) x = ri_cdf_inverse(fit, rng.uniform());
    return out;
}

std::vector<double> sample_gpd(const GPDFit& fit, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (double& x : out) x = gpd_cdf_inverse(fit, rng.uniform());
    return out;
}

UVSample sample_copula(CopulaFamily family, double theta, std::size_t n,
                       std::uint64_t seed) {
    Rng rng(seed);
    UVSample s;
    s.u.resize(n);
    s.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.u[i] = rng.uniform();
        s.v[i] = invert_conditional(family, theta, s.u[i], rng.uniform());
    }
    return s;
}

void GeneratorSpec::validate() const {
    if (n < 1) throw std::invalid_argument("generator spec: n must be >= 1");
    if (!(threshold > 0.0)) throw std::invalid_argument("generator spec: threshold must be positive");
    // marginal/copula parameter ranges are enforced by their own types
    copula_cdf(copula_family, theta, 0.5, 0.5);
}

EventSeries sample_event_process(const GeneratorSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    const std::size_t n_events = spec.n + 1;
    std::vector<double> u(spec.n), v(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        u[i] = rng.uniform();
        v[i] = invert_conditional(spec.copula_family, spec.theta, u[i], rng.uniform());
    }
    const double v_extra = rng.uniform();  // size of the event with no coupled interval

    EventSeries events;
    events.threshold = spec.threshold;
    events.indices.resize(n_events);
    events.tau.resize(spec.n);
    events.y.resize(n_events);

    events.indices[0] = 0;
    for (std::size_t k = 0; k < spec.n; ++k) {
        // interval k runs from event k to event k+1; ceiling keeps tau >= 1
        const double tau_cont = ri_cdf_inverse(spec.ri, u[k]);
        events.tau[k] = static_cast<int>(std::max(1.0, std::ceil(tau_cont)));
        events.indices[k + 1] = events.indices[k] + static_cast<std::size_t>(events.tau[k]);

        const double y = gpd_cdf_inverse(spec.gpd, v[k]);
        if (spec.pairing == Pairing::End) {
            events.y[k + 1] = y;  // couple with the event closing the interval
        } else {
            events.y[k] = y;  // couple with the event opening it
        }
    }
    const double y_extra = gpd_cdf_inverse(spec.gpd, v_extra);
    if (spec.pairing == Pairing::End) {
        events.y[0] = y_extra;
    } else {
        events.y[n_events - 1] = y_extra;
    }
    return events;
}

ReturnSeries embed_in_returns(const EventSeries& events, std::uint64_t seed,
                              std::size_t n_days) {
    if (events.indices.empty()) {
        throw std::invalid_argument("embed_in_returns: no events");
    }
    const double thr = events.threshold;
    if (!(thr > 0.0)) {
        throw std::invalid_argument("embed_in_returns: event threshold must be positive");
    }
    if (n_days == 0) n_days = events.indices.back() + 1;

    Rng rng(seed);
    ReturnSeries r;
    r.dates.resize(n_days);
    r.returns.resize(n_days);

    Date day{2000, 1, 3};
    for (std::size_t i = 0; i < n_days; ++i) {
        r.dates[i] = day;
        day = day.next_day();
        // bulk days: uniform noise strictly below the threshold, two-sided
        r.returns[i] = -2.0 * thr + rng.uniform() * (2.0 * thr + 0.95 * thr);
    }
    for (std::size_t k = 0; k < events.indices.size(); ++k) {
        const std::size_t idx = events.indices[k];
        if (idx >= n_days) break;
        r.returns[idx] = thr + events.y[k];
    }
    return r;
}

}  // namespace tailhazard
