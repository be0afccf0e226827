#include "tailhazard/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

namespace tailhazard {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kShapeEps = 1e-6;   // open-interval margin, also the grid step
constexpr double kSingularTol = 1e-9;

struct TauCache {
    std::size_t n = 0;
    double sum = 0;
    double mean = 0;
    std::vector<double> tau;
    std::vector<double> log_tau;
};

TauCache make_cache(std::span<const double> sample) {
    TauCache c;
    c.n = sample.size();
    c.tau.assign(sample.begin(), sample.end());
    c.log_tau.resize(c.n);
    for (std::size_t i = 0; i < c.n; ++i) {
        if (!(sample[i] > 0.0) || !std::isfinite(sample[i])) {
            throw std::invalid_argument("recurrence intervals must be positive and finite");
        }
        c.sum += sample[i];
        c.log_tau[i] = std::log(sample[i]);
    }
    c.mean = c.sum / static_cast<double>(c.n);
    return c;
}

// ln a and ln b of the stretched exponential, computed in log space since
// Gamma(1/mu) overflows for small mu.
struct SEScale {
    double log_a, log_b;
};

SEScale se_scale(double mu, double tau_mean) {
    const double lg1 = std::lgamma(1.0 / mu);
    const double lg2 = std::lgamma(2.0 / mu);
    const double log_tau_mean = std::log(tau_mean);
    return {std::log(mu) + lg2 - 2.0 * lg1 - log_tau_mean, lg2 - lg1 - log_tau_mean};
}

double se_loglik(double mu, double tau_mean, const TauCache& c) {
    const SEScale s = se_scale(mu, tau_mean);
    double sum_pow = 0;
    for (double lt : c.log_tau) sum_pow += std::exp(mu * (s.log_b + lt));
    return static_cast<double>(c.n) * s.log_a - sum_pow;
}

double qe_loglik(double q, double tau_mean, const TauCache& c) {
    if (std::fabs(q - 1.0) < kSingularTol) {
        const double lambda = 1.0 / tau_mean;
        return static_cast<double>(c.n) * std::log(lambda) - lambda * c.sum;
    }
    const double lambda = 1.0 / (tau_mean * (3.0 - 2.0 * q));
    double sum_log = 0;
    for (double t : c.tau) {
        const double arg = 1.0 + (q - 1.0) * lambda * t;
        if (arg <= 0.0) return kNegInf;  // outside the bounded q<1 support
        sum_log += std::log(arg);
    }
    return static_cast<double>(c.n) * std::log(lambda * (2.0 - q)) -
           sum_log / (q - 1.0);
}

double weibull_loglik(double alpha, double tau_mean, const TauCache& c) {
    const double log_beta = std::log(tau_mean) - std::lgamma(1.0 + 1.0 / alpha);
    double sum_log_ratio = 0;
    double sum_pow = 0;
    for (double lt : c.log_tau) {
        const double z = lt - log_beta;
        sum_log_ratio += z;
        sum_pow += std::exp(alpha * z);
    }
    return static_cast<double>(c.n) * (std::log(alpha) - log_beta) +
           (alpha - 1.0) * sum_log_ratio - sum_pow;
}

double loglik_dispatch(RIFamily family, double shape, double tau_mean,
                       const TauCache& c) {
    switch (family) {
        case RIFamily::StretchedExponential: return se_loglik(shape, tau_mean, c);
        case RIFamily::QExponential: return qe_loglik(shape, tau_mean, c);
        case RIFamily::Weibull: return weibull_loglik(shape, tau_mean, c);
    }
    return kNegInf;
}

std::pair<double, double> shape_range(RIFamily family) {
    if (family == RIFamily::QExponential) return {kShapeEps, 1.5 - kShapeEps};
    return {kShapeEps, 1.0 - kShapeEps};
}

}  // namespace

const char* family_name(RIFamily family) {
    switch (family) {
        case RIFamily::StretchedExponential: return "stretched_exponential";
        case RIFamily::QExponential: return "q_exponential";
        case RIFamily::Weibull: return "weibull";
    }
    return "?";
}

RIFit RIFit::from_params(RIFamily family, double shape, double tau_mean) {
    if (!(tau_mean > 0.0) || !std::isfinite(tau_mean)) {
        throw std::invalid_argument("ri fit: tau_mean must be positive");
    }
    const bool in_range =
        family == RIFamily::QExponential ? shape > 0.0 && shape < 1.5
                                         : shape > 0.0 && shape < 1.0;
    if (!in_range) {
        throw std::invalid_argument(std::string("ri fit: shape out of range for ") +
                                    family_name(family));
    }

    RIFit fit;
    fit.family = family;
    fit.shape = shape;
    fit.tau_mean = tau_mean;
    switch (family) {
        case RIFamily::StretchedExponential: {
            const SEScale s = se_scale(shape, tau_mean);
            fit.a = std::exp(s.log_a);
            fit.b = std::exp(s.log_b);
            break;
        }
        case RIFamily::QExponential:
            fit.lambda = std::fabs(shape - 1.0) < kSingularTol
                             ? 1.0 / tau_mean
                             : 1.0 / (tau_mean * (3.0 - 2.0 * shape));
            break;
        case RIFamily::Weibull:
            fit.beta = std::exp(std::log(tau_mean) - std::lgamma(1.0 + 1.0 / shape));
            break;
    }
    return fit;
}

double ri_pdf(const RIFit& fit, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("ri_pdf: tau must be positive");
    const double log_tau = std::log(tau);
    switch (fit.family) {
        case RIFamily::StretchedExponential: {
            const SEScale s = se_scale(fit.shape, fit.tau_mean);
            return std::exp(s.log_a - std::exp(fit.shape * (s.log_b + log_tau)));
        }
        case RIFamily::QExponential: {
            const double q = fit.shape;
            if (std::fabs(q - 1.0) < kSingularTol) {
                return fit.lambda * std::exp(-fit.lambda * tau);
            }
            const double arg = 1.0 + (q - 1.0) * fit.lambda * tau;
            if (arg <= 0.0) return 0.0;
            return (2.0 - q) * fit.lambda * std::exp(-std::log(arg) / (q - 1.0));
        }
        case RIFamily::Weibull: {
            const double log_beta = std::log(fit.tau_mean) - std::lgamma(1.0 + 1.0 / fit.shape);
            const double z = log_tau - log_beta;
            return std::exp(std::log(fit.shape) - log_beta + (fit.shape - 1.0) * z -
                            std::exp(fit.shape * z));
        }
    }
    return 0.0;
}

double ri_cdf(const RIFit& fit, double tau) {
    if (tau < 0.0) throw std::invalid_argument("ri_cdf: tau must be non-negative");
    if (tau == 0.0) return 0.0;
    switch (fit.family) {
        case RIFamily::StretchedExponential: {
            const SEScale s = se_scale(fit.shape, fit.tau_mean);
            const double x = std::exp(fit.shape * (s.log_b + std::log(tau)));
            return boost::math::gamma_p(1.0 / fit.shape, x);
        }
        case RIFamily::QExponential: {
            const double q = fit.shape;
            if (std::fabs(q - 1.0) < kSingularTol) {
                return -std::expm1(-fit.lambda * tau);
            }
            const double arg = 1.0 + (q - 1.0) * fit.lambda * tau;
            if (arg <= 0.0) return 1.0;  // beyond the bounded q<1 support
            return 1.0 - std::exp((q - 2.0) / (q - 1.0) * std::log(arg));
        }
        case RIFamily::Weibull: {
            const double log_beta = std::log(fit.tau_mean) - std::lgamma(1.0 + 1.0 / fit.shape);
            return -std::expm1(-std::exp(fit.shape * (std::log(tau) - log_beta)));
        }
    }
    return 0.0;
}

double ri_cdf_inverse(const RIFit& fit, double u) {
    if (!(u >= 0.0 && u < 1.0)) {
        throw std::invalid_argument("ri_cdf_inverse: u must be in [0,1)");
    }
    if (u == 0.0) return 0.0;
    switch (fit.family) {
        case RIFamily::StretchedExponential: {
            const SEScale s = se_scale(fit.shape, fit.tau_mean);
            const double x = boost::math::gamma_p_inv(1.0 / fit.shape, u);
            return std::exp(std::log(x) / fit.shape - s.log_b);
        }
        case RIFamily::QExponential: {
            const double q = fit.shape;
            if (std::fabs(q - 1.0) < kSingularTol) {
                return -std::log1p(-u) / fit.lambda;
            }
            const double arg = std::exp((q - 1.0) / (q - 2.0) * std::log1p(-u));
            return (arg - 1.0) / ((q - 1.0) * fit.lambda);
        }
        case RIFamily::Weibull: {
            const double log_beta = std::log(fit.tau_mean) - std::lgamma(1.0 + 1.0 / fit.shape);
            return std::exp(log_beta + std::log(-std::log1p(-u)) / fit.shape);
        }
    }
    return 0.0;
}

double ri_loglik(RIFamily family, double shape, double tau_mean,
                 std::span<const double> tau_sample) {
    const TauCache c = make_cache(tau_sample);
    // shape outside the family range is simply infeasible, not an error
    const auto [lo, hi] = shape_range(family);
    if (shape < lo || shape > hi) return kNegInf;
    return loglik_dispatch(family, shape, tau_mean, c);
}

RIFit fit_ri(std::span<const double> tau_sample, RIFamily family,
             const FitOptions& options) {
    if (tau_sample.size() < options.min_sample) {
        throw std::invalid_argument("fit_ri: sample smaller than " +
                                    std::to_string(options.min_sample));
    }
    const TauCache cache = make_cache(tau_sample);
    const auto [mn, mx] = std::minmax_element(cache.tau.begin(), cache.tau.end());
    if (*mn == *mx) {
        throw std::invalid_argument("fit_ri: degenerate sample (all values equal)");
    }

    const auto [lo, hi] = shape_range(family);
    const auto objective = [&](double shape) {
        return loglik_dispatch(family, shape, cache.mean, cache);
    };

    const double shape = options.exact_grid
                             ? grid_search_max(objective, lo, hi, kShapeEps, options.threads)
                             : line_search_max(objective, lo, hi, 1e-10);

    RIFit fit = RIFit::from_params(family, shape, cache.mean);
    fit.loglik = objective(shape);
    fit.at_boundary = shape - lo < 10 * kShapeEps || hi - shape < 10 * kShapeEps;
    return fit;
}

// ---------------------------------------------------------------------------
// GPD
// ---------------------------------------------------------------------------

GPDFit GPDFit::from_params(double xi, double phi) {
    if (!(phi > 0.0) || !std::isfinite(phi) || !std::isfinite(xi)) {
        throw std::invalid_argument("gpd fit: phi must be positive and finite");
    }
    GPDFit fit;
    fit.xi = xi;
    fit.phi = phi;
    return fit;
}

double GPDFit::support_max() const {
    return xi < 0.0 ? -phi / xi : std::numeric_limits<double>::infinity();
}

namespace {

void check_gpd_support(const GPDFit& fit, double y, const char* where) {
    if (y < 0.0) throw std::domain_error(std::string(where) + ": y must be non-negative");
    if (y > fit.support_max()) {
        throw std::domain_error(std::string(where) + ": y above the bounded support -phi/xi");
    }
}

}  // namespace

double gpd_pdf(const GPDFit& fit, double y) {
    check_gpd_support(fit, y, "gpd_pdf");
    if (std::fabs(fit.xi) < kSingularTol) {
        return std::exp(-y / fit.phi) / fit.phi;
    }
    const double arg = 1.0 + fit.xi * y / fit.phi;
    return std::exp(-(1.0 / fit.xi + 1.0) * std::log(arg)) / fit.phi;
}

double gpd_cdf(const GPDFit& fit, double y) {
    check_gpd_support(fit, y, "gpd_cdf");
    if (std::fabs(fit.xi) < kSingularTol) {
        return -std::expm1(-y / fit.phi);
    }
    const double arg = 1.0 + fit.xi * y / fit.phi;
    if (arg <= 0.0) return 1.0;
    return -std::expm1(-std::log(arg) / fit.xi);
}

double gpd_cdf_inverse(const GPDFit& fit, double v) {
    if (!(v >= 0.0 && v < 1.0)) {
        throw std::invalid_argument("gpd_cdf_inverse: v must be in [0,1)");
    }
    if (std::fabs(fit.xi) < kSingularTol) {
        return -fit.phi * std::log1p(-v);
    }
    return fit.phi * std::expm1(-fit.xi * std::log1p(-v)) / fit.xi;
}

double gpd_loglik(double xi, double phi, std::span<const double> y_sample) {
    if (!(phi > 0.0)) return kNegInf;
    const auto n = static_cast<double>(y_sample.size());
    if (std::fabs(xi) < kSingularTol) {
        double sum = 0;
        for (double y : y_sample) sum += y;
        return -n * std::log(phi) - sum / phi;
    }
    double sum_log = 0;
    for (double y : y_sample) {
        const double arg = 1.0 + xi * y / phi;
        if (arg <= 0.0) return kNegInf;
        sum_log += std::log(arg);
    }
    return -n * std::log(phi) - (1.0 / xi + 1.0) * sum_log;
}

GPDFit fit_gpd(std::span<const double> y_sample, const FitOptions& options) {
    if (y_sample.size() < options.min_sample) {
        throw std::invalid_argument("fit_gpd: sample smaller than " +
                                    std::to_string(options.min_sample));
    }
    double mean = 0, mx = 0;
    for (double y : y_sample) {
        if (!(y >= 0.0) || !std::isfinite(y)) {
            throw std::invalid_argument("fit_gpd: exceedances must be non-negative and finite");
        }
        mean += y;
        mx = std::max(mx, y);
    }
    mean /= static_cast<double>(y_sample.size());
    double var = 0;
    for (double y : y_sample) var += (y - mean) * (y - mean);
    var /= static_cast<double>(y_sample.size() - 1);
    if (!(var > 0.0) || !(mean > 0.0)) {
        throw std::invalid_argument("fit_gpd: degenerate sample");
    }

    // method-of-moments seed, plus a fan of generic starts
    const double ratio = mean * mean / var;
    const double xi0 = 0.5 * (1.0 - ratio);
    const double phi0 = 0.5 * mean * (1.0 + ratio);
    const std::pair<double, double> starts[] = {
        {xi0, std::log(std::max(phi0, 1e-12))},
        {0.01, std::log(mean)},
        {0.3, std::log(0.5 * mean)},
        {-0.2, std::log(1.5 * mean)},
    };

    const auto objective = [&](double xi, double log_phi) {
        return gpd_loglik(xi, std::exp(log_phi), y_sample);
    };
    const NelderMeadResult r = nelder_mead_max_2d(objective, starts, 1e-12, 800);
    if (!r.converged) {
        throw std::runtime_error(
            "fit_gpd: optimizer did not converge after " + std::to_string(r.iterations) +
            " iterations (xi=" + std::to_string(r.x0) + ", log_phi=" + std::to_string(r.x1) + ")");
    }

    GPDFit fit = GPDFit::from_params(r.x0, std::exp(r.x1));
    fit.loglik = r.value;
    fit.converged = true;
    return fit;
}

}  // namespace tailhazard
