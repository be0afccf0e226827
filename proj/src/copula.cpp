#include "tailhazard/copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tailhazard {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kIndependenceTol = 1e-9;
constexpr double kClamp = 1e-9;  // pseudo-observation clamp
constexpr double kFrankMax = 50.0;
constexpr double kFrankHole = 1e-4;
constexpr double kAmhLo = -1.0 + 1e-9;
constexpr double kAmhHi = 1.0 - 1e-6;
// AIC of an exactly-zero RMSE would be -inf; report this instead.
constexpr double kPerfectFitAic = -1e12;

void check_theta(CopulaFamily family, double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("copula: theta must be finite");
    if (family == CopulaFamily::Frank) {
        if (std::fabs(theta) > kFrankMax) {
            throw std::invalid_argument("frank copula: |theta| must be <= 50");
        }
    } else {
        if (theta < -1.0 || theta >= 1.0) {
            throw std::invalid_argument("amh copula: theta must be in [-1, 1)");
        }
    }
}

bool independent(double theta) { return std::fabs(theta) < kIndependenceTol; }

double frank_cdf(double theta, double u, double v) {
    const double eu = std::expm1(-theta * u);
    const double ev = std::expm1(-theta * v);
    const double e1 = std::expm1(-theta);
    return -std::log1p(eu * ev / e1) / theta;
}

double frank_pdf(double theta, double u, double v) {
    const double eu = std::expm1(-theta * u);
    const double ev = std::expm1(-theta * v);
    const double e1 = std::expm1(-theta);
    const double bracket = e1 + eu * ev;  // -(paper bracket); squared below
    return -theta * e1 * std::exp(-theta * (u + v)) / (bracket * bracket);
}

double frank_conditional(double theta, double u, double v) {
    const double ev = std::expm1(-theta * v);
    const double e1 = std::expm1(-theta);
    const double eu = std::expm1(-theta * u);
    return std::exp(-theta * u) * ev / (e1 + eu * ev);
}

double amh_cdf(double theta, double u, double v) {
    return u * v / (1.0 - theta * (1.0 - u) * (1.0 - v));
}

double amh_pdf(double theta, double u, double v) {
    const double d = 1.0 - theta * (1.0 - u) * (1.0 - v);
    const double num = 1.0 + theta * ((1.0 + u) * (1.0 + v) - 3.0) +
                       theta * theta * (1.0 - u) * (1.0 - v);
    return num / (d * d * d);
}

double amh_conditional(double theta, double u, double v) {
    const double d = 1.0 - theta * (1.0 - u) * (1.0 - v);
    return v * (d - u * theta * (1.0 - v)) / (d * d);
}

void check_unit(double u, double v, const char* where) {
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument(std::string(where) + ": u,v must lie in [0,1]");
    }
}

}  // namespace

const char* family_name(CopulaFamily family) {
    return family == CopulaFamily::Frank ? "frank" : "amh";
}

double copula_cdf(CopulaFamily family, double theta, double u, double v) {
    check_theta(family, theta);
    check_unit(u, v, "copula_cdf");
    // boundary identities hold exactly
    if (u == 0.0 || v == 0.0) return 0.0;
    if (u == 1.0) return v;
    if (v == 1.0) return u;
    if (independent(theta)) return u * v;
    return family == CopulaFamily::Frank ? frank_cdf(theta, u, v) : amh_cdf(theta, u, v);
}

double copula_pdf(CopulaFamily family, double theta, double u, double v) {
    check_theta(family, theta);
    if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0)) {
        throw std::invalid_argument("copula_pdf: u,v must lie in (0,1)");
    }
    if (independent(theta)) return 1.0;
    const double c = family == CopulaFamily::Frank ? frank_pdf(theta, u, v)
                                                   : amh_pdf(theta, u, v);
    return std::max(c, 0.0);
}

double copula_conditional(CopulaFamily family, double theta, double u, double v) {
    check_theta(family, theta);
    check_unit(u, v, "copula_conditional");
    if (v == 0.0) return 0.0;
    if (v == 1.0) return 1.0;
    if (independent(theta)) return v;
    return family == CopulaFamily::Frank ? frank_conditional(theta, u, v)
                                         : amh_conditional(theta, u, v);
}

PseudoSample make_pseudo_sample(const RIFit& ri, const GPDFit& gpd,
                                std::span<const double> tau,
                                std::span<const double> y) {
    if (tau.size() != y.size()) {
        throw std::invalid_argument("make_pseudo_sample: tau/y length mismatch");
    }
    PseudoSample ps;
    ps.u.reserve(tau.size());
    ps.v.reserve(tau.size());
    const double y_max = gpd.support_max();
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const double u = ri_cdf(ri, tau[i]);
        const double v = gpd_cdf(gpd, std::min(y[i], y_max));
        ps.u.push_back(std::clamp(u, kClamp, 1.0 - kClamp));
        ps.v.push_back(std::clamp(v, kClamp, 1.0 - kClamp));
    }
    return ps;
}

double copula_loglik(CopulaFamily family, double theta, const PseudoSample& ps) {
    if (family == CopulaFamily::Frank ? std::fabs(theta) > kFrankMax
                                      : theta < -1.0 || theta >= 1.0) {
        return kNegInf;
    }
    if (independent(theta)) return 0.0;

    double sum = 0;
    if (family == CopulaFamily::Frank) {
        const double e1 = std::expm1(-theta);
        const double log_const = std::log(-theta * e1);  // theta*(1-e^-theta) > 0 always
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const double eu = std::expm1(-theta * ps.u[i]);
            const double ev = std::expm1(-theta * ps.v[i]);
            const double bracket = std::fabs(e1 + eu * ev);
            if (!(bracket > 0.0)) return kNegInf;
            sum += log_const - theta * (ps.u[i] + ps.v[i]) - 2.0 * std::log(bracket);
        }
    } else {
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const double u = ps.u[i];
            const double v = ps.v[i];
            const double d = 1.0 - theta * (1.0 - u) * (1.0 - v);
            const double num = 1.0 + theta * ((1.0 + u) * (1.0 + v) - 3.0) +
                               theta * theta * (1.0 - u) * (1.0 - v);
            if (!(num > 0.0) || !(d > 0.0)) return kNegInf;
            sum += std::log(num) - 3.0 * std::log(d);
        }
    }
    return sum;
}

namespace {

void check_pseudo_sample(const PseudoSample& ps, std::size_t min_sample) {
    if (ps.u.size() != ps.v.size()) {
        throw std::invalid_argument("pseudo-sample: u/v length mismatch");
    }
    if (ps.size() < min_sample) {
        throw std::invalid_argument("fit_copula: sample smaller than " +
                                    std::to_string(min_sample));
    }
    const auto [umin, umax] = std::minmax_element(ps.u.begin(), ps.u.end());
    const auto [vmin, vmax] = std::minmax_element(ps.v.begin(), ps.v.end());
    if (*umin == *umax || *vmin == *vmax) {
        throw std::invalid_argument("fit_copula: degenerate pseudo-sample");
    }
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (!(ps.u[i] > 0.0 && ps.u[i] < 1.0 && ps.v[i] > 0.0 && ps.v[i] < 1.0)) {
            throw std::invalid_argument("fit_copula: pseudo-observations must lie in (0,1)");
        }
    }
}

}  // namespace

CopulaFit fit_copula(const PseudoSample& ps, CopulaFamily family,
                     const FitOptions& options) {
    check_pseudo_sample(ps, options.min_sample);

    const auto objective = [&](double theta) { return copula_loglik(family, theta, ps); };

    double theta = 0, lo = 0, hi = 0;
    if (family == CopulaFamily::Frank) {
        // the hole around zero keeps the MLE away from the removable
        // singularity; pick the better side
        if (options.exact_grid) {
            const double neg = grid_search_max(objective, -kFrankMax, -kFrankHole, 1e-6,
                                               options.threads);
            const double pos = grid_search_max(objective, kFrankHole, kFrankMax, 1e-6,
                                               options.threads);
            theta = objective(neg) >= objective(pos) ? neg : pos;
        } else {
            const double neg = line_search_max(objective, -kFrankMax, -kFrankHole, 1e-10);
            const double pos = line_search_max(objective, kFrankHole, kFrankMax, 1e-10);
            theta = objective(neg) >= objective(pos) ? neg : pos;
        }
        lo = -kFrankMax;
        hi = kFrankMax;
    } else {
        theta = options.exact_grid
                    ? grid_search_max(objective, kAmhLo, kAmhHi, 1e-6, options.threads)
                    : line_search_max(objective, kAmhLo, kAmhHi, 1e-10);
        lo = kAmhLo;
        hi = kAmhHi;
    }

    CopulaFit fit;
    fit.family = family;
    fit.theta = theta;
    fit.loglik = objective(theta);
    fit.n = ps.size();
    fit.at_boundary = theta - lo < 1e-3 || hi - theta < 1e-3;

    const GoodnessOfFit gof = goodness_of_fit(ps, fit);
    fit.rmse = gof.rmse;
    fit.aic = gof.aic;
    fit.perfect_fit = gof.perfect;
    return fit;
}

GoodnessOfFit goodness_of_fit(const PseudoSample& ps, const CopulaFit& fit) {
    const std::size_t n = ps.size();
    if (n < 2) throw std::invalid_argument("goodness_of_fit: need at least 2 observations");

    double sq = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t below = 0;
        for (std::size_t j = 0; j < n; ++j) {
            below += ps.u[j] <= ps.u[i] && ps.v[j] <= ps.v[i];
        }
        const double empirical = static_cast<double>(below) / static_cast<double>(n);
        const double theoretical = copula_cdf(fit.family, fit.theta, ps.u[i], ps.v[i]);
        sq += (empirical - theoretical) * (empirical - theoretical);
    }
    const double mse = sq / static_cast<double>(n - 1);

    GoodnessOfFit gof;
    gof.rmse = std::sqrt(mse);
    if (mse <= 0.0) {
        gof.perfect = true;
        gof.aic = kPerfectFitAic;
    } else {
        gof.aic = static_cast<double>(n) * std::log(mse) + 2.0;  // m = 1 copula parameter
    }
    return gof;
}

CopulaFit select_copula(const PseudoSample& ps, const FitOptions& options) {
    CopulaFit frank, amh;
    bool frank_ok = false, amh_ok = false;
    std::string err;
    try {
        frank = fit_copula(ps, CopulaFamily::Frank, options);
        frank_ok = true;
    } catch (const std::exception& e) {
        err = e.what();
    }
    try {
        amh = fit_copula(ps, CopulaFamily::AMH, options);
        amh_ok = true;
    } catch (const std::exception& e) {
        err = e.what();
    }
    if (!frank_ok && !amh_ok) {
        throw std::runtime_error("select_copula: both fits failed: " + err);
    }
    if (!amh_ok) return frank;
    if (!frank_ok) return amh;
    if (frank.aic != amh.aic) return frank.aic < amh.aic ? frank : amh;
    if (frank.rmse != amh.rmse) return frank.rmse < amh.rmse ? frank : amh;
    return frank;  // final tie-break
}

}  // namespace tailhazard
