#pragma once

#include <span>

#include "tailhazard/optimize.hpp"

namespace tailhazard {

enum class RIFamily { StretchedExponential, QExponential, Weibull };

const char* family_name(RIFamily family);

// One-parameter recurrence-interval distribution, mean-constrained so that
// E[tau] equals the sample mean tau_mean:
//
//   stretched exponential  p(tau) = a exp(-(b tau)^mu),    mu in (0,1)
//   q-exponential          p(tau) = (2-q) lambda [1+(q-1) lambda tau]^(-1/(q-1)),
//                          q in (0,1.5), lambda = 1/(tau_mean (3-2q))
//   Weibull                p(tau) = (alpha/beta)(tau/beta)^(alpha-1) e^(-(tau/beta)^alpha),
//                          alpha in (0,1), beta = tau_mean / Gamma(1+1/alpha)
//
// Shapes within 1e-9 of q = 1 evaluate through the exponential limit.
struct RIFit {
    RIFamily family = RIFamily::QExponential;
    double shape = 0;      // mu, q or alpha
    double tau_mean = 0;   // tau_Q, the sample mean
    double a = 0, b = 0;   // stretched exponential scale pair
    double lambda = 0;     // q-exponential rate
    double beta = 0;       // Weibull scale
    double loglik = 0;
    bool at_boundary = false;

    // Builds a fit directly from (family, shape, tau_mean), deriving the
    // dependent parameters. Throws on shapes outside the family range.
    static RIFit from_params(RIFamily family, double shape, double tau_mean);
};

double ri_pdf(const RIFit& fit, double tau);
double ri_cdf(const RIFit& fit, double tau);
// Inverse CDF on u in [0,1). Used by the synthetic samplers.
double ri_cdf_inverse(const RIFit& fit, double u);

// Log-likelihood of the mean-constrained family at the given shape;
// -infinity where the sample leaves the support (q < 1 truncates it).
double ri_loglik(RIFamily family, double shape, double tau_mean,
                 std::span<const double> tau_sample);

// Maximum-likelihood shape over the family's open interval. Line search by
// default; options.exact_grid reproduces the exhaustive 1e-6 grid.
RIFit fit_ri(std::span<const double> tau_sample, RIFamily family,
             const FitOptions& options = {});

// Generalized Pareto exceedance model, g(y) = (1/phi)(1+xi y/phi)^(-1/xi-1).
// xi within 1e-9 of zero evaluates through the exponential branch. For
// xi < 0 the support is bounded at -phi/xi.
struct GPDFit {
    double xi = 0;
    double phi = 1;
    double loglik = 0;
    bool converged = true;

    static GPDFit from_params(double xi, double phi);
    double support_max() const;  // +infinity when xi >= 0
};

double gpd_pdf(const GPDFit& fit, double y);
double gpd_cdf(const GPDFit& fit, double y);
double gpd_cdf_inverse(const GPDFit& fit, double v);

double gpd_loglik(double xi, double phi, std::span<const double> y_sample);

// 2-D MLE via Nelder-Mead from several starts (one of them moment-based),
// verified against a local grid around the optimum.
GPDFit fit_gpd(std::span<const double> y_sample, const FitOptions& options = {});

}  // namespace tailhazard
