#pragma once

#include <span>

#include "tailhazard/marginals.hpp"

namespace tailhazard {

enum class CopulaFamily { Frank, AMH };

const char* family_name(CopulaFamily family);

// Probability-integral transforms of the fitted marginals (inference
// functions for margins): u_i = P(tau_i), v_i = G(y_i), clamped to
// [1e-9, 1-1e-9] so copula densities stay finite.
struct PseudoSample {
    std::vector<double> u;
    std::vector<double> v;

    std::size_t size() const { return u.size(); }
};

PseudoSample make_pseudo_sample(const RIFit& ri, const GPDFit& gpd,
                                std::span<const double> tau,
                                std::span<const double> y);

struct CopulaFit {
    CopulaFamily family = CopulaFamily::Frank;
    double theta = 0;
    double loglik = 0;
    double rmse = 0;
    double aic = 0;
    std::size_t n = 0;
    bool at_boundary = false;
    bool perfect_fit = false;  // zero RMSE: AIC reported as a guarded sentinel
};

// Frank:  C(u,v) = -(1/theta) ln[1 + (e^{-theta u}-1)(e^{-theta v}-1)/(e^{-theta}-1)]
// AMH:    C(u,v) = uv / (1 - theta (1-u)(1-v))
// Boundary identities C(u,0)=0, C(u,1)=u (and symmetric) hold exactly;
// |theta| < 1e-9 evaluates as the independence copula.
double copula_cdf(CopulaFamily family, double theta, double u, double v);
double copula_pdf(CopulaFamily family, double theta, double u, double v);
// Conditional CDF dC/du — the v-distribution given u, used for sampling.
double copula_conditional(CopulaFamily family, double theta, double u, double v);

double copula_loglik(CopulaFamily family, double theta, const PseudoSample& ps);

// MLE of theta: Frank over [-50,50] excluding (-1e-4,1e-4), AMH over
// [-1+1e-9, 1-1e-6]. Fills RMSE/AIC goodness-of-fit; boundary optima are
// flagged. Throws on degenerate pseudo-samples (all u or all v equal).
CopulaFit fit_copula(const PseudoSample& ps, CopulaFamily family,
                     const FitOptions& options = {});

struct GoodnessOfFit {
    double rmse = 0;
    double aic = 0;
    bool perfect = false;
};

// RMSE and AIC between the empirical joint CDF of the pseudo-sample and the
// fitted copula, with n-1 in the divisor and m = 1 copula parameter.
GoodnessOfFit goodness_of_fit(const PseudoSample& ps, const CopulaFit& fit);

// Fits both families and returns the one with smaller AIC; ties break by
// smaller RMSE, then Frank.
CopulaFit select_copula(const PseudoSample& ps, const FitOptions& options = {});

}  // namespace tailhazard
