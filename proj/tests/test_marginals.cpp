#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <cstdlib>
#include <random>

#include "oracles.hpp"
#include "tailhazard/marginals.hpp"
#include "tailhazard/synth.hpp"

using namespace tailhazard;

TEST_CASE("q-exponential collapses to the exponential at q=1") {
    // lambda = 1 means tau_mean = 1 at q = 1
    const RIFit fit = RIFit::from_params(RIFamily::QExponential, 1.0, 1.0);
    CHECK(fit.lambda == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ri_pdf(fit, 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ri_pdf(fit, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(ri_cdf(fit, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("Weibull pdf at the alpha=1 limit") {
    // alpha at the open edge of (0,1); beta = tau_mean / Gamma(1+1/alpha) = 2
    const double alpha = 1.0 - 1e-12;
    const RIFit fit = RIFit::from_params(RIFamily::Weibull, alpha, 2.0 * std::tgamma(1.0 + 1.0 / alpha));
    CHECK(fit.beta == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(ri_pdf(fit, 2.0) == doctest::Approx(std::exp(-1.0) / 2.0).epsilon(1e-9));
}

TEST_CASE("densities integrate to one") {
    const RIFit fits[] = {
        RIFit::from_params(RIFamily::StretchedExponential, 0.72, 9.606),
        RIFit::from_params(RIFamily::QExponential, 1.21, 9.606),
        RIFit::from_params(RIFamily::Weibull, 0.93, 9.606),
    };
    for (const RIFit& fit : fits) {
        const double mass = oracles::Quad::integrate(
            [&](double x) { return ri_pdf(fit, x); }, 0.0,
            std::numeric_limits<double>::infinity(), 14, 1e-10);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("cdf closed forms match quadrature of the pdf") {
    const RIFit se = RIFit::from_params(RIFamily::StretchedExponential, 0.72, 9.6);
    CHECK(ri_cdf(se, 50.0) ==
          doctest::Approx(oracles::ri_cdf_by_quadrature(se, 50.0)).epsilon(1e-8));

    const RIFit qe = RIFit::from_params(RIFamily::QExponential, 1.21, 9.6);
    CHECK(ri_cdf(qe, 5.0) ==
          doctest::Approx(oracles::ri_cdf_by_quadrature(qe, 5.0)).epsilon(1e-8));

    const RIFit w = RIFit::from_params(RIFamily::Weibull, 0.93, 9.6);
    CHECK(ri_cdf(w, 12.0) ==
          doctest::Approx(oracles::ri_cdf_by_quadrature(w, 12.0)).epsilon(1e-8));
}

TEST_CASE("cdf boundary, monotonicity and far-tail limit") {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> u01(0.05, 0.95);
    for (RIFamily family : {RIFamily::StretchedExponential, RIFamily::QExponential,
                            RIFamily::Weibull}) {
        const double shape = family == RIFamily::QExponential ? 0.6 + u01(gen) : u01(gen);
        const RIFit fit = RIFit::from_params(family, shape, 8.0);
        CHECK(ri_cdf(fit, 0.0) == 0.0);
        CHECK_THROWS_AS(ri_cdf(fit, -1.0), std::invalid_argument);
        double prev = 0.0;
        for (double tau = 0.5; tau < 100.0; tau += 0.5) {
            const double cur = ri_cdf(fit, tau);
            CHECK(cur >= prev);
            prev = cur;
        }
        CHECK(ri_cdf(fit, 1e8) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("finite-difference derivative of ri_cdf matches ri_pdf") {
    std::mt19937_64 gen(101);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const RIFit fits[] = {
        RIFit::from_params(RIFamily::StretchedExponential, 0.7, 10.0),
        RIFit::from_params(RIFamily::QExponential, 1.25, 10.0),
        RIFit::from_params(RIFamily::Weibull, 0.85, 10.0),
    };
    for (const RIFit& fit : fits) {
        for (int k = 0; k < 20; ++k) {
            const double tau = ri_cdf_inverse(fit, 0.05 + 0.9 * u01(gen));
            const double fd = oracles::derivative(
                [&](double x) { return ri_cdf(fit, x); }, tau, 1e-3 * std::max(tau, 1.0));
            CHECK(fd == doctest::Approx(ri_pdf(fit, tau)).epsilon(1e-5));
        }
    }
}

TEST_CASE("fit recovers generating shapes on synthetic samples") {
    const RIFit qe_truth = RIFit::from_params(RIFamily::QExponential, 1.2, 10.0);
    const std::vector<double> qe_sample = sample_ri(qe_truth, 5000, 2024);
    const RIFit qe_fit = fit_ri(qe_sample, RIFamily::QExponential);
    CHECK(qe_fit.shape == doctest::Approx(1.2).epsilon(0.03 / 1.2));

    const RIFit se_truth = RIFit::from_params(RIFamily::StretchedExponential, 0.7, 10.0);
    const RIFit se_fit = fit_ri(sample_ri(se_truth, 5000, 2025), RIFamily::StretchedExponential);
    CHECK(std::fabs(se_fit.shape - 0.7) < 0.05);

    const RIFit w_truth = RIFit::from_params(RIFamily::Weibull, 0.8, 10.0);
    const RIFit w_fit = fit_ri(sample_ri(w_truth, 5000, 2026), RIFamily::Weibull);
    CHECK(std::fabs(w_fit.shape - 0.8) < 0.05);
}

TEST_CASE("exponential data pushes the Weibull shape to its upper boundary") {
    const RIFit exp_like = RIFit::from_params(RIFamily::QExponential, 1.0, 10.0);
    const std::vector<double> sample = sample_ri(exp_like, 5000, 99);
    const RIFit fit = fit_ri(sample, RIFamily::Weibull);
    CHECK(fit.shape > 0.97);
    CHECK(fit.at_boundary);
}

TEST_CASE("fit errors: short and degenerate samples") {
    std::vector<double> tiny{1, 2, 3};
    CHECK_THROWS_AS(fit_ri(tiny, RIFamily::QExponential), std::invalid_argument);
    std::vector<double> flat(50, 4.0);
    CHECK_THROWS_AS(fit_ri(flat, RIFamily::QExponential), std::invalid_argument);
    std::vector<double> negative(50, 1.0);
    negative[7] = -2.0;
    CHECK_THROWS_AS(fit_ri(negative, RIFamily::Weibull), std::invalid_argument);
}

TEST_CASE("fitted loglik beats 100 random feasible shapes") {
    const RIFit truth = RIFit::from_params(RIFamily::QExponential, 1.15, 9.0);
    const std::vector<double> sample = sample_ri(truth, 1500, 7);
    std::mt19937_64 gen(8);
    for (RIFamily family : {RIFamily::StretchedExponential, RIFamily::QExponential,
                            RIFamily::Weibull}) {
        const RIFit fit = fit_ri(sample, family);
        const double hi = family == RIFamily::QExponential ? 1.5 - 1e-6 : 1.0 - 1e-6;
        std::uniform_real_distribution<double> shapes(1e-6, hi);
        for (int k = 0; k < 100; ++k) {
            const double candidate =
                ri_loglik(family, shapes(gen), fit.tau_mean, sample);
            CHECK(fit.loglik >= candidate - 1e-9);
        }
    }
}

TEST_CASE("line search lands within 1e-6 of the exhaustive grid") {
    // smoke version of the optimizer-fidelity acceptance criterion
    std::mt19937_64 gen(55);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    for (RIFamily family : {RIFamily::StretchedExponential, RIFamily::QExponential,
                            RIFamily::Weibull}) {
        for (int rep = 0; rep < 2; ++rep) {
            const double shape = family == RIFamily::QExponential
                                     ? 1.05 + 0.3 * jitter(gen)
                                     : 0.55 + 0.35 * jitter(gen);
            const RIFit truth = RIFit::from_params(family, shape, 10.0);
            const std::vector<double> sample =
                sample_ri(truth, 80, 1000 + rep + 10 * static_cast<int>(family));
            const RIFit golden = fit_ri(sample, family);
            FitOptions grid_options;
            grid_options.exact_grid = true;
            const RIFit grid = fit_ri(sample, family, grid_options);
            CHECK(std::fabs(golden.shape - grid.shape) <= 1e-6);
        }
    }
}

TEST_CASE("likelihood ordering on q-exponential data") {
    int qe_wins = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const RIFit truth = RIFit::from_params(RIFamily::QExponential, 1.2, 10.0);
        const std::vector<double> sample = sample_ri(truth, 2000, 400 + trial);
        const double ll_qe = fit_ri(sample, RIFamily::QExponential).loglik;
        const double ll_se = fit_ri(sample, RIFamily::StretchedExponential).loglik;
        const double ll_w = fit_ri(sample, RIFamily::Weibull).loglik;
        if (ll_qe >= ll_se && ll_qe >= ll_w) ++qe_wins;
    }
    CHECK(qe_wins >= 18);
}

// --- GPD -------------------------------------------------------------------

TEST_CASE("gpd exponential branch and boundaries") {
    const GPDFit exp_fit = GPDFit::from_params(0.0, 1.0);
    CHECK(gpd_cdf(exp_fit, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gpd_cdf(exp_fit, 0.0) == 0.0);
    CHECK(gpd_pdf(exp_fit, 0.0) == doctest::Approx(1.0).epsilon(1e-12));

    const GPDFit heavy = GPDFit::from_params(0.11, 0.01);
    CHECK(gpd_cdf(heavy, 0.0) == 0.0);
    CHECK_THROWS_AS(gpd_cdf(heavy, -0.1), std::domain_error);

    const GPDFit bounded = GPDFit::from_params(-0.5, 1.0);
    CHECK(bounded.support_max() == doctest::Approx(2.0));
    CHECK(gpd_cdf(bounded, 2.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(gpd_cdf(bounded, 2.5), std::domain_error);
    CHECK_THROWS_AS(GPDFit::from_params(0.1, -1.0), std::invalid_argument);
}

TEST_CASE("gpd cdf matches quadrature at the whole-sample fit scale") {
    const GPDFit fit = GPDFit::from_params(0.11, 0.01);
    for (double y : {0.005, 0.02, 0.05}) {
        CHECK(gpd_cdf(fit, y) ==
              doctest::Approx(oracles::gpd_cdf_by_quadrature(fit, y)).epsilon(1e-8));
    }
}

TEST_CASE("gpd finite-difference pdf consistency") {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> u01(0.05, 0.95);
    const GPDFit fits[] = {GPDFit::from_params(0.2, 0.015), GPDFit::from_params(0.0, 0.01),
                           GPDFit::from_params(-0.2, 0.02)};
    for (const GPDFit& fit : fits) {
        for (int k = 0; k < 20; ++k) {
            const double y = gpd_cdf_inverse(fit, u01(gen));
            const double fd = oracles::derivative(
                [&](double x) { return gpd_cdf(fit, x); }, y, 1e-4 * std::max(y, 0.01));
            CHECK(fd == doctest::Approx(gpd_pdf(fit, y)).epsilon(1e-5));
        }
    }
}

TEST_CASE("gpd MLE recovers synthetic parameters within 10%") {
    const GPDFit truth = GPDFit::from_params(0.2, 0.015);
    const GPDFit fit = fit_gpd(sample_gpd(truth, 5000, 31330));
    CHECK(std::fabs(fit.xi - 0.2) / 0.2 < 0.10);
    CHECK(std::fabs(fit.phi - 0.015) / 0.015 < 0.10);
}

TEST_CASE("gpd MLE on exponential data keeps xi near zero") {
    const GPDFit truth = GPDFit::from_params(0.0, 0.01);
    const GPDFit fit = fit_gpd(sample_gpd(truth, 5000, 4242));
    CHECK(std::fabs(fit.xi) < 0.05);
}

TEST_CASE("gpd fit input validation") {
    std::vector<double> tiny{0.1, 0.2};
    CHECK_THROWS_AS(fit_gpd(tiny), std::invalid_argument);
    std::vector<double> with_negative(50, 0.01);
    with_negative[3] = -0.5;
    CHECK_THROWS_AS(fit_gpd(with_negative), std::invalid_argument);
}

TEST_CASE("conditional: whole-sample fits on user-supplied SSEC data") {
    const char* path = std::getenv("TAILHAZARD_SSEC_CSV");
    if (path == nullptr) {
        MESSAGE("TAILHAZARD_SSEC_CSV not set; skipping data-conditional checks");
        return;
    }
    const ReturnSeries r = to_returns(load_price_series(path));
    const double thr = quantile(r, 0.9);
    const EventSeries ev = extract_events(r, {0.9, Side::Positive}, thr);
    CHECK(ev.count() == 434);
    std::vector<double> tau(ev.tau.begin(), ev.tau.end());
    CHECK(describe(tau).mean == doctest::Approx(9.606).epsilon(0.01));
    CHECK(describe(ev.y).mean == doctest::Approx(0.011).epsilon(0.1));
    const RIFit qe = fit_ri(tau, RIFamily::QExponential);
    CHECK(qe.shape == doctest::Approx(1.21).epsilon(0.02));
    CHECK(qe.loglik == doctest::Approx(-1392.3).epsilon(0.005));
    const RIFit se = fit_ri(tau, RIFamily::StretchedExponential);
    const RIFit w = fit_ri(tau, RIFamily::Weibull);
    CHECK(qe.loglik > se.loglik);
    CHECK(se.loglik > w.loglik);
}
