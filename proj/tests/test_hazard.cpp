#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "oracles.hpp"
#include "tailhazard/hazard.hpp"

using namespace tailhazard;

namespace {

HazardModel paper_like_model(CopulaFamily family, double theta) {
    HazardModel m;
    m.ri = RIFit::from_params(RIFamily::QExponential, 1.21, 9.606);
    m.gpd = GPDFit::from_params(0.11, 0.01);
    m.cop.family = family;
    m.cop.theta = theta;
    return m;
}

}  // namespace

TEST_CASE("exponential recurrence intervals make the hazard memoryless") {
    const RIFit exp_fit = RIFit::from_params(RIFamily::QExponential, 1.0, 10.0);
    const double lambda = exp_fit.lambda;
    const double expected = 1.0 - std::exp(-lambda * 1.0);
    for (double t : {0.0, 1.0, 5.0, 20.0, 80.0}) {
        CHECK(hazard_ri(exp_fit, {t, 1.0, 0.0}) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("hazard reaches certainty as dt grows") {
    const RIFit fit = RIFit::from_params(RIFamily::QExponential, 1.21, 9.606);
    CHECK(hazard_ri(fit, {5.0, 1e9, 0.0}) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hazard_ri matches direct quadrature of the defining integral") {
    const RIFit fit = RIFit::from_params(RIFamily::QExponential, 1.21, 9.606);
    const double numerator = oracles::integrate(
        [&](double x) { return ri_pdf(fit, x); }, 5.0, 6.0);
    const double denominator = oracles::Quad::integrate(
        [&](double x) { return ri_pdf(fit, x); }, 5.0,
        std::numeric_limits<double>::infinity(), 14, 1e-12);
    CHECK(hazard_ri(fit, {5.0, 1.0, 0.0}) ==
          doctest::Approx(numerator / denominator).epsilon(1e-8));
}

TEST_CASE("degenerate survival returns 1 with a flag") {
    // q < 1 bounds the support; far beyond it nothing survives
    const RIFit bounded = RIFit::from_params(RIFamily::QExponential, 0.5, 5.0);
    HazardFlags flags;
    CHECK(hazard_ri(bounded, {1e6, 1.0, 0.0}, &flags) == 1.0);
    CHECK(flags.survival_degenerate);
}

TEST_CASE("query validation") {
    const RIFit fit = RIFit::from_params(RIFamily::Weibull, 0.9, 10.0);
    CHECK_THROWS_AS(hazard_ri(fit, {-1.0, 1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(hazard_ri(fit, {1.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("closed-form joint hazard equals 2-D quadrature at paper-scale parameters") {
    const HazardModel m = paper_like_model(CopulaFamily::Frank, -1.545);
    const HazardQuery q{5.0, 1.0, 0.02};
    CHECK(hazard_joint(m, q) ==
          doctest::Approx(oracles::hazard_joint_by_quadrature(m, q)).epsilon(1e-6));
}

TEST_CASE("joint hazard reduces to W at v=1 and theta=0") {
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> t_draw(0.0, 30.0);
    std::uniform_real_distribution<double> dt_draw(0.5, 5.0);
    for (int k = 0; k < 50; ++k) {
        const HazardQuery q{t_draw(gen), dt_draw(gen), 1e9};  // v clamps to 1
        HazardModel m = paper_like_model(CopulaFamily::Frank, -1.545);
        const double w = hazard_ri(m.ri, q);
        CHECK(std::fabs(hazard_joint(m, q) - w) <= 1e-10);

        HazardModel indep = paper_like_model(CopulaFamily::AMH, 0.0);
        const HazardQuery q2{t_draw(gen), dt_draw(gen), 0.015};
        CHECK(std::fabs(hazard_joint(indep, q2) - hazard_ri(indep.ri, q2)) <= 1e-10);
    }
}

TEST_CASE("y_last at the lower support falls back to W with a flag") {
    const HazardModel m = paper_like_model(CopulaFamily::Frank, -1.545);
    HazardFlags flags;
    const HazardQuery q{3.0, 1.0, 0.0};
    CHECK(hazard_joint(m, q, &flags) == doctest::Approx(hazard_ri(m.ri, q)));
    CHECK(flags.v_degenerate);
}

TEST_CASE("both hazards are monotone in dt and bounded") {
    const HazardModel m = paper_like_model(CopulaFamily::AMH, -0.778);
    double prev_w = 0, prev_wy = 0;
    for (double dt = 0.5; dt <= 40.0; dt += 0.5) {
        const HazardQuery q{4.0, dt, 0.02};
        const double w = hazard_ri(m.ri, q);
        const double wy = hazard_joint(m, q);
        CHECK(w >= prev_w);
        CHECK(wy >= prev_wy);
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
        CHECK(wy >= 0.0);
        CHECK(wy <= 1.0);
        prev_w = w;
        prev_wy = wy;
    }
}

TEST_CASE("hazard chain rule over consecutive horizons") {
    const RIFit fit = RIFit::from_params(RIFamily::QExponential, 1.21, 9.606);
    std::mt19937_64 gen(4242);
    std::uniform_real_distribution<double> draw(0.2, 12.0);
    for (int k = 0; k < 40; ++k) {
        const double t = draw(gen);
        const double d1 = draw(gen) * 0.3;
        const double d2 = draw(gen) * 0.3;
        const double whole = hazard_ri(fit, {t, d1 + d2, 0.0});
        const double w1 = hazard_ri(fit, {t, d1, 0.0});
        const double w2 = hazard_ri(fit, {t + d1, d2, 0.0});
        CHECK(std::fabs(whole - (w1 + (1.0 - w1) * w2)) <= 1e-10);
    }

    // same identity for W_y at fixed v
    const HazardModel m = paper_like_model(CopulaFamily::Frank, -1.545);
    for (int k = 0; k < 40; ++k) {
        const double t = draw(gen);
        const double d1 = draw(gen) * 0.3;
        const double d2 = draw(gen) * 0.3;
        const double y = 0.02;
        const double whole = hazard_joint(m, {t, d1 + d2, y});
        const double w1 = hazard_joint(m, {t, d1, y});
        const double w2 = hazard_joint(m, {t + d1, d2, y});
        CHECK(std::fabs(whole - (w1 + (1.0 - w1) * w2)) <= 1e-10);
    }
}

TEST_CASE("fat-tailed fits cluster: imminent risk decays with quiet time") {
    const RIFit fat = RIFit::from_params(RIFamily::QExponential, 1.21, 9.606);
    double prev = 1.0;
    for (int k = 1; k <= 20; ++k) {
        const double t = 2.0 * k;
        const double w = hazard_ri(fat, {t, 1.0, 0.0});
        CHECK(w <= prev + 1e-12);
        prev = w;
    }
}

TEST_CASE("negative dependence raises imminent risk after large extremes") {
    for (CopulaFamily family : {CopulaFamily::Frank, CopulaFamily::AMH}) {
        const HazardModel m =
            paper_like_model(family, family == CopulaFamily::Frank ? -1.545 : -0.778);
        for (double t : {1.0, 3.0, 8.0, 15.0}) {
            double prev = 0.0;
            bool first = true;
            for (double y : {0.001, 0.005, 0.01, 0.02, 0.04, 0.08}) {
                const double wy = hazard_joint(m, {t, 1.0, y});
                if (!first) CHECK(wy >= prev - 1e-12);
                prev = wy;
                first = false;
            }
        }
    }
}
