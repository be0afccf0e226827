// Acceptance suite: each criterion prints exactly one [PASS]/[FAIL]/[SKIP]
// line; the process exits non-zero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tailhazard/backtest.hpp"
#include "tailhazard/synth.hpp"

using namespace tailhazard;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %d. %s (%s)\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void report_skip(int number, const std::string& name, const std::string& why) {
    std::printf("[SKIP] %d. %s (%s)\n", number, name.c_str(), why.c_str());
    std::fflush(stdout);
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. closed-form W_y equals 2-D quadrature of the conditional double integral
// ---------------------------------------------------------------------------
void criterion_1() {
    Timer timer;
    std::mt19937_64 gen(20240901);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0;
    for (CopulaFamily family : {CopulaFamily::Frank, CopulaFamily::AMH}) {
        for (int k = 0; k < 50; ++k) {
            HazardModel m;
            m.ri = RIFit::from_params(RIFamily::QExponential, 0.85 + 0.5 * u01(gen), 10.0);
            m.gpd = GPDFit::from_params(-0.2 + 0.5 * u01(gen), 0.01);
            m.cop.family = family;
            m.cop.theta = family == CopulaFamily::Frank ? -8.0 + 16.0 * u01(gen)
                                                        : -0.95 + 1.85 * u01(gen);
            if (std::fabs(m.cop.theta) < 1e-3) m.cop.theta = 1e-3;
            HazardQuery q;
            q.t = 25.0 * u01(gen);
            q.dt = 0.5 + 4.5 * u01(gen);
            q.y_last = std::min(0.002 + 0.08 * u01(gen), 0.9 * m.gpd.support_max());
            const double closed = hazard_joint(m, q);
            const double quad = oracles::hazard_joint_by_quadrature(m, q);
            worst = std::max(worst, std::fabs(closed - quad));
        }
    }
    const double elapsed = timer.seconds();
    report(1, "W_y closed form vs 2-D quadrature, 50 tuples per copula family",
           worst <= 1e-6 && elapsed < 60.0,
           "max |diff| " + fmt(worst) + ", " + fmt(elapsed) + " s (< 60 s)");
}

// ---------------------------------------------------------------------------
// 2. reduction identities: theta = 0 and v = 1 both collapse W_y onto W
// ---------------------------------------------------------------------------
void criterion_2() {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
        HazardModel m;
        m.ri = RIFit::from_params(RIFamily::QExponential, 1.21, 9.606);
        m.gpd = GPDFit::from_params(0.11, 0.01);
        m.cop.family = k % 2 == 0 ? CopulaFamily::Frank : CopulaFamily::AMH;
        m.cop.theta = 0.0;
        const HazardQuery q{30.0 * u01(gen), 0.1 + 5.0 * u01(gen), 0.001 + 0.05 * u01(gen)};
        worst = std::max(worst, std::fabs(hazard_joint(m, q) - hazard_ri(m.ri, q)));

        HazardModel mv = m;
        mv.cop.theta = mv.cop.family == CopulaFamily::Frank ? -1.545 : -0.778;
        const HazardQuery qv{30.0 * u01(gen), 0.1 + 5.0 * u01(gen), 1e12};  // v = 1
        worst = std::max(worst, std::fabs(hazard_joint(mv, qv) - hazard_ri(mv.ri, qv)));
    }
    report(2, "reduction identities (theta=0 and v=1), 100 random queries each",
           worst <= 1e-10, "max |W_y - W| " + fmt(worst));
}

// ---------------------------------------------------------------------------
// 3. parameter recovery at n=5000 over 20 seeded trials per model
// ---------------------------------------------------------------------------
void criterion_3() {
    Timer timer;
    const std::size_t n = 5000;
    std::ostringstream detail;
    bool pass = true;

    auto tally = [&](const char* label, const std::function<bool(std::uint64_t)>& trial) {
        int ok = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) ok += trial(seed);
        detail << label << " " << ok << "/20 ";
        if (ok < 18) pass = false;
    };

    tally("qE", [&](std::uint64_t seed) {
        const RIFit truth = RIFit::from_params(RIFamily::QExponential, 1.2, 10.0);
        const RIFit fit = fit_ri(sample_ri(truth, n, seed), RIFamily::QExponential);
        return std::fabs(fit.shape - 1.2) <= 0.03;
    });
    tally("SE", [&](std::uint64_t seed) {
        const RIFit truth = RIFit::from_params(RIFamily::StretchedExponential, 0.7, 10.0);
        const RIFit fit =
            fit_ri(sample_ri(truth, n, 100 + seed), RIFamily::StretchedExponential);
        return std::fabs(fit.shape - 0.7) <= 0.05;
    });
    tally("W", [&](std::uint64_t seed) {
        const RIFit truth = RIFit::from_params(RIFamily::Weibull, 0.8, 10.0);
        const RIFit fit = fit_ri(sample_ri(truth, n, 200 + seed), RIFamily::Weibull);
        return std::fabs(fit.shape - 0.8) <= 0.05;
    });
    tally("GPD", [&](std::uint64_t seed) {
        const GPDFit truth = GPDFit::from_params(0.4, 0.015);
        const GPDFit fit = fit_gpd(sample_gpd(truth, n, 300 + seed));
        return std::fabs(fit.xi - 0.4) / 0.4 <= 0.10 &&
               std::fabs(fit.phi - 0.015) / 0.015 <= 0.10;
    });
    tally("Frank", [&](std::uint64_t seed) {
        const UVSample s = sample_copula(CopulaFamily::Frank, -1.5, n, 550 + seed);
        PseudoSample ps;
        ps.u = s.u;
        ps.v = s.v;
        return std::fabs(fit_copula(ps, CopulaFamily::Frank).theta + 1.5) <= 0.15;
    });
    tally("AMH", [&](std::uint64_t seed) {
        const UVSample s = sample_copula(CopulaFamily::AMH, -0.9, n, 900 + seed);
        PseudoSample ps;
        ps.u = s.u;
        ps.v = s.v;
        return std::fabs(fit_copula(ps, CopulaFamily::AMH).theta + 0.9) <= 0.1;
    });

    const double elapsed = timer.seconds();
    detail << fmt(elapsed) << " s (< 300 s)";
    report(3, "parameter recovery, 20 seeded trials per model, >= 18 within tolerance",
           pass && elapsed < 300.0, detail.str());
}

// ---------------------------------------------------------------------------
// 4. line search equals the exhaustive 1e-6 grid on 5 samples per family
// ---------------------------------------------------------------------------
void criterion_4() {
    Timer timer;
    double worst = 0;
    std::mt19937_64 gen(1234);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (RIFamily family : {RIFamily::StretchedExponential, RIFamily::QExponential,
                            RIFamily::Weibull}) {
        for (int rep = 0; rep < 5; ++rep) {
            const double shape = family == RIFamily::QExponential ? 1.05 + 0.3 * u01(gen)
                                                                  : 0.55 + 0.35 * u01(gen);
            const RIFit truth = RIFit::from_params(family, shape, 10.0);
            const std::vector<double> sample =
                sample_ri(truth, 100, 9000 + rep + 100 * static_cast<int>(family));
            const RIFit golden = fit_ri(sample, family);
            FitOptions grid;
            grid.exact_grid = true;
            const RIFit exact = fit_ri(sample, family, grid);
            worst = std::max(worst, std::fabs(golden.shape - exact.shape));
        }
    }
    report(4, "golden-section vs exhaustive 1e-6 grid, 5 samples per family",
           worst <= 1e-6, "max |shape diff| " + fmt(worst) + ", " + fmt(timer.seconds()) + " s");
}

// ---------------------------------------------------------------------------
// 5. cdf/pdf consistency and unit mass for every fitted model
// ---------------------------------------------------------------------------
void criterion_5() {
    std::mt19937_64 gen(31415);
    std::uniform_real_distribution<double> u01(0.05, 0.95);
    double worst_rel = 0, worst_mass = 0;

    const RIFit ri_fits[] = {
        RIFit::from_params(RIFamily::StretchedExponential, 0.72, 9.606),
        RIFit::from_params(RIFamily::QExponential, 1.21, 9.606),
        RIFit::from_params(RIFamily::Weibull, 0.93, 9.606),
    };
    for (const RIFit& fit : ri_fits) {
        for (int k = 0; k < 20; ++k) {
            const double tau = ri_cdf_inverse(fit, u01(gen));
            const double fd = oracles::derivative(
                [&](double x) { return ri_cdf(fit, x); }, tau, 1e-3 * std::max(tau, 1.0));
            const double pdf = ri_pdf(fit, tau);
            worst_rel = std::max(worst_rel, std::fabs(fd - pdf) / pdf);
        }
        const double mass = oracles::Quad::integrate(
            [&](double x) { return ri_pdf(fit, x); }, 0.0,
            std::numeric_limits<double>::infinity(), 14, 1e-10);
        worst_mass = std::max(worst_mass, std::fabs(mass - 1.0));
    }

    const GPDFit gpd_fits[] = {GPDFit::from_params(0.11, 0.01),
                               GPDFit::from_params(-0.2, 0.02)};
    for (const GPDFit& fit : gpd_fits) {
        for (int k = 0; k < 20; ++k) {
            const double y = gpd_cdf_inverse(fit, u01(gen));
            const double fd = oracles::derivative(
                [&](double x) { return gpd_cdf(fit, x); }, y, 1e-4 * std::max(y, 0.01));
            const double pdf = gpd_pdf(fit, y);
            worst_rel = std::max(worst_rel, std::fabs(fd - pdf) / pdf);
        }
        const double mass = oracles::Quad::integrate(
            [&](double x) { return gpd_pdf(fit, x); }, 0.0,
            fit.xi < 0 ? fit.support_max() : std::numeric_limits<double>::infinity(), 14,
            1e-10);
        worst_mass = std::max(worst_mass, std::fabs(mass - 1.0));
    }

    worst_mass = std::max(
        worst_mass, std::fabs(oracles::copula_cdf_by_quadrature(
                                  CopulaFamily::Frank, -1.545, 1 - 1e-12, 1 - 1e-12) -
                              1.0));
    worst_mass = std::max(
        worst_mass, std::fabs(oracles::copula_cdf_by_quadrature(
                                  CopulaFamily::AMH, -0.778, 1 - 1e-12, 1 - 1e-12) -
                              1.0));

    report(5, "finite-difference cdf/pdf consistency and unit total mass",
           worst_rel <= 1e-5 && worst_mass <= 1e-6,
           "max rel pdf diff " + fmt(worst_rel) + ", max mass error " + fmt(worst_mass));
}

// ---------------------------------------------------------------------------
// 6. ROC machinery floors and ceilings
// ---------------------------------------------------------------------------
void criterion_6() {
    std::mt19937_64 gen(5150);
    std::vector<double> perfect, constant;
    std::vector<unsigned char> truth;
    for (int i = 0; i < 2000; ++i) {
        const bool ex = gen() % 9 == 0;
        truth.push_back(ex);
        perfect.push_back(ex ? 1.0 : 0.0);
        constant.push_back(0.42);
    }
    const std::vector<double> grid = BacktestConfig::default_qp_grid();
    const double auc_perfect = sweep_roc(perfect, truth, grid).auc_m;
    const double auc_constant = sweep_roc(constant, truth, grid).auc_m;
    report(6, "ROC: perfect predictor AUC_m = 0.3, constant predictor = 0.045 +/- 0.005",
           auc_perfect == 0.3 && std::fabs(auc_constant - 0.045) <= 0.005,
           "perfect " + fmt(auc_perfect) + ", constant " + fmt(auc_constant));
}

// ---------------------------------------------------------------------------
// 7. end-to-end synthetic backtest: W_y beats W out of sample
// ---------------------------------------------------------------------------
void criterion_7() {
    Timer timer;
    int wy_wins = 0, usable = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        GeneratorSpec spec;
        spec.ri = RIFit::from_params(RIFamily::QExponential, 1.25, 10.0);
        spec.gpd = GPDFit::from_params(0.15, 0.01);
        spec.copula_family = CopulaFamily::Frank;
        spec.theta = -1.5;
        spec.n = 500;  // ~5000 days at tau_Q = 10
        spec.seed = seed;
        // Start pairing couples each event's size with the interval that
        // follows it, which is the dependence W_y conditions on.
        spec.pairing = Pairing::Start;
        const ReturnSeries r = embed_in_returns(sample_event_process(spec), seed + 50);

        BacktestConfig cfg;
        cfg.quantiles = {ExtremeSpec{0.9, Side::Positive}};
        cfg.copula_choice = CopulaChoice::Frank;
        cfg.pairing = Pairing::Start;
        cfg.threads = 1;
        const BacktestRun run = run_backtest(r, cfg).runs.front();
        if (std::isnan(run.roc_w_out.auc_m) || std::isnan(run.roc_wy_out.auc_m)) continue;
        ++usable;
        wy_wins += run.roc_wy_out.auc_m > run.roc_w_out.auc_m;
    }
    const double elapsed = timer.seconds();
    report(7, "synthetic stream: out-of-sample AUC_m of W_y exceeds W in >= 7/10 seeds",
           wy_wins >= 7 && usable == 10 && elapsed < 600.0,
           std::to_string(wy_wins) + "/10 wins, " + fmt(elapsed) + " s (< 600 s)");
}

// ---------------------------------------------------------------------------
// 8. conditional: DJIA reproduction of the whole-sample calibration table
// ---------------------------------------------------------------------------
void criterion_8() {
    const char* path = std::getenv("TAILHAZARD_DJIA_CSV");
    if (path == nullptr) {
        report_skip(8, "DJIA whole-sample fits and backtest scores",
                    "conditional on user data: set TAILHAZARD_DJIA_CSV to run");
        return;
    }
    Timer timer;
    std::ostringstream detail;
    bool pass = true;

    const ReturnSeries r = to_returns(load_price_series(path));
    {
        const ExtremeSpec spec{0.9, Side::Positive};
        const EventSeries ev = extract_events(r, spec, quantile(r, 0.9));
        std::vector<double> tau(ev.tau.begin(), ev.tau.end());
        const RIFit qe = fit_ri(tau, RIFamily::QExponential);
        const GPDFit gpd = fit_gpd(ev.y);
        detail << "q=" << fmt(qe.shape) << " xi=" << fmt(gpd.xi) << " ";
        pass &= std::fabs(qe.shape - 1.25) <= 0.02;
        pass &= std::fabs(gpd.xi - 0.26) <= 0.05;

        const TauYPairs pairs = paired_samples(ev, Pairing::End);
        const PseudoSample ps = make_pseudo_sample(qe, gpd, pairs.tau, pairs.y);
        const CopulaFit best = select_copula(ps);
        detail << "sel90=" << family_name(best.family) << " ";
        pass &= best.family == CopulaFamily::Frank;
    }
    {
        const ExtremeSpec spec{0.1, Side::Negative};
        const EventSeries ev = extract_events(r, spec, quantile(r, 0.1));
        std::vector<double> tau(ev.tau.begin(), ev.tau.end());
        const RIFit qe = fit_ri(tau, RIFamily::QExponential);
        const GPDFit gpd = fit_gpd(ev.y);
        const TauYPairs pairs = paired_samples(ev, Pairing::End);
        const PseudoSample ps = make_pseudo_sample(qe, gpd, pairs.tau, pairs.y);
        const CopulaFit best = select_copula(ps);
        detail << "sel10=" << family_name(best.family) << " ";
        pass &= best.family == CopulaFamily::AMH;
    }
    {
        BacktestConfig cfg;
        cfg.quantiles = {ExtremeSpec{0.9, Side::Positive}, ExtremeSpec{0.1, Side::Negative}};
        cfg.copula_choice = CopulaChoice::Frank;
        const BacktestReport report_bt = run_backtest(r, cfg);
        const double auc_ri_90 = report_bt.runs[0].roc_w_out.auc_m;
        const double auc_frank_90 = report_bt.runs[0].roc_wy_out.auc_m;
        const double auc_ri_10 = report_bt.runs[1].roc_w_out.auc_m;
        const double auc_frank_10 = report_bt.runs[1].roc_wy_out.auc_m;
        detail << "AUC(RI,90)=" << fmt(auc_ri_90) << " AUC(F,90)=" << fmt(auc_frank_90)
               << " AUC(RI,10)=" << fmt(auc_ri_10) << " AUC(F,10)=" << fmt(auc_frank_10)
               << " ";
        pass &= std::fabs(auc_ri_90 - 0.059) <= 0.03;
        pass &= std::fabs(auc_frank_90 - 0.067) <= 0.03;
        pass &= std::fabs(auc_ri_10 - 0.082) <= 0.03;
        pass &= std::fabs(auc_frank_10 - 0.091) <= 0.03;
    }
    detail << fmt(timer.seconds()) << " s";
    report(8, "DJIA whole-sample fits and backtest scores", pass, detail.str());
}

// ---------------------------------------------------------------------------
// 9. anti-lookahead audit: truncated reruns reproduce stored hazards
// ---------------------------------------------------------------------------
void criterion_9() {
    GeneratorSpec spec;
    spec.ri = RIFit::from_params(RIFamily::QExponential, 1.2, 10.0);
    spec.gpd = GPDFit::from_params(0.15, 0.01);
    spec.copula_family = CopulaFamily::Frank;
    spec.theta = -1.5;
    spec.n = 120;  // ~1200 days
    spec.seed = 314;
    const ReturnSeries r = embed_in_returns(sample_event_process(spec), 2718);

    BacktestConfig cfg;
    cfg.quantiles = {ExtremeSpec{0.9, Side::Positive}};
    cfg.copula_choice = CopulaChoice::Frank;
    cfg.refit_every = 1;
    cfg.threads = 1;
    const BacktestRun run = run_backtest(r, cfg).runs.front();

    std::mt19937_64 gen(161803);
    int identical = 0;
    for (int rep = 0; rep < 20; ++rep) {
        const DayRecord& rec = run.out_of_sample[gen() % run.out_of_sample.size()];
        ReturnSeries trunc;
        trunc.dates.assign(r.dates.begin(), r.dates.begin() + rec.index + 1);
        trunc.returns.assign(r.returns.begin(), r.returns.begin() + rec.index + 1);
        BacktestConfig tcfg = cfg;
        tcfg.split =
            static_cast<double>(run.oos_start) / static_cast<double>(rec.index + 1);
        const DayRecord& last =
            run_backtest(trunc, tcfg).runs.front().out_of_sample.back();
        identical += last.index == rec.index && last.W == rec.W && last.Wy == rec.Wy &&
                     last.t == rec.t && last.y_last == rec.y_last;
    }
    report(9, "anti-lookahead audit: 20 truncated reruns bit-identical", identical == 20,
           std::to_string(identical) + "/20 identical");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
