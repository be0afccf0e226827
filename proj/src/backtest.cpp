#include "tailhazard/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

namespace tailhazard {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

void BacktestConfig::validate() const {
    if (!(split > 0.0 && split < 1.0)) {
        throw std::invalid_argument("backtest config: split must be in (0,1)");
    }
    if (dt < 1) throw std::invalid_argument("backtest config: dt must be >= 1");
    if (refit_every < 1) {
        throw std::invalid_argument("backtest config: refit_every must be >= 1");
    }
    if (quantiles.empty()) {
        throw std::invalid_argument("backtest config: no quantile specs");
    }
    for (const ExtremeSpec& spec : quantiles) spec.validate();
    if (min_intervals < 2) {
        throw std::invalid_argument("backtest config: min_intervals must be >= 2");
    }
    if (!qp_grid.empty()) {
        if (!std::is_sorted(qp_grid.begin(), qp_grid.end()) || qp_grid.front() != 0.0 ||
            qp_grid.back() != 1.0) {
            throw std::invalid_argument(
                "backtest config: qp_grid must be ascending and span [0,1]");
        }
    }
}

std::vector<double> BacktestConfig::default_qp_grid() {
    std::vector<double> grid(201);
    for (int k = 0; k <= 200; ++k) grid[k] = static_cast<double>(k) / 200.0;
    return grid;
}

double ConfusionCounts::false_alarm_rate() const {
    const std::size_t denom = n00 + n10;
    if (denom == 0) return kNaN;
    return static_cast<double>(n10) / static_cast<double>(denom);
}

double ConfusionCounts::correct_prediction_rate() const {
    const std::size_t denom = n01 + n11;
    if (denom == 0) return kNaN;
    return static_cast<double>(n11) / static_cast<double>(denom);
}

ConfusionCounts confusion(std::span<const double> hazard,
                          std::span<const unsigned char> is_extreme, double qp) {
    if (hazard.size() != is_extreme.size()) {
        throw std::invalid_argument("confusion: hazard/truth length mismatch");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < hazard.size(); ++i) {
        const bool alarm = hazard[i] >= qp;
        const bool extreme = is_extreme[i] != 0;
        if (alarm && extreme) ++c.n11;
        else if (alarm) ++c.n10;
        else if (extreme) ++c.n01;
        else ++c.n00;
    }
    return c;
}

RocCurve roc(std::span<const ConfusionCounts> counts, std::span<const double> qp) {
    if (counts.size() != qp.size()) {
        throw std::invalid_argument("roc: counts/qp length mismatch");
    }
    if (counts.size() < 2) {
        throw std::invalid_argument("roc: need at least 2 points");
    }

    RocCurve curve;
    curve.points.reserve(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        RocPoint p;
        p.qp = qp[i];
        p.A = counts[i].false_alarm_rate();
        p.D = counts[i].correct_prediction_rate();
        if (std::isnan(p.A) || std::isnan(p.D)) curve.degenerate = true;
        curve.points.push_back(p);
    }
    std::sort(curve.points.begin(), curve.points.end(), [](const RocPoint& a, const RocPoint& b) {
        if (a.A != b.A) return a.A < b.A;
        if (a.D != b.D) return a.D < b.D;
        return a.qp > b.qp;
    });
    if (curve.degenerate) {
        curve.auc_m = kNaN;
        return curve;
    }

    // collapse to distinct A values, keeping the D span of each vertical run
    struct Group {
        double A, d_min, d_max;
    };
    std::vector<Group> groups;
    for (const RocPoint& p : curve.points) {
        if (!groups.empty() && groups.back().A == p.A) {
            groups.back().d_max = p.D;
        } else {
            groups.push_back({p.A, p.D, p.D});
        }
    }

    constexpr double kLimit = 0.3;
    double area = 0;
    if (groups.front().A > 0.0) {
        area += std::min(groups.front().A, kLimit) * groups.front().d_min;
    }
    for (std::size_t i = 0; i + 1 < groups.size(); ++i) {
        const double a0 = groups[i].A;
        const double a1 = groups[i + 1].A;
        if (a0 >= kLimit) break;
        const double d0 = groups[i].d_max;
        const double d1 = groups[i + 1].d_min;
        const double hi = std::min(a1, kLimit);
        const double d_hi = a1 == a0 ? d1 : d0 + (d1 - d0) * (hi - a0) / (a1 - a0);
        area += 0.5 * (d0 + d_hi) * (hi - a0);
    }
    if (groups.back().A < kLimit) {
        area += (kLimit - groups.back().A) * groups.back().d_max;
    }
    curve.auc_m = area;
    return curve;
}

RocCurve sweep_roc(std::span<const double> hazard,
                   std::span<const unsigned char> is_extreme,
                   std::span<const double> base_grid) {
    std::set<double> qp_set(base_grid.begin(), base_grid.end());
    qp_set.insert(hazard.begin(), hazard.end());  // exact curve at observed values
    std::vector<double> qp(qp_set.begin(), qp_set.end());

    std::vector<ConfusionCounts> counts;
    counts.reserve(qp.size());
    for (double q : qp) counts.push_back(confusion(hazard, is_extreme, q));
    return roc(counts, qp);
}

namespace {

struct WindowFit {
    double threshold = 0;
    EventSeries events;
    HazardModel model;
};

WindowFit fit_window(std::span<const double> prefix, const ExtremeSpec& spec,
                     const BacktestConfig& cfg,
                     const std::optional<double>& frozen_threshold) {
    WindowFit w;
    w.threshold = frozen_threshold ? *frozen_threshold : quantile(prefix, spec.quantile);
    w.events = extract_events(prefix, spec, w.threshold);
    if (w.events.tau.size() < cfg.min_intervals) {
        throw std::runtime_error("backtest: only " + std::to_string(w.events.tau.size()) +
                                 " recurrence intervals in window, need " +
                                 std::to_string(cfg.min_intervals));
    }

    std::vector<double> tau(w.events.tau.begin(), w.events.tau.end());
    w.model.ri = fit_ri(tau, cfg.ri_family);
    w.model.gpd = fit_gpd(w.events.y);

    if (cfg.fixed_theta) {
        w.model.cop.family = cfg.copula_choice == CopulaChoice::AMH ? CopulaFamily::AMH
                                                                    : CopulaFamily::Frank;
        w.model.cop.theta = *cfg.fixed_theta;
        w.model.cop.n = w.events.tau.size();
        return w;
    }

    const TauYPairs pairs = paired_samples(w.events, cfg.pairing);
    const PseudoSample ps = make_pseudo_sample(w.model.ri, w.model.gpd, pairs.tau, pairs.y);
    switch (cfg.copula_choice) {
        case CopulaChoice::Frank:
            w.model.cop = fit_copula(ps, CopulaFamily::Frank);
            break;
        case CopulaChoice::AMH:
            w.model.cop = fit_copula(ps, CopulaFamily::AMH);
            break;
        case CopulaChoice::Auto:
            w.model.cop = select_copula(ps);
            break;
    }
    return w;
}

// Most recent day index < d whose return exceeds the threshold, or npos.
std::size_t last_extreme_before(std::span<const double> returns, std::size_t d,
                                const ExtremeSpec& spec, double threshold) {
    for (std::size_t i = d; i-- > 0;) {
        const double x = returns[i];
        if (spec.side == Side::Positive ? x > threshold : x < threshold) return i;
    }
    return static_cast<std::size_t>(-1);
}

bool exceeds(double x, const ExtremeSpec& spec, double threshold) {
    return spec.side == Side::Positive ? x > threshold : x < threshold;
}

double exceeding_size(double x, const ExtremeSpec& spec, double threshold) {
    return spec.side == Side::Positive ? x - threshold : threshold - x;
}

BacktestRun run_one(const ReturnSeries& r, const ExtremeSpec& spec,
                    const BacktestConfig& cfg, std::span<const double> qp_grid) {
    const std::size_t n = r.size();
    const auto split = static_cast<std::size_t>(std::floor(cfg.split * static_cast<double>(n)));
    if (split < 2 || split >= n) {
        throw std::invalid_argument("backtest: split leaves no in-sample or no test days");
    }
    const std::span<const double> returns(r.returns);

    BacktestRun run;
    run.spec = spec;
    run.oos_start = split;

    const WindowFit initial = fit_window(returns.first(split), spec, cfg, std::nullopt);
    run.initial_threshold = initial.threshold;

    std::size_t survival_degenerate_days = 0;
    std::size_t v_degenerate_days = 0;

    auto score = [&](const WindowFit& w, std::size_t day, std::size_t last, double label_threshold) {
        DayRecord rec;
        rec.date = r.dates[day];
        rec.index = day;
        rec.t = static_cast<double>(day - last);
        rec.y_last = exceeding_size(returns[last], spec, w.threshold);
        HazardQuery query{rec.t, static_cast<double>(cfg.dt), rec.y_last};
        HazardFlags flags;
        rec.W = hazard_ri(w.model.ri, query, &flags);
        rec.Wy = hazard_joint(w.model, query, &flags);
        if (flags.survival_degenerate) ++survival_degenerate_days;
        if (flags.v_degenerate) ++v_degenerate_days;
        rec.is_extreme = exceeds(returns[day], spec, label_threshold);
        return rec;
    };

    // in-sample pass, scored with the final in-sample fit
    for (std::size_t d = initial.events.indices.front() + 1; d < split; ++d) {
        const std::size_t last = last_extreme_before(returns, d, spec, initial.threshold);
        run.in_sample.push_back(score(initial, d, last, initial.threshold));
    }

    // expanding-window out-of-sample pass
    WindowFit current = initial;
    run.history.push_back({split, current.threshold, current.model.ri, current.model.gpd,
                           current.model.cop, false});
    const std::optional<double> frozen =
        cfg.fixed_threshold ? std::optional<double>(initial.threshold) : std::nullopt;
    for (std::size_t d = split; d < n; ++d) {
        if (d > split && (d - split) % static_cast<std::size_t>(cfg.refit_every) == 0) {
            try {
                current = fit_window(returns.first(d), spec, cfg, frozen);
                run.history.push_back({d, current.threshold, current.model.ri,
                                       current.model.gpd, current.model.cop, false});
            } catch (const std::exception& e) {
                run.warnings.push_back("day " + std::to_string(d) + " (" +
                                       r.dates[d].to_string() + "): refit failed (" + e.what() +
                                       "); carried forward previous parameters");
                run.history.push_back({d, current.threshold, current.model.ri,
                                       current.model.gpd, current.model.cop, true});
            }
        }
        const std::size_t last = last_extreme_before(returns, d, spec, current.threshold);
        if (last == static_cast<std::size_t>(-1)) {
            run.warnings.push_back("day " + std::to_string(d) +
                                   ": no extreme before day under current threshold; skipped");
            continue;
        }
        const double label_threshold = frozen ? *frozen : current.threshold;
        run.out_of_sample.push_back(score(current, d, last, label_threshold));
    }

    if (survival_degenerate_days > 0) {
        run.warnings.push_back(std::to_string(survival_degenerate_days) +
                               " day(s) with degenerate survival; hazard reported as 1");
    }
    if (v_degenerate_days > 0) {
        run.warnings.push_back(std::to_string(v_degenerate_days) +
                               " day(s) with y_last at the lower support; W_y fell back to W");
    }
    bool boundary_theta = false;
    bool boundary_shape = false;
    for (const ParameterSnapshot& snap : run.history) {
        boundary_theta |= snap.cop.at_boundary;
        boundary_shape |= snap.ri.at_boundary;
    }
    if (boundary_theta) {
        run.warnings.push_back("copula parameter hit its search boundary in at least one window");
    }
    if (boundary_shape) {
        run.warnings.push_back("marginal shape hit its range boundary in at least one window");
    }

    auto curve = [&](const std::vector<DayRecord>& days, bool joint) {
        std::vector<double> hazard(days.size());
        std::vector<unsigned char> truth(days.size());
        for (std::size_t i = 0; i < days.size(); ++i) {
            hazard[i] = joint ? days[i].Wy : days[i].W;
            truth[i] = days[i].is_extreme ? 1 : 0;
        }
        return sweep_roc(hazard, truth, qp_grid);
    };
    run.roc_w_in = curve(run.in_sample, false);
    run.roc_wy_in = curve(run.in_sample, true);
    run.roc_w_out = curve(run.out_of_sample, false);
    run.roc_wy_out = curve(run.out_of_sample, true);
    if (run.roc_w_out.degenerate || run.roc_wy_out.degenerate) {
        run.warnings.push_back(
            "no out-of-sample extremes (or no quiet days): D undefined, AUC_m reported as NaN");
    }
    return run;
}

}  // namespace

BacktestReport run_backtest(const ReturnSeries& r, const BacktestConfig& config) {
    config.validate();
    r.validate();

    BacktestReport report;
    report.config = config;
    report.n_days = r.size();

    const std::vector<double> qp =
        config.qp_grid.empty() ? BacktestConfig::default_qp_grid() : config.qp_grid;

    const std::size_t n_specs = config.quantiles.size();
    unsigned n_threads = config.threads > 0
                             ? static_cast<unsigned>(config.threads)
                             : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_specs));

    if (n_threads <= 1 || n_specs == 1) {
        for (const ExtremeSpec& spec : config.quantiles) {
            report.runs.push_back(run_one(r, spec, config, qp));
        }
    } else {
        // batches of at most n_threads keep --threads an actual bound
        report.runs.resize(n_specs);
        for (std::size_t start = 0; start < n_specs; start += n_threads) {
            const std::size_t stop = std::min(n_specs, start + n_threads);
            std::vector<std::future<BacktestRun>> futures;
            for (std::size_t i = start; i < stop; ++i) {
                futures.push_back(std::async(std::launch::async, [&, i] {
                    return run_one(r, config.quantiles[i], config, qp);
                }));
            }
            for (std::size_t i = start; i < stop; ++i) {
                report.runs[i] = futures[i - start].get();
            }
        }
    }
    return report;
}

}  // namespace tailhazard
