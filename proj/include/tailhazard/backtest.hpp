#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tailhazard/events.hpp"
#include "tailhazard/hazard.hpp"

namespace tailhazard {

enum class CopulaChoice { Frank, AMH, Auto };

struct BacktestConfig {
    double split = 0.70;            // in-sample fraction
    int dt = 1;                     // prediction horizon, days
    std::vector<ExtremeSpec> quantiles{ExtremeSpec{}};
    int refit_every = 1;            // expanding-window refit cadence
    std::vector<double> qp_grid;    // empty = default_qp_grid()
    CopulaChoice copula_choice = CopulaChoice::Frank;
    RIFamily ri_family = RIFamily::QExponential;
    Pairing pairing = Pairing::End;
    bool fixed_threshold = false;   // freeze the initial in-sample threshold
    // sensitivity knob: pin the copula parameter instead of fitting it
    // (0 pins the independence copula, making W_y collapse onto W)
    std::optional<double> fixed_theta;
    std::size_t min_intervals = 10; // required recurrence intervals at the split
    int threads = 0;

    void validate() const;
    // 201 evenly spaced alarm thresholds on [0,1]; observed hazard values
    // are merged in per variant when sweeping.
    static std::vector<double> default_qp_grid();
};

struct ConfusionCounts {
    std::size_t n00 = 0, n01 = 0, n10 = 0, n11 = 0;

    std::size_t total() const { return n00 + n01 + n10 + n11; }
    double false_alarm_rate() const;     // A = n10 / (n00 + n10)
    double correct_prediction_rate() const;  // D = n11 / (n01 + n11), NaN when no extremes
};

// Alarm on day i iff hazard[i] >= qp.
ConfusionCounts confusion(std::span<const double> hazard,
                          std::span<const unsigned char> is_extreme, double qp);

struct RocPoint {
    double qp = 0;
    double A = 0;
    double D = 0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // sorted by A ascending
    double auc_m = 0;              // trapezoidal area of D(A) over A in [0, 0.3]
    bool degenerate = false;       // no extremes: D undefined, auc_m = NaN
};

// Assembles the curve from per-threshold confusions and integrates AUC_m.
// D extends flat beyond the observed A range; D at A = 0.3 interpolates.
RocCurve roc(std::span<const ConfusionCounts> counts, std::span<const double> qp);

// Full sweep: the base grid is augmented with every distinct hazard value so
// the curve is exact.
RocCurve sweep_roc(std::span<const double> hazard,
                   std::span<const unsigned char> is_extreme,
                   std::span<const double> base_grid);

struct DayRecord {
    Date date;
    std::size_t index = 0;
    double t = 0;
    double y_last = 0;
    double W = 0;
    double Wy = 0;
    bool is_extreme = false;
};

struct ParameterSnapshot {
    std::size_t day_index = 0;
    double threshold = 0;
    RIFit ri;
    GPDFit gpd;
    CopulaFit cop;
    bool carried_forward = false;  // refit failed, previous fit kept
};

// One quantile spec's worth of results. Out-of-sample records never use
// parameters fitted on data at or after their own day.
struct BacktestRun {
    ExtremeSpec spec;
    double initial_threshold = 0;
    std::size_t oos_start = 0;
    std::vector<DayRecord> in_sample;   // evaluated with the final in-sample fit
    std::vector<DayRecord> out_of_sample;
    RocCurve roc_w_in, roc_wy_in, roc_w_out, roc_wy_out;
    std::vector<ParameterSnapshot> history;
    std::vector<std::string> warnings;
};

struct BacktestReport {
    BacktestConfig config;
    std::size_t n_days = 0;
    std::vector<BacktestRun> runs;
};

// Expanding-window forecast over the last (1-split) of the series: refit on
// the growing window per cadence, score each day d with t and y_last taken
// from the most recent extreme before d, then sweep alarms into ROC curves.
BacktestReport run_backtest(const ReturnSeries& r, const BacktestConfig& config);

}  // namespace tailhazard
