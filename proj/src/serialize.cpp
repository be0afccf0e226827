#include "tailhazard/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tailhazard {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void atomic_write(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << contents;
        if (!out.flush()) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

// --- enum <-> string -------------------------------------------------------

std::string to_string(RIFamily family) { return family_name(family); }
std::string to_string(CopulaFamily family) { return family_name(family); }

std::string to_string(Side side) {
    return side == Side::Positive ? "positive" : "negative";
}

std::string to_string(Pairing pairing) {
    return pairing == Pairing::End ? "end" : "start";
}

std::string to_string(CopulaChoice choice) {
    switch (choice) {
        case CopulaChoice::Frank: return "frank";
        case CopulaChoice::AMH: return "amh";
        case CopulaChoice::Auto: return "auto";
    }
    return "?";
}

RIFamily ri_family_from_string(const std::string& s) {
    if (s == "stretched_exponential" || s == "se") return RIFamily::StretchedExponential;
    if (s == "q_exponential" || s == "qe") return RIFamily::QExponential;
    if (s == "weibull" || s == "w") return RIFamily::Weibull;
    throw std::invalid_argument("unknown recurrence-interval family '" + s + "'");
}

CopulaFamily copula_family_from_string(const std::string& s) {
    if (s == "frank") return CopulaFamily::Frank;
    if (s == "amh") return CopulaFamily::AMH;
    throw std::invalid_argument("unknown copula family '" + s + "'");
}

Side side_from_string(const std::string& s) {
    if (s == "positive") return Side::Positive;
    if (s == "negative") return Side::Negative;
    throw std::invalid_argument("side must be 'positive' or 'negative', got '" + s + "'");
}

Pairing pairing_from_string(const std::string& s) {
    if (s == "end") return Pairing::End;
    if (s == "start") return Pairing::Start;
    throw std::invalid_argument("pairing must be 'end' or 'start', got '" + s + "'");
}

CopulaChoice copula_choice_from_string(const std::string& s) {
    if (s == "frank") return CopulaChoice::Frank;
    if (s == "amh") return CopulaChoice::AMH;
    if (s == "auto") return CopulaChoice::Auto;
    throw std::invalid_argument("copula must be 'frank', 'amh' or 'auto', got '" + s + "'");
}

// --- JSON ------------------------------------------------------------------

Json to_json(const DescriptiveStats& stats) {
    Json j;
    j["obsv"] = stats.obsv;
    j["mean"] = stats.mean;
    j["max"] = stats.max;
    j["min"] = stats.min;
    j["median"] = stats.median;
    j["stdev"] = stats.stdev;
    j["skew"] = stats.skew;
    j["kurt"] = stats.kurt;
    if (stats.degenerate) j["degenerate"] = true;
    return j;
}

Json to_json(const RIFit& fit) {
    Json j;
    j["family"] = to_string(fit.family);
    switch (fit.family) {
        case RIFamily::StretchedExponential:
            j["mu"] = fit.shape;
            j["a"] = fit.a;
            j["b"] = fit.b;
            j["lnL_SE"] = fit.loglik;
            break;
        case RIFamily::QExponential:
            j["q"] = fit.shape;
            j["lambda"] = fit.lambda;
            j["lnL_qE"] = fit.loglik;
            break;
        case RIFamily::Weibull:
            j["alpha"] = fit.shape;
            j["beta"] = fit.beta;
            j["lnL_W"] = fit.loglik;
            break;
    }
    j["tau_Q"] = fit.tau_mean;
    if (fit.at_boundary) j["at_boundary"] = true;
    return j;
}

RIFit ri_fit_from_json(const Json& j) {
    const RIFamily family = ri_family_from_string(j.at("family").get<std::string>());
    double shape = 0;
    switch (family) {
        case RIFamily::StretchedExponential: shape = j.at("mu").get<double>(); break;
        case RIFamily::QExponential: shape = j.at("q").get<double>(); break;
        case RIFamily::Weibull: shape = j.at("alpha").get<double>(); break;
    }
    RIFit fit = RIFit::from_params(family, shape, j.at("tau_Q").get<double>());
    if (j.contains("lnL_SE")) fit.loglik = j["lnL_SE"].get<double>();
    if (j.contains("lnL_qE")) fit.loglik = j["lnL_qE"].get<double>();
    if (j.contains("lnL_W")) fit.loglik = j["lnL_W"].get<double>();
    fit.at_boundary = j.value("at_boundary", false);
    return fit;
}

Json to_json(const GPDFit& fit) {
    Json j;
    j["phi"] = fit.phi;
    j["xi"] = fit.xi;
    j["lnL_GPD"] = fit.loglik;
    return j;
}

GPDFit gpd_fit_from_json(const Json& j) {
    GPDFit fit = GPDFit::from_params(j.at("xi").get<double>(), j.at("phi").get<double>());
    fit.loglik = j.value("lnL_GPD", 0.0);
    return fit;
}

Json to_json(const CopulaFit& fit) {
    Json j;
    j["family"] = to_string(fit.family);
    j[fit.family == CopulaFamily::Frank ? "theta_f" : "theta_a"] = fit.theta;
    j["lnL"] = fit.loglik;
    j["rmse"] = fit.rmse;
    j["aic"] = fit.aic;
    j["n"] = fit.n;
    if (fit.at_boundary) j["at_boundary"] = true;
    if (fit.perfect_fit) j["perfect_fit"] = true;
    return j;
}

CopulaFit copula_fit_from_json(const Json& j) {
    CopulaFit fit;
    fit.family = copula_family_from_string(j.at("family").get<std::string>());
    fit.theta = fit.family == CopulaFamily::Frank ? j.at("theta_f").get<double>()
                                                  : j.at("theta_a").get<double>();
    fit.loglik = j.value("lnL", 0.0);
    fit.rmse = j.value("rmse", 0.0);
    fit.aic = j.value("aic", 0.0);
    fit.n = j.value("n", std::size_t{0});
    fit.at_boundary = j.value("at_boundary", false);
    fit.perfect_fit = j.value("perfect_fit", false);
    return fit;
}

Json to_json(const ExtremeSpec& spec) {
    Json j;
    j["quantile"] = spec.quantile;
    j["side"] = to_string(spec.side);
    return j;
}

ExtremeSpec extreme_spec_from_json(const Json& j) {
    ExtremeSpec spec;
    spec.quantile = j.at("quantile").get<double>();
    spec.side = side_from_string(j.at("side").get<std::string>());
    spec.validate();
    return spec;
}

Json to_json(const BacktestConfig& config) {
    Json j;
    j["split"] = config.split;
    j["dt"] = config.dt;
    Json specs = Json::array();
    for (const ExtremeSpec& spec : config.quantiles) specs.push_back(to_json(spec));
    j["quantiles"] = specs;
    j["refit_every"] = config.refit_every;
    j["qp_grid"] = config.qp_grid;
    j["copula"] = to_string(config.copula_choice);
    j["ri_family"] = to_string(config.ri_family);
    j["pairing"] = to_string(config.pairing);
    j["fixed_threshold"] = config.fixed_threshold;
    if (config.fixed_theta) j["fixed_theta"] = *config.fixed_theta;
    j["min_intervals"] = config.min_intervals;
    return j;
}

BacktestConfig backtest_config_from_json(const Json& j) {
    BacktestConfig c;
    c.split = j.value("split", c.split);
    c.dt = j.value("dt", c.dt);
    if (j.contains("quantiles")) {
        c.quantiles.clear();
        for (const Json& spec : j["quantiles"]) {
            c.quantiles.push_back(extreme_spec_from_json(spec));
        }
    }
    c.refit_every = j.value("refit_every", c.refit_every);
    if (j.contains("qp_grid")) c.qp_grid = j["qp_grid"].get<std::vector<double>>();
    if (j.contains("copula")) c.copula_choice = copula_choice_from_string(j["copula"]);
    if (j.contains("ri_family")) c.ri_family = ri_family_from_string(j["ri_family"]);
    if (j.contains("pairing")) c.pairing = pairing_from_string(j["pairing"]);
    c.fixed_threshold = j.value("fixed_threshold", c.fixed_threshold);
    if (j.contains("fixed_theta")) c.fixed_theta = j["fixed_theta"].get<double>();
    c.min_intervals = j.value("min_intervals", c.min_intervals);
    c.validate();
    return c;
}

GeneratorSpec generator_spec_from_json(const Json& j) {
    GeneratorSpec spec;
    const Json& ri = j.at("ri");
    spec.ri = RIFit::from_params(ri_family_from_string(ri.at("family").get<std::string>()),
                                 ri.at("shape").get<double>(),
                                 ri.at("tau_mean").get<double>());
    const Json& gpd = j.at("gpd");
    spec.gpd = GPDFit::from_params(gpd.at("xi").get<double>(), gpd.at("phi").get<double>());
    const Json& cop = j.at("copula");
    spec.copula_family = copula_family_from_string(cop.at("family").get<std::string>());
    spec.theta = cop.at("theta").get<double>();
    spec.n = j.value("n", spec.n);
    spec.seed = j.value("seed", spec.seed);
    if (j.contains("pairing")) spec.pairing = pairing_from_string(j["pairing"]);
    spec.threshold = j.value("threshold", spec.threshold);
    spec.validate();
    return spec;
}

namespace {

Json to_json(const RocCurve& curve) {
    Json j;
    j["auc_m"] = curve.degenerate ? Json() : Json(curve.auc_m);
    j["degenerate"] = curve.degenerate;
    j["n_points"] = curve.points.size();
    return j;
}

Json to_json(const ParameterSnapshot& snap) {
    Json j;
    j["day_index"] = snap.day_index;
    j["threshold"] = snap.threshold;
    j["ri"] = to_json(snap.ri);
    j["gpd"] = to_json(snap.gpd);
    j["copula"] = to_json(snap.cop);
    if (snap.carried_forward) j["carried_forward"] = true;
    return j;
}

}  // namespace

Json to_json(const BacktestReport& report) {
    Json j;
    j["config"] = to_json(report.config);
    j["n_days"] = report.n_days;
    j["rng"] = Rng::kAlgorithm;

    Json runs = Json::array();
    std::vector<std::string> all_warnings;
    for (const BacktestRun& run : report.runs) {
        Json rj;
        rj["spec"] = to_json(run.spec);
        rj["initial_threshold"] = run.initial_threshold;
        rj["oos_start"] = run.oos_start;
        rj["n_in_sample_days"] = run.in_sample.size();
        rj["n_out_of_sample_days"] = run.out_of_sample.size();
        // AUC_m table, one row per hazard variant
        Json auc;
        auc["in_sample"]["W"] = to_json(run.roc_w_in);
        auc["in_sample"]["Wy"] = to_json(run.roc_wy_in);
        auc["out_of_sample"]["W"] = to_json(run.roc_w_out);
        auc["out_of_sample"]["Wy"] = to_json(run.roc_wy_out);
        rj["auc_m"] = auc;
        Json history = Json::array();
        for (const ParameterSnapshot& snap : run.history) history.push_back(to_json(snap));
        rj["parameter_history"] = history;
        rj["warnings"] = run.warnings;
        for (const std::string& w : run.warnings) all_warnings.push_back(w);
        runs.push_back(rj);
    }
    j["runs"] = runs;
    j["warnings"] = all_warnings;
    return j;
}

// --- event CSV ---------------------------------------------------------------

void save_event_series(const EventSeries& events, const std::string& path) {
    std::ostringstream out;
    out << "index,tau,y\n";
    out << "# threshold=" << format_double(events.threshold) << '\n';
    for (std::size_t k = 0; k < events.indices.size(); ++k) {
        out << events.indices[k] << ',';
        if (k > 0) out << events.tau[k - 1];  // first event closes no interval
        out << ',' << format_double(events.y[k]) << '\n';
    }
    atomic_write(path, out.str());
}

EventSeries load_event_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || (line != "index,tau,y" && line != "index,tau,y\r")) {
        throw std::runtime_error("'" + path + "': expected header 'index,tau,y'");
    }

    EventSeries events;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find("threshold=");
            if (eq != std::string::npos) events.threshold = std::stod(line.substr(eq + 10));
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw std::runtime_error("'" + path + "' row " + std::to_string(row) +
                                     ": expected 'index,tau,y'");
        }
        try {
            events.indices.push_back(std::stoull(line.substr(0, c1)));
            const std::string tau_text = line.substr(c1 + 1, c2 - c1 - 1);
            if (!tau_text.empty()) events.tau.push_back(std::stoi(tau_text));
            events.y.push_back(std::stod(line.substr(c2 + 1)));
        } catch (const std::exception&) {
            throw std::runtime_error("'" + path + "' row " + std::to_string(row) +
                                     ": malformed event row");
        }
    }
    if (events.indices.size() < 2 || events.tau.size() + 1 != events.indices.size() ||
        events.y.size() != events.indices.size()) {
        throw std::runtime_error("'" + path + "': inconsistent event series");
    }
    for (std::size_t k = 0; k + 1 < events.indices.size(); ++k) {
        if (events.indices[k + 1] <= events.indices[k] ||
            events.indices[k + 1] - events.indices[k] !=
                static_cast<std::size_t>(events.tau[k])) {
            throw std::runtime_error("'" + path + "': tau does not match indices at row " +
                                     std::to_string(k + 3));
        }
    }
    return events;
}

void save_hazard_csv(const BacktestRun& run, const std::string& path) {
    std::ostringstream out;
    out << "date,t,y_last,W,Wy,extreme\n";
    auto emit = [&](const DayRecord& rec) {
        out << rec.date.to_string() << ',' << format_double(rec.t) << ','
            << format_double(rec.y_last) << ',' << format_double(rec.W) << ','
            << format_double(rec.Wy) << ',' << (rec.is_extreme ? 1 : 0) << '\n';
    };
    for (const DayRecord& rec : run.in_sample) emit(rec);
    for (const DayRecord& rec : run.out_of_sample) emit(rec);
    atomic_write(path, out.str());
}

void save_roc_csv(const BacktestRun& run, const std::string& path) {
    std::ostringstream out;
    out << "variant,qp,A,D\n";
    auto emit = [&](const char* variant, const RocCurve& curve) {
        for (const RocPoint& p : curve.points) {
            out << variant << ',' << format_double(p.qp) << ',' << format_double(p.A) << ','
                << format_double(p.D) << '\n';
        }
    };
    emit("W_in", run.roc_w_in);
    emit("Wy_in", run.roc_wy_in);
    emit("W_out", run.roc_w_out);
    emit("Wy_out", run.roc_wy_out);
    atomic_write(path, out.str());
}

}  // namespace tailhazard
