#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tailhazard/backtest.hpp"
#include "tailhazard/serialize.hpp"
#include "tailhazard/synth.hpp"

namespace th = tailhazard;
namespace fs = std::filesystem;

namespace {

th::Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    th::Json j;
    in >> j;
    return j;
}

void emit_json(const th::Json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        th::atomic_write(out_path, text);
    }
}

th::ReturnSeries load_returns(const std::string& path, const std::string& format) {
    if (format == "price") return th::to_returns(th::load_price_series(path));
    if (format == "return") return th::load_return_series(path);
    throw std::runtime_error("format must be 'price' or 'return', got '" + format + "'");
}

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("TAILHAZARD_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 0;  // library default: hardware concurrency
}

struct FitOutput {
    th::Json json;
    th::RIFit best_ri;
    th::GPDFit gpd;
    th::CopulaFit selected;
};

// Fit all three recurrence-interval families, the GPD and both copulas on
// one event series; the comparison table mirrors the whole-sample
// calibration workflow.
FitOutput fit_all(const th::EventSeries& events, const th::ExtremeSpec& spec,
                  th::Pairing pairing, const th::FitOptions& options,
                  std::vector<std::string>& warnings) {
    std::vector<double> tau(events.tau.begin(), events.tau.end());

    FitOutput out;
    th::Json ri_json;
    const th::RIFamily families[] = {th::RIFamily::StretchedExponential,
                                     th::RIFamily::QExponential, th::RIFamily::Weibull};
    bool have_best = false;
    for (th::RIFamily family : families) {
        const th::RIFit fit = th::fit_ri(tau, family, options);
        ri_json[th::to_string(family)] = th::to_json(fit);
        if (fit.at_boundary) {
            warnings.push_back("shape parameter of " + th::to_string(family) +
                               " sits at its range boundary");
        }
        if (!have_best || fit.loglik > out.best_ri.loglik) {
            out.best_ri = fit;
            have_best = true;
        }
    }
    ri_json["best"] = th::to_string(out.best_ri.family);

    out.gpd = th::fit_gpd(events.y, options);

    const th::TauYPairs pairs = th::paired_samples(events, pairing);
    const th::PseudoSample ps =
        th::make_pseudo_sample(out.best_ri, out.gpd, pairs.tau, pairs.y);
    th::Json cop_json;
    const th::CopulaFit frank = th::fit_copula(ps, th::CopulaFamily::Frank, options);
    const th::CopulaFit amh = th::fit_copula(ps, th::CopulaFamily::AMH, options);
    cop_json["frank"] = th::to_json(frank);
    cop_json["amh"] = th::to_json(amh);
    for (const th::CopulaFit* fit : {&frank, &amh}) {
        if (fit->at_boundary) {
            warnings.push_back(std::string(th::family_name(fit->family)) +
                               " copula parameter sits at its search boundary");
        }
        if (fit->perfect_fit) {
            warnings.push_back(std::string(th::family_name(fit->family)) +
                               " copula: zero RMSE, AIC reported as sentinel");
        }
    }
    out.selected = frank.aic < amh.aic    ? frank
                   : amh.aic < frank.aic  ? amh
                   : frank.rmse <= amh.rmse ? frank
                                            : amh;
    cop_json["selected"] = th::to_string(out.selected.family);

    out.json["quantile"] = spec.quantile;
    out.json["side"] = th::to_string(spec.side);
    out.json["threshold"] = events.threshold;
    out.json["n_events"] = events.count();
    out.json["pairing"] = th::to_string(pairing);
    out.json["recurrence_intervals"] = ri_json;
    out.json["exceedances"] = th::to_json(out.gpd);
    out.json["copulas"] = cop_json;
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Peaks-over-threshold extremes: recurrence-interval and exceedance "
                 "modeling, copula-corrected hazard probabilities, alarm backtesting"};
    app.require_subcommand(1);

    // ---- extract ----
    auto* cmd_extract = app.add_subcommand("extract", "Extract POT extremes to CSV");
    std::string in_path, in_format = "price", out_path, stats_path, pairing_str = "end";
    double quantile_arg = 0.9;
    std::string side_str = "positive";
    cmd_extract->add_option("--input", in_path, "price/return CSV")->required();
    cmd_extract->add_option("--format", in_format, "price|return");
    cmd_extract->add_option("--quantile", quantile_arg, "threshold quantile in (0,1)");
    cmd_extract->add_option("--side", side_str, "positive|negative");
    cmd_extract->add_option("--out", out_path, "event CSV output (index,tau,y)");
    cmd_extract->add_option("--stats-out", stats_path, "descriptive-stats JSON output");
    cmd_extract->add_option("--pairing", pairing_str, "tau-y pairing: end|start");

    // ---- fit ----
    auto* cmd_fit = app.add_subcommand("fit", "Whole-sample marginal and copula fits");
    bool exact_grid = false;
    cmd_fit->add_option("--input", in_path, "price/return CSV")->required();
    cmd_fit->add_option("--format", in_format, "price|return");
    cmd_fit->add_option("--quantile", quantile_arg, "threshold quantile in (0,1)");
    cmd_fit->add_option("--side", side_str, "positive|negative");
    cmd_fit->add_option("--pairing", pairing_str, "tau-y pairing: end|start");
    cmd_fit->add_flag("--exact-grid", exact_grid, "exhaustive 1e-6 parameter grid");
    cmd_fit->add_option("--out", out_path, "fit JSON output (default: stdout)");
    int threads_flag = 0;
    cmd_fit->add_option("--threads", threads_flag, "worker threads (default: cores)");

    // ---- hazard ----
    auto* cmd_hazard = app.add_subcommand("hazard", "Evaluate W and W_y from a fit file");
    std::string fit_path, copula_pick = "selected", ri_pick = "best";
    double t_arg = 1, dt_arg = 1, y_last_arg = 0;
    cmd_hazard->add_option("--fit", fit_path, "fit JSON from the fit command")->required();
    cmd_hazard->add_option("--t", t_arg, "days since the last extreme")->required();
    cmd_hazard->add_option("--dt", dt_arg, "prediction horizon, days");
    cmd_hazard->add_option("--y-last", y_last_arg, "exceeding size of the last extreme")
        ->required();
    cmd_hazard->add_option("--copula", copula_pick, "frank|amh|selected");
    cmd_hazard->add_option("--ri-family", ri_pick,
                           "stretched_exponential|q_exponential|weibull|best");

    // ---- backtest ----
    auto* cmd_backtest = app.add_subcommand("backtest", "Expanding-window alarm backtest");
    std::string config_path, out_dir = ".";
    std::optional<double> split_flag, quantile_flag;
    std::optional<int> dt_flag, refit_flag;
    std::optional<std::string> side_flag, copula_flag, ri_family_flag, pairing_flag;
    bool fixed_threshold = false;
    cmd_backtest->add_option("--input", in_path, "price/return CSV")->required();
    cmd_backtest->add_option("--format", in_format, "price|return");
    cmd_backtest->add_option("--config", config_path, "BacktestConfig JSON");
    cmd_backtest->add_option("--quantile", quantile_flag, "single-spec threshold quantile");
    cmd_backtest->add_option("--side", side_flag, "positive|negative");
    cmd_backtest->add_option("--split", split_flag, "in-sample fraction");
    cmd_backtest->add_option("--dt", dt_flag, "prediction horizon, days");
    cmd_backtest->add_option("--refit-every", refit_flag, "refit cadence, days");
    cmd_backtest->add_option("--copula", copula_flag, "frank|amh|auto");
    cmd_backtest->add_option("--ri-family", ri_family_flag,
                             "stretched_exponential|q_exponential|weibull");
    cmd_backtest->add_option("--pairing", pairing_flag, "end|start");
    cmd_backtest->add_flag("--fixed-threshold", fixed_threshold,
                           "freeze the initial in-sample threshold");
    cmd_backtest->add_option("--threads", threads_flag, "worker threads (default: cores)");
    cmd_backtest->add_option("--out-dir", out_dir, "output directory");
    bool verbose = false;
    cmd_backtest->add_flag("-v,--verbose", verbose, "progress and per-run summaries on stderr");

    // ---- simulate ----
    auto* cmd_simulate = app.add_subcommand("simulate", "Sample the joint event process");
    std::string spec_path, returns_path;
    std::optional<std::uint64_t> seed_flag;
    std::size_t days_flag = 0;
    cmd_simulate->add_option("--spec", spec_path, "GeneratorSpec JSON")->required();
    cmd_simulate->add_option("--out", out_path, "event CSV output")->required();
    cmd_simulate->add_option("--returns-out", returns_path,
                             "also embed the events into a return CSV");
    cmd_simulate->add_option("--days", days_flag, "length of the embedded return series");
    cmd_simulate->add_option("--seed", seed_flag, "override the spec seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (cmd_extract->parsed()) {
            th::ExtremeSpec spec{quantile_arg, th::side_from_string(side_str)};
            const th::ReturnSeries r = load_returns(in_path, in_format);
            const double threshold = th::quantile(r, spec.quantile);
            const th::EventSeries events = th::extract_events(r, spec, threshold);
            if (!out_path.empty()) th::save_event_series(events, out_path);

            std::vector<double> tau(events.tau.begin(), events.tau.end());
            const th::TauYPairs pairs =
                th::paired_samples(events, th::pairing_from_string(pairing_str));
            th::Json stats;
            stats["quantile"] = spec.quantile;
            stats["side"] = side_str;
            stats["threshold"] = threshold;
            stats["tau"] = th::to_json(th::describe(tau));
            stats["y"] = th::to_json(th::describe(events.y));
            const th::PearsonResult rho = th::pearson_test(pairs.tau, pairs.y);
            stats["pearson"]["rho"] = rho.rho;
            stats["pearson"]["p_value"] = rho.p_value;
            stats["pearson"]["pairing"] = pairing_str;
            emit_json(stats, stats_path);
        } else if (cmd_fit->parsed()) {
            th::ExtremeSpec spec{quantile_arg, th::side_from_string(side_str)};
            const th::ReturnSeries r = load_returns(in_path, in_format);
            const double threshold = th::quantile(r, spec.quantile);
            const th::EventSeries events = th::extract_events(r, spec, threshold);
            th::FitOptions options;
            options.exact_grid = exact_grid;
            options.threads = resolve_threads(threads_flag);
            std::vector<std::string> warnings;
            FitOutput fit =
                fit_all(events, spec, th::pairing_from_string(pairing_str), options, warnings);
            fit.json["warnings"] = warnings;
            emit_json(fit.json, out_path);
        } else if (cmd_hazard->parsed()) {
            const th::Json fit_json = load_json(fit_path);
            const th::Json& ri_block = fit_json.at("recurrence_intervals");
            const std::string ri_key =
                ri_pick == "best" ? ri_block.at("best").get<std::string>() : ri_pick;
            const th::Json& cop_block = fit_json.at("copulas");
            const std::string cop_key =
                copula_pick == "selected" ? cop_block.at("selected").get<std::string>()
                                          : copula_pick;
            th::HazardModel model;
            model.ri = th::ri_fit_from_json(ri_block.at(ri_key));
            model.gpd = th::gpd_fit_from_json(fit_json.at("exceedances"));
            model.cop = th::copula_fit_from_json(cop_block.at(cop_key));

            th::HazardQuery query{t_arg, dt_arg, y_last_arg};
            th::HazardFlags flags;
            th::Json out;
            out["t"] = t_arg;
            out["dt"] = dt_arg;
            out["y_last"] = y_last_arg;
            out["ri_family"] = ri_key;
            out["copula"] = cop_key;
            out["W"] = th::hazard_ri(model.ri, query, &flags);
            out["Wy"] = th::hazard_joint(model, query, &flags);
            std::vector<std::string> warnings;
            if (flags.survival_degenerate) {
                warnings.push_back("degenerate survival: an extreme is overdue, hazard = 1");
            }
            if (flags.v_degenerate) {
                warnings.push_back("y_last at the lower support: W_y fell back to W");
            }
            out["warnings"] = warnings;
            emit_json(out, "");
        } else if (cmd_backtest->parsed()) {
            th::BacktestConfig config;
            if (!config_path.empty()) {
                config = th::backtest_config_from_json(load_json(config_path));
            }
            if (quantile_flag || side_flag) {
                th::ExtremeSpec spec = config.quantiles.size() == 1 ? config.quantiles.front()
                                                                    : th::ExtremeSpec{};
                if (quantile_flag) spec.quantile = *quantile_flag;
                if (side_flag) spec.side = th::side_from_string(*side_flag);
                config.quantiles = {spec};
            }
            if (split_flag) config.split = *split_flag;
            if (dt_flag) config.dt = *dt_flag;
            if (refit_flag) config.refit_every = *refit_flag;
            if (copula_flag) config.copula_choice = th::copula_choice_from_string(*copula_flag);
            if (ri_family_flag) config.ri_family = th::ri_family_from_string(*ri_family_flag);
            if (pairing_flag) config.pairing = th::pairing_from_string(*pairing_flag);
            if (fixed_threshold) config.fixed_threshold = true;
            config.threads = resolve_threads(threads_flag);

            const th::ReturnSeries r = load_returns(in_path, in_format);
            if (verbose) {
                std::cerr << "backtest: " << r.size() << " days, "
                          << config.quantiles.size() << " spec(s), refit every "
                          << config.refit_every << " day(s)\n";
            }
            const th::BacktestReport report = th::run_backtest(r, config);
            if (verbose) {
                for (const th::BacktestRun& run : report.runs) {
                    std::cerr << "  q=" << run.spec.quantile << " "
                              << th::to_string(run.spec.side) << ": "
                              << run.out_of_sample.size() << " test days, "
                              << run.history.size() << " refits, AUC_m W="
                              << run.roc_w_out.auc_m << " Wy=" << run.roc_wy_out.auc_m;
                    if (!run.warnings.empty()) {
                        std::cerr << ", " << run.warnings.size() << " warning(s)";
                    }
                    std::cerr << "\n";
                }
            }

            const fs::path dir(out_dir);
            emit_json(th::to_json(report), (dir / "report.json").string());
            for (const th::BacktestRun& run : report.runs) {
                fs::path base = dir;
                if (report.runs.size() > 1) {
                    char tag[32];
                    std::snprintf(tag, sizeof(tag), "q%02d_%s",
                                  static_cast<int>(run.spec.quantile * 100.0 + 0.5),
                                  run.spec.side == th::Side::Positive ? "positive" : "negative");
                    base /= tag;
                }
                th::save_hazard_csv(run, (base / "hazard.csv").string());
                th::save_roc_csv(run, (base / "roc.csv").string());
            }
        } else if (cmd_simulate->parsed()) {
            th::GeneratorSpec spec = th::generator_spec_from_json(load_json(spec_path));
            if (seed_flag) spec.seed = *seed_flag;
            const th::EventSeries events = th::sample_event_process(spec);
            th::save_event_series(events, out_path);
            if (!returns_path.empty()) {
                const th::ReturnSeries r =
                    th::embed_in_returns(events, spec.seed + 1, days_flag);
                th::save_return_series(r, returns_path);
            }
        }
    } catch (const std::exception& e) {
        th::Json err;
        err["error"] = e.what();
        err["command"] = command;
        std::cerr << err.dump(2) << "\n";
        return 1;
    }
    return 0;
}
