#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tailhazard/backtest.hpp"
#include "tailhazard/serialize.hpp"
#include "tailhazard/synth.hpp"

namespace py = pybind11;
using namespace tailhazard;

namespace {

std::vector<double> as_vector(const py::iterable& xs) {
    std::vector<double> out;
    for (const auto& x : xs) out.push_back(x.cast<double>());
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Peaks-over-threshold extremes: recurrence intervals, exceedances, "
              "copulas, hazard probabilities and alarm backtesting";

    py::enum_<Side>(m, "Side")
        .value("positive", Side::Positive)
        .value("negative", Side::Negative);
    py::enum_<Pairing>(m, "Pairing")
        .value("end", Pairing::End)
        .value("start", Pairing::Start);
    py::enum_<RIFamily>(m, "RIFamily")
        .value("stretched_exponential", RIFamily::StretchedExponential)
        .value("q_exponential", RIFamily::QExponential)
        .value("weibull", RIFamily::Weibull);
    py::enum_<CopulaFamily>(m, "CopulaFamily")
        .value("frank", CopulaFamily::Frank)
        .value("amh", CopulaFamily::AMH);
    py::enum_<CopulaChoice>(m, "CopulaChoice")
        .value("frank", CopulaChoice::Frank)
        .value("amh", CopulaChoice::AMH)
        .value("auto", CopulaChoice::Auto);

    py::class_<Date>(m, "Date")
        .def(py::init([](const std::string& iso) { return Date::parse(iso); }))
        .def_readonly("year", &Date::year)
        .def_readonly("month", &Date::month)
        .def_readonly("day", &Date::day)
        .def("__str__", &Date::to_string)
        .def("__repr__", [](const Date& d) { return "Date('" + d.to_string() + "')"; });

    py::class_<PriceSeries>(m, "PriceSeries")
        .def(py::init())
        .def_readwrite("dates", &PriceSeries::dates)
        .def_readwrite("prices", &PriceSeries::prices)
        .def("__len__", &PriceSeries::size);
    py::class_<ReturnSeries>(m, "ReturnSeries")
        .def(py::init())
        .def_readwrite("dates", &ReturnSeries::dates)
        .def_readwrite("returns", &ReturnSeries::returns)
        .def("__len__", &ReturnSeries::size);

    m.def("load_price_series", &load_price_series, py::arg("path"));
    m.def("load_return_series", &load_return_series, py::arg("path"));
    m.def("save_return_series", &save_return_series, py::arg("series"), py::arg("path"));
    m.def("to_returns", &to_returns, py::arg("prices"));
    m.def(
        "quantile",
        [](const py::iterable& xs, double q) { return quantile(as_vector(xs), q); },
        py::arg("sample"), py::arg("q"));

    py::class_<ExtremeSpec>(m, "ExtremeSpec")
        .def(py::init([](double quantile, Side side) {
                 ExtremeSpec spec{quantile, side};
                 spec.validate();
                 return spec;
             }),
             py::arg("quantile") = 0.9, py::arg("side") = Side::Positive)
        .def_readonly("quantile", &ExtremeSpec::quantile)
        .def_readonly("side", &ExtremeSpec::side);

    py::class_<EventSeries>(m, "EventSeries")
        .def_readonly("threshold", &EventSeries::threshold)
        .def_readonly("indices", &EventSeries::indices)
        .def_readonly("tau", &EventSeries::tau)
        .def_readonly("y", &EventSeries::y)
        .def("__len__", &EventSeries::count);

    m.def(
        "extract_events",
        [](const ReturnSeries& r, const ExtremeSpec& spec, double threshold) {
            return extract_events(r, spec, threshold);
        },
        py::arg("returns"), py::arg("spec"), py::arg("threshold"));

    py::class_<DescriptiveStats>(m, "DescriptiveStats")
        .def_readonly("obsv", &DescriptiveStats::obsv)
        .def_readonly("mean", &DescriptiveStats::mean)
        .def_readonly("max", &DescriptiveStats::max)
        .def_readonly("min", &DescriptiveStats::min)
        .def_readonly("median", &DescriptiveStats::median)
        .def_readonly("stdev", &DescriptiveStats::stdev)
        .def_readonly("skew", &DescriptiveStats::skew)
        .def_readonly("kurt", &DescriptiveStats::kurt)
        .def_readonly("degenerate", &DescriptiveStats::degenerate);
    m.def(
        "describe", [](const py::iterable& xs) { return describe(as_vector(xs)); },
        py::arg("sample"));
    m.def(
        "pearson_test",
        [](const py::iterable& a, const py::iterable& b) {
            const PearsonResult r = pearson_test(as_vector(a), as_vector(b));
            return py::make_tuple(r.rho, r.p_value);
        },
        py::arg("a"), py::arg("b"));

    py::class_<RIFit>(m, "RIFit")
        .def_static("from_params", &RIFit::from_params, py::arg("family"), py::arg("shape"),
                    py::arg("tau_mean"))
        .def_readonly("family", &RIFit::family)
        .def_readonly("shape", &RIFit::shape)
        .def_readonly("tau_mean", &RIFit::tau_mean)
        .def_readonly("loglik", &RIFit::loglik)
        .def_readonly("at_boundary", &RIFit::at_boundary);
    m.def(
        "fit_ri",
        [](const py::iterable& tau, RIFamily family, bool exact_grid) {
            FitOptions options;
            options.exact_grid = exact_grid;
            return fit_ri(as_vector(tau), family, options);
        },
        py::arg("tau_sample"), py::arg("family"), py::arg("exact_grid") = false);
    m.def("ri_pdf", &ri_pdf, py::arg("fit"), py::arg("tau"));
    m.def("ri_cdf", &ri_cdf, py::arg("fit"), py::arg("tau"));

    py::class_<GPDFit>(m, "GPDFit")
        .def_static("from_params", &GPDFit::from_params, py::arg("xi"), py::arg("phi"))
        .def_readonly("xi", &GPDFit::xi)
        .def_readonly("phi", &GPDFit::phi)
        .def_readonly("loglik", &GPDFit::loglik);
    m.def(
        "fit_gpd",
        [](const py::iterable& ys) { return fit_gpd(as_vector(ys)); },
        py::arg("y_sample"));
    m.def("gpd_pdf", &gpd_pdf, py::arg("fit"), py::arg("y"));
    m.def("gpd_cdf", &gpd_cdf, py::arg("fit"), py::arg("y"));

    py::class_<PseudoSample>(m, "PseudoSample")
        .def(py::init([](std::vector<double> u, std::vector<double> v) {
                 PseudoSample ps;
                 ps.u = std::move(u);
                 ps.v = std::move(v);
                 return ps;
             }),
             py::arg("u"), py::arg("v"))
        .def_readonly("u", &PseudoSample::u)
        .def_readonly("v", &PseudoSample::v)
        .def("__len__", &PseudoSample::size);
    m.def(
        "make_pseudo_sample",
        [](const RIFit& ri, const GPDFit& gpd, const py::iterable& tau, const py::iterable& y) {
            return make_pseudo_sample(ri, gpd, as_vector(tau), as_vector(y));
        },
        py::arg("ri"), py::arg("gpd"), py::arg("tau"), py::arg("y"));

    py::class_<CopulaFit>(m, "CopulaFit")
        .def_readonly("family", &CopulaFit::family)
        .def_readonly("theta", &CopulaFit::theta)
        .def_readonly("loglik", &CopulaFit::loglik)
        .def_readonly("rmse", &CopulaFit::rmse)
        .def_readonly("aic", &CopulaFit::aic)
        .def_readonly("n", &CopulaFit::n)
        .def_readonly("at_boundary", &CopulaFit::at_boundary);
    m.def("copula_cdf", &copula_cdf, py::arg("family"), py::arg("theta"), py::arg("u"),
          py::arg("v"));
    m.def("copula_pdf", &copula_pdf, py::arg("family"), py::arg("theta"), py::arg("u"),
          py::arg("v"));
    m.def("fit_copula",
          [](const PseudoSample& ps, CopulaFamily family) { return fit_copula(ps, family); },
          py::arg("pseudo_sample"), py::arg("family"));
    m.def("select_copula",
          [](const PseudoSample& ps) { return select_copula(ps); },
          py::arg("pseudo_sample"));

    py::class_<HazardModel>(m, "HazardModel")
        .def(py::init([](RIFit ri, GPDFit gpd, CopulaFit cop) {
                 return HazardModel{ri, gpd, cop};
             }),
             py::arg("ri"), py::arg("gpd"), py::arg("copula"))
        .def_readonly("ri", &HazardModel::ri)
        .def_readonly("gpd", &HazardModel::gpd)
        .def_readonly("copula", &HazardModel::cop);
    m.def(
        "hazard_ri",
        [](const RIFit& ri, double t, double dt) {
            return hazard_ri(ri, HazardQuery{t, dt, 0.0});
        },
        py::arg("ri"), py::arg("t"), py::arg("dt") = 1.0);
    m.def(
        "hazard_joint",
        [](const HazardModel& model, double t, double dt, double y_last) {
            return hazard_joint(model, HazardQuery{t, dt, y_last});
        },
        py::arg("model"), py::arg("t"), py::arg("dt"), py::arg("y_last"));

    m.def("sample_ri", &sample_ri, py::arg("fit"), py::arg("n"), py::arg("seed"));
    m.def("sample_gpd", &sample_gpd, py::arg("fit"), py::arg("n"), py::arg("seed"));
    m.def(
        "sample_copula",
        [](CopulaFamily family, double theta, std::size_t n, std::uint64_t seed) {
            UVSample s = sample_copula(family, theta, n, seed);
            return py::make_tuple(std::move(s.u), std::move(s.v));
        },
        py::arg("family"), py::arg("theta"), py::arg("n"), py::arg("seed"));

    py::class_<GeneratorSpec>(m, "GeneratorSpec")
        .def(py::init([](RIFit ri, GPDFit gpd, CopulaFamily family, double theta,
                         std::size_t n, std::uint64_t seed, Pairing pairing,
                         double threshold) {
                 GeneratorSpec spec{ri, gpd, family, theta, n, seed, pairing, threshold};
                 spec.validate();
                 return spec;
             }),
             py::arg("ri"), py::arg("gpd"), py::arg("copula_family"), py::arg("theta"),
             py::arg("n"), py::arg("seed") = 1, py::arg("pairing") = Pairing::End,
             py::arg("threshold") = 0.01);
    m.def("sample_event_process", &sample_event_process, py::arg("spec"));
    m.def("embed_in_returns", &embed_in_returns, py::arg("events"), py::arg("seed"),
          py::arg("n_days") = 0);

    py::class_<RocCurve>(m, "RocCurve")
        .def_readonly("auc_m", &RocCurve::auc_m)
        .def_readonly("degenerate", &RocCurve::degenerate)
        .def_property_readonly("points", [](const RocCurve& c) {
            py::list out;
            for (const RocPoint& p : c.points) out.append(py::make_tuple(p.qp, p.A, p.D));
            return out;
        });
    m.def(
        "sweep_roc",
        [](const py::iterable& hazard, const py::iterable& truth,
           const py::iterable& qp_grid) {
            std::vector<double> h = as_vector(hazard);
            std::vector<unsigned char> t;
            for (const auto& x : truth) t.push_back(x.cast<bool>() ? 1 : 0);
            std::vector<double> grid = as_vector(qp_grid);
            return sweep_roc(h, t, grid);
        },
        py::arg("hazard"), py::arg("is_extreme"), py::arg("qp_grid"));

    py::class_<BacktestConfig>(m, "BacktestConfig")
        .def(py::init())
        .def_readwrite("split", &BacktestConfig::split)
        .def_readwrite("dt", &BacktestConfig::dt)
        .def_readwrite("quantiles", &BacktestConfig::quantiles)
        .def_readwrite("refit_every", &BacktestConfig::refit_every)
        .def_readwrite("qp_grid", &BacktestConfig::qp_grid)
        .def_readwrite("copula_choice", &BacktestConfig::copula_choice)
        .def_readwrite("ri_family", &BacktestConfig::ri_family)
        .def_readwrite("pairing", &BacktestConfig::pairing)
        .def_readwrite("fixed_threshold", &BacktestConfig::fixed_threshold)
        .def_readwrite("threads", &BacktestConfig::threads)
        .def_static("default_qp_grid", &BacktestConfig::default_qp_grid);

    py::class_<DayRecord>(m, "DayRecord")
        .def_readonly("index", &DayRecord::index)
        .def_readonly("t", &DayRecord::t)
        .def_readonly("y_last", &DayRecord::y_last)
        .def_readonly("W", &DayRecord::W)
        .def_readonly("Wy", &DayRecord::Wy)
        .def_readonly("is_extreme", &DayRecord::is_extreme)
        .def_property_readonly("date",
                               [](const DayRecord& d) { return d.date.to_string(); });

    py::class_<BacktestRun>(m, "BacktestRun")
        .def_readonly("spec", &BacktestRun::spec)
        .def_readonly("initial_threshold", &BacktestRun::initial_threshold)
        .def_readonly("oos_start", &BacktestRun::oos_start)
        .def_readonly("in_sample", &BacktestRun::in_sample)
        .def_readonly("out_of_sample", &BacktestRun::out_of_sample)
        .def_readonly("roc_w_in", &BacktestRun::roc_w_in)
        .def_readonly("roc_wy_in", &BacktestRun::roc_wy_in)
        .def_readonly("roc_w_out", &BacktestRun::roc_w_out)
        .def_readonly("roc_wy_out", &BacktestRun::roc_wy_out)
        .def_readonly("warnings", &BacktestRun::warnings);

    py::class_<BacktestReport>(m, "BacktestReport")
        .def_readonly("n_days", &BacktestReport::n_days)
        .def_readonly("runs", &BacktestReport::runs)
        .def("to_json", [](const BacktestReport& report) { return to_json(report).dump(2); });

    m.def("run_backtest", &run_backtest, py::arg("returns"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
}
