#pragma once

#include <string>

#include <json.hpp>

#include "tailhazard/backtest.hpp"
#include "tailhazard/synth.hpp"

namespace tailhazard {

// Insertion-ordered JSON so identical inputs serialize byte-identically.
using Json = nlohmann::ordered_json;

Json to_json(const DescriptiveStats& stats);
Json to_json(const RIFit& fit);
Json to_json(const GPDFit& fit);
Json to_json(const CopulaFit& fit);
Json to_json(const BacktestConfig& config);
Json to_json(const BacktestReport& report);

RIFit ri_fit_from_json(const Json& j);
GPDFit gpd_fit_from_json(const Json& j);
CopulaFit copula_fit_from_json(const Json& j);
BacktestConfig backtest_config_from_json(const Json& j);
GeneratorSpec generator_spec_from_json(const Json& j);

ExtremeSpec extreme_spec_from_json(const Json& j);
Json to_json(const ExtremeSpec& spec);

RIFamily ri_family_from_string(const std::string& s);
CopulaFamily copula_family_from_string(const std::string& s);
Side side_from_string(const std::string& s);
Pairing pairing_from_string(const std::string& s);
CopulaChoice copula_choice_from_string(const std::string& s);
std::string to_string(RIFamily family);
std::string to_string(CopulaFamily family);
std::string to_string(Side side);
std::string to_string(Pairing pairing);
std::string to_string(CopulaChoice choice);

// Event CSV (`index,tau,y`; the first row has no interval and leaves tau
// empty) and the per-day/ROC outputs of the backtest.
void save_event_series(const EventSeries& events, const std::string& path);
EventSeries load_event_series(const std::string& path);

void save_hazard_csv(const BacktestRun& run, const std::string& path);
void save_roc_csv(const BacktestRun& run, const std::string& path);

// All file output goes through a temp-file-plus-rename so partial writes
// never land under the final name.
void atomic_write(const std::string& path, const std::string& contents);

// Doubles in CSV output: 17 significant digits, enough to round-trip.
std::string format_double(double x);

}  // namespace tailhazard
