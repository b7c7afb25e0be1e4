#pragma once

#include <string>

#include <json.hpp>

#include "bellsim/analysis.hpp"
#include "bellsim/dsl.hpp"
#include "bellsim/montecarlo.hpp"

namespace bellsim {

using Json = nlohmann::json;

/// Formats with 10 significant digits, the CSV precision used everywhere.
std::string csv_number(double v);

Json to_json(const BellDecomposition& d);
Json to_json(const SinglePhotonState& s);
Json to_json(const Circuit& c);  // mirrors the DSL structure
Json to_json(const CoefficientTable& t);
Json to_json(const TwoPhotonAmplitudeMap& m);
Json to_json(const TapState& t, std::string_view scheme, BellState state);
Json to_json(const EventProbabilityMap& p);
Json to_json(const RuleSet& r);
Json to_json(const SuccessReport& r);
Json to_json(const ConfusionMatrix& m);

std::string coefficient_table_csv(const CoefficientTable& t);
std::string success_curve_csv(const std::vector<SuccessCurveRow>& rows);

std::string coefficient_table_pretty(const CoefficientTable& t);
std::string amplitude_map_pretty(const TwoPhotonAmplitudeMap& m);
std::string rules_pretty(const RuleSet& r);
std::string success_report_pretty(const SuccessReport& r);
std::string confusion_pretty(const ConfusionMatrix& m);

}  // namespace bellsim
