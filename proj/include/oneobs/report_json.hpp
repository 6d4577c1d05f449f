#pragma once

// JSON (de)serialization for rules, calibration results and Monte Carlo
// reports. Emission uses ordered keys and shortest round-trip number
// formatting, so identical results serialize to identical bytes; wall_time_s
// is the only field expected to differ between reruns.

#include <nlohmann/json.hpp>

#include "oneobs/calibrate.hpp"
#include "oneobs/coverage.hpp"
#include "oneobs/montecarlo.hpp"

namespace oneobs::jsonio {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const IntervalRule& rule);
ordered_json to_json(const CalibrationResult& result);
ordered_json to_json(const ParamPoint& point);
ordered_json to_json(const MonteCarloReport& report);
ordered_json to_json(const ScanReport& report);
ordered_json to_json(const MixtureCheckReport& report);
ordered_json to_json(const CoverageCurve& curve);

IntervalRule rule_from_json(const ordered_json& j);
CalibrationResult calibration_from_json(const ordered_json& j);
ParamPoint point_from_json(const ordered_json& j);
MonteCarloReport report_from_json(const ordered_json& j);
ScanReport scan_from_json(const ordered_json& j);

}  // namespace oneobs::jsonio
