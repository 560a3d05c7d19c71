#pragma once

// Text formats: params JSON, trajectory/branch/cycle CSV, schedule CSV/JSON,
// and JSON renderings of the analysis results.
//
// CSV numbers carry 17 significant digits; JSON numbers are rounded to 12.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sirsat/analysis.hpp"
#include "sirsat/continuation.hpp"
#include "sirsat/model.hpp"
#include "sirsat/scenario.hpp"
#include "sirsat/solver.hpp"

namespace sirsat::io {

using Json = nlohmann::ordered_json;

/// Rounds to 12 significant digits (non-finite values pass through).
double round12(double x);
/// Formats with 17 significant digits; non-finite values print as nan/inf.
std::string format17(double x);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view text);

/// Strict: exactly the seven keys, each a finite number. Throws Error(invalid_input).
ModelParams params_from_json(std::string_view text);
Json params_to_json(const ModelParams& p);
/// Sets one parameter from a decimal string; unknown keys throw.
void set_param(ModelParams& p, std::string_view key, std::string_view value);

std::string trajectory_to_csv(const Trajectory& traj);

/// Header "t_start,gamma", one row per segment, then a footer row "t_end,<value>".
GammaSchedule schedule_from_csv(std::string_view text);
std::string schedule_to_csv(const GammaSchedule& sched);
/// {"segments": [{"t_start": .., "gamma": ..}, ...], "t_end": ..}
GammaSchedule schedule_from_json(std::string_view text);
Json schedule_to_json(const GammaSchedule& sched);
/// Chooses JSON when the first non-blank character is '{', CSV otherwise.
GammaSchedule schedule_from_text(std::string_view text);

Json to_json(const EquilibriumReport& r);
Json to_json(const SensitivityIndices& s);
Json to_json(const TranscriticalInfo& t);
Json to_json(const DescartesCounts& d);
Json to_json(const CubicCoeffs& c);
Json to_json(const RegimeInfo& r);
Json to_json(const BifurcationPoint& b);
Json to_json(const std::vector<BifurcationPoint>& points);
Json to_json(const ScenarioReport& r);

std::string branch_to_csv(const std::vector<BranchPoint>& branch);
/// Absent rows print nan for period and max_I.
std::string cycles_to_csv(const std::vector<CycleBranchPoint>& rows);

}  // namespace sirsat::io
