#pragma once

#include <string>

#include "json.hpp"
#include "rfde/rough_path.hpp"
#include "rfde/solver.hpp"

namespace rfde {

using Json = nlohmann::json;

/// Decimal rendering with 17 significant digits; round-trips doubles exactly.
std::string format_double(double v);

/// CSV with header t,x1,...,xd and one row per grid point.
void write_path_csv(const SampledPath& path, const std::string& file);
std::string path_to_csv(const SampledPath& path);
SampledPath read_path_csv(const std::string& file);
SampledPath path_from_csv(const std::string& text);

/// Rough path document: times, values (per point), cells (row-major d x d).
Json rough_path_to_json(const RoughPath& rp);
RoughPath rough_path_from_json(const Json& j);
void write_rough_path(const RoughPath& rp, const std::string& file);
RoughPath read_rough_path(const std::string& file);

/// Solution report document; the solved path itself goes to a CSV referenced
/// by name.
Json solution_report_to_json(const SolutionReport& report, const std::string& solution_csv);

void write_json(const Json& j, const std::string& file);
Json read_json(const std::string& file);

}  // namespace rfde
