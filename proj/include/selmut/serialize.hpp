#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "selmut/dynamics.hpp"
#include "selmut/limits.hpp"
#include "selmut/measure.hpp"
#include "selmut/verify.hpp"

namespace selmut {

using json = nlohmann::json;

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

json measure_to_json(const Measure& u);
Measure measure_from_json(const json& j, double bound = kInf);

/// CSV with header "x,m", ascending x.
void write_measure_csv(std::ostream& os, const Measure& u);
Measure read_measure_csv(std::istream& is, double bound = kInf);

json limit_to_json(const LimitResult& limit);
json report_to_json(const CheckReport& report);

const char* to_string(LimitCase c);
const char* to_string(StopReason r);

/// Columns: iteration, tv_delta, mean_fitness, atom_mass_at_M, cycle_time
/// (cycle_time empty for non-Lenski models).
void write_diagnostics_csv(std::ostream& os, const Trajectory& trajectory);

}  // namespace selmut
