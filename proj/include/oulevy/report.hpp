#pragma once

#include "oulevy/coupling.hpp"
#include "oulevy/experiments.hpp"
#include "oulevy/suites.hpp"

#include <string>
#include <vector>

namespace oulevy {

inline constexpr const char* decay_csv_header = "t,tv_projection,tv_stderr,tv_coupling_upper,bound_coupling1,bound_z3,seed";
inline constexpr const char* bounds_csv_header = "t,kind,value,params_json";

// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

std::string decay_csv(const DecayTable& table);
std::string bounds_csv(const std::vector<BoundCurve>& curves);
std::string bound_params_json(const BoundParams& params);

// {"times":[],"a":[[]],"dU":[],"t_couple":int|null,"coupled":bool}
std::string transcript_json_line(const CouplingTranscript& transcript);

std::string suite_report_json(const std::vector<SuiteReport>& reports, std::uint64_t seed, std::uint64_t replicas);

} // namespace oulevy
