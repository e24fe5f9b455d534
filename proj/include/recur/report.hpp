#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "recur/continuation.hpp"
#include "recur/criterion.hpp"
#include "recur/cycle.hpp"
#include "recur/integrate.hpp"
#include "recur/oscillation.hpp"

namespace recur {

// 17 significant digits: doubles round-trip exactly through the CSV files
std::string format_g17(double v);

std::string trajectory_csv(const model& m, const trajectory& tr);
// param,<state_labels...>,re_lambda_1..n,im_lambda_1..n,stability
std::string branch_csv(const model& m, const branch& br);
// param,class,amplitude,period,quiescence_fraction,spike_count
std::string scan_csv(const scan_result& sc);
std::string cycle_csv(const model& m, const limit_cycle& lc);

std::string equilibria_json(const std::vector<equilibrium>& eqs);
std::string events_json(const std::vector<bif_event>& events);
std::string cycle_header_json(const limit_cycle& lc, double proximity);
std::string criterion_report_json(const criterion_report& rep);

// fixed-width table for terminal output
std::string criterion_summary_table(const criterion_report& rep);

struct schema_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// directory holding the shipped schema documents (RECUR_SCHEMA_DIR)
std::string schema_dir();

// checks a document against the named schema file; supports the subset used
// by the shipped schemas: type, properties, required, items, enum,
// additionalProperties. Throws schema_error with a JSON-pointer-ish path.
void validate_schema(const std::string& json_text, const std::string& schema_name);

}  // namespace recur
