#pragma once

#include <string>
#include <vector>

#include "recur/continuation.hpp"
#include "recur/cycle.hpp"
#include "recur/oscillation.hpp"

namespace recur {

enum class verdict_kind { recurrence, semi_recurrence, none };
enum class stop_kind_t { sudden_stop, transcritical, saddle_node, no_stop };

const char* to_string(verdict_kind v);
const char* to_string(stop_kind_t k);

struct stop_classification {
    double param_at = 0.0;
    bool eigen_zero_crossing = false;  // (a) real eigenvalue real-part sign change nearby
    bool coinciding_branches = false;  // (b) another branch within 1e-4 at the stop
    bool fold_tangent_reversal = false;
    bool one_sided = false;  // stop at a range/domain boundary
    stop_kind_t kind = stop_kind_t::no_stop;
};

struct c1_evidence {
    bool checked = false;
    bool holds = false;
    int count = 0;          // equilibria found at the probe parameter
    double at_param = 0.0;  // window interior midpoint
};

struct c2_evidence {
    bool checked = false;
    bool holds = false;  // a sudden stop exists
    bool stop_found = false;
    double stop_param = 0.0;
    stop_kind_t kind = stop_kind_t::no_stop;
};

struct c3_evidence {
    bool checked = false;
    bool holds = false;
    std::vector<bif_event> hopf;
};

struct c4_cell {
    double param = 0.0;
    osc_class cls = osc_class::none;
};

struct c4_evidence {
    bool checked = false;
    bool holds = false;
    bool window_defined = false;
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::vector<c4_cell> cells;  // interior grid confirmations
};

struct criterion_report {
    std::string model_id;
    std::string bif_param;
    double range_lo = 0.0;
    double range_hi = 0.0;

    c1_evidence c1;
    c2_evidence c2;
    c3_evidence c3;
    c4_evidence c4;

    verdict_kind verdict = verdict_kind::none;
    stop_kind_t stop_kind = stop_kind_t::no_stop;
    stop_classification stop_detail;

    // semi-recurrence evidence
    bool damped_stop_found = false;
    double damped_stop_param = 0.0;

    // comparison with the older transcritical/saddle-node criterion, which
    // requires an explicit slow-fast form
    bool old_criterion_applies = false;

    std::vector<oscillation_record> scan_records;  // coarse oscillation scan
    std::vector<bif_event> events;                 // merged branch events
    std::vector<std::string> indeterminate;        // stages that failed
    std::vector<std::string> notes;
};

// equilibrium branches traced from seed scans at the range ends and midpoint,
// deduplicated against curves already traced; trace failures go to `notes`
std::vector<branch> trace_all_branches(const model& m, const vec& params,
                                       const std::string& bif_param, double lo, double hi,
                                       std::vector<std::string>* notes = nullptr);

// cell/scan base span: four windows of 200/omega at the fastest Hopf
// frequency, or the 500 default when no Hopf is known
double scan_base_duration(const std::vector<bif_event>& hopfs);

// (a)/(b) test around a located stop; `neighborhood` is the param half-width.
// Branches that end before the stop are extrapolated from their last 5 points.
stop_classification classify_stop_kind(const model& m, const branch& main_branch,
                                       const std::vector<branch>& other_branches,
                                       double stop_param, double neighborhood);

struct window_result {
    double lo = 0.0;
    double hi = 0.0;
    bool empty = true;
    bool continuity = false;
};

// ordered window between a Hopf event and a stop parameter; continuity holds
// iff every scan record strictly inside classifies sustained
window_result window_report(const bif_event& hopf, double stop, const scan_result& scan);

criterion_report check_criterion(const model& m, const vec& params, const std::string& bif_param,
                                 double lo, double hi, const vec& x0, int grid_density = 9);

}  // namespace recur
