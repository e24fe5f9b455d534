#pragma once

#include <string>
#include <utility>
#include <vector>

#include "recur/equilibrium.hpp"
#include "recur/integrate.hpp"
#include "recur/model.hpp"

namespace recur {

enum class osc_class { sustained, damped, none };

const char* to_string(osc_class c);

struct oscillation_record {
    double param = 0.0;
    osc_class cls = osc_class::none;
    double amplitude = 0.0;
    double period = 0.0;
    double decay_ratio = 0.0;  // per-peak geometric amplitude ratio r
    int peak_count = 0;
    double quiescence_fraction = 0.0;
    int spike_count = 0;
    bool integration_failed = false;
    std::string note;
};

// core classifier on a sampled series (already includes the transient; the
// first half is discarded internally)
struct series_class {
    osc_class cls = osc_class::none;
    double r = 0.0;
    int peaks = 0;
    double amplitude = 0.0;
    double period = 0.0;
};

series_class classify_series(const std::vector<double>& t, const std::vector<double>& w);

// throws solver_error when the trajectory carries failure flags
oscillation_record classify_oscillation(const trajectory& tr, int observable,
                                        double settle_fraction = 0.5);

struct recurrence_stats {
    double quiescence_fraction = 0.0;
    int spike_count = 0;
    double mean_interspike = 0.0;
};

recurrence_stats recurrence_metrics(const trajectory& tr, int observable,
                                    double quiescence_band = 0.05);

// initial integration span: 200/|omega| when a Hopf frequency is known, else 500
double hopf_informed_duration(double hopf_imag);

struct cell_options {
    double base_duration = 500.0;
    int max_multiple = 8;  // extension cap: span <= max_multiple * base_duration
    integrator_config integ;
};

// integrate + classify one parameter cell, doubling the span (from the same
// x0) while fewer than 8 peaks are found and the amplitude stays above floor.
// Divergence or step failure is recorded on the cell, never thrown.
oscillation_record classify_cell(const model& m, const vec& p, const vec& x0, int observable,
                                 const cell_options& opt, vec* final_state = nullptr);

struct scan_result {
    std::vector<double> grid;
    std::vector<oscillation_record> records;
    bool has_stop_bracket = false;
    std::pair<double, double> stop_bracket{0.0, 0.0};  // (oscillating, non-oscillating)
};

scan_result scan_parameter(const model& m, const vec& params, const std::string& bif_param,
                           const std::vector<double>& grid, const vec& x0,
                           const cell_options& opt = {});

// classification-flip bisection: width 1e-3 * |initial bracket| or 12 iterations
double find_stop_point(const model& m, const vec& params, const std::string& bif_param,
                       double osc_param, double non_param, const vec& x0,
                       const cell_options& opt = {});

}  // namespace recur
