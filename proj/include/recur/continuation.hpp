#pragma once

#include <string>
#include <vector>

#include "recur/equilibrium.hpp"

namespace recur {

enum class event_kind { hopf, fold, branch_point, oscillation_stop };

const char* to_string(event_kind k);

struct branch_point_rec {
    double param = 0.0;
    vec state;
    eigen_spectrum spectrum;
    stability_kind stability = stability_kind::unstable;
};

struct bif_event {
    event_kind kind = event_kind::hopf;
    double param_at = 0.0;
    vec state_at;
    double test_value = 0.0;  // residual of the defining test function
    double frequency = 0.0;   // Hopf only: |Im| of the critical pair
};

struct arc_config {
    double ds0 = 0.0;     // <= 0: 0.01 * (hi - lo)
    double ds_max = 0.0;  // <= 0: 0.05 * (hi - lo)
    double ds_min = 1e-6;
    int max_points = 40000;
    double lo_gap = 1e-6;  // tracing stops this far above the lower range end
};

struct branch {
    std::string bif_param;
    int param_index = -1;
    vec base_params;
    std::vector<branch_point_rec> points;  // ordered along arclength
    int corrector_failures = 0;
    std::string end_note_lo;
    std::string end_note_hi;
};

// pseudo-arclength trace through `start` in both directions, clipped to [lo, hi]
branch trace_branch(const model& m, const vec& base_params, const std::string& bif_param,
                    double lo, double hi, const equilibrium& start, const arc_config& cfg = {});

// sign-change scan over consecutive branch points; Hopf via Re of the leading
// complex pair, fold/branch-point via det(J); candidates refined by bisection
// to parameter width < 1e-10 * max(1, |param|)
std::vector<bif_event> detect_events(const model& m, const branch& br);

// linear interpolations of the branch state at a parameter value, one per
// straddling segment (a folded branch can cross the same parameter twice)
std::vector<vec> branch_states_at(const branch& br, double a);

// parameter bisection on the leading complex pair's real part; the equilibrium
// is located from the model seed grid at `lo` and continued across the bracket
bif_event refine_hopf(const model& m, const vec& params, const std::string& bif_param, double lo,
                      double hi);

}  // namespace recur
