#pragma once

#include <string>
#include <vector>

#include "recur/equilibrium.hpp"
#include "recur/integrate.hpp"
#include "recur/model.hpp"

namespace recur {

struct limit_cycle {
    std::vector<double> times;  // relative to the cycle start, times.front()==0
    std::vector<vec> points;    // one period; first and last close the loop
    double period = 0.0;
    int observable = 0;
    double obs_min = 0.0;
    double obs_max = 0.0;
};

// Poincare-section extraction: section {observable == modal value, increasing}.
// Integrates until two successive section hits agree within 1e-8 (relative to
// state scale), doubling the span up to 8x. Throws solver_error with kind
// "no_crossings", "no_convergence" or "converged_to_point".
limit_cycle extract_limit_cycle(const model& m, const vec& p, const vec& x0, int observable,
                                double base_duration = 500.0);

// axes mode: min over cycle points of the smallest |coordinate|
double manifold_proximity_axes(const limit_cycle& cyc);

// equilibrium-point mode: min Euclidean distance from the cycle to `point`
double manifold_proximity_point(const limit_cycle& cyc, const vec& point);

// model mode: min over cycle points of the model's critical-manifold distance
double manifold_proximity(const limit_cycle& cyc, const model& m, const vec& p);

}  // namespace recur
