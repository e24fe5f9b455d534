#pragma once

#include <string>
#include <vector>

#include "recur/continuation.hpp"
#include "recur/integrate.hpp"
#include "recur/oscillation.hpp"

namespace recur {

// bifurcation diagram in the figure conventions used throughout: solid curves
// for stable equilibria, dashed for unstable; red circles at Hopf events, blue
// at oscillation stops, orange at folds/branch points. Sustained scan records
// draw a light amplitude envelope.
std::string render_bifurcation_svg(const model& m, const std::vector<branch>& branches,
                                   const std::vector<bif_event>& events, const scan_result& scan,
                                   int observable);

std::string render_timeseries_svg(const trajectory& tr, int observable,
                                  const std::string& label);

}  // namespace recur
