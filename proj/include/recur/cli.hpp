#pragma once

#include <string>
#include <vector>

#include "recur/integrate.hpp"

namespace recur {

// resolved run configuration: registry defaults, overlaid by a JSON config
// document, overlaid by command-line flags
struct run_config {
    std::string model_id;
    std::vector<std::pair<std::string, double>> params;
    std::string bif_param;
    bool has_range = false;
    double range_lo = 0.0, range_hi = 0.0;
    std::vector<double> grid;
    std::vector<double> x0;
    integrator_config integ;
    bool has_rtol = false, has_atol = false, has_max_step = false, has_dense_dt = false,
         has_method = false;
    std::string out_dir;
};

// document <-> struct; unknown keys are rejected
run_config parse_config_json(const std::string& text);
std::string config_json(const run_config& cfg);

// frontend entry point; args exclude the program name.
// 0 = success, 2 = configuration error, 3 = numerical failure
int run_cli(const std::vector<std::string>& args);

}  // namespace recur
