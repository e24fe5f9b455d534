#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "recur/linalg.hpp"

namespace recur {

struct param_spec {
    std::string name;
    double value = 0.0;       // default
    bool nonnegative = true;  // sign constraint enforced on overrides
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct model {
    std::string id;
    int dim = 0;
    std::vector<std::string> state_names;
    std::vector<param_spec> params;  // ordered schema

    std::string bif_param;             // default bifurcation parameter
    double bif_lo = 0.0, bif_hi = 0.0; // default criterion range
    vec x0;                            // default initial state
    int observable = 0;                // state index used for oscillation scans
    bool log_state = false;            // integrate in log coordinates
    bool explicit_slow_fast = false;   // written with an explicit small parameter
    vec domain_lo, domain_hi;          // soft bounds (+-inf when free)

    std::function<void(double t, const vec& x, const vec& p, vec& dx)> rhs;
    // per-capita right-hand side for log-coordinate integration (optional)
    std::function<void(double t, const vec& x, const vec& p, vec& dx)> rhs_percap;
    std::function<void(const vec& x, const vec& p, mat& J)> jac;  // analytic (optional)
    // equilibrium scan seeds, possibly parameter dependent
    std::function<std::vector<vec>(const vec& p)> seeds;
    // distance from a state to the model's critical manifold
    std::function<double(const vec& x, const vec& p)> manifold_distance;

    vec defaults() const;
    int param_index(const std::string& name) const;  // -1 when unknown
    double param_value(const vec& p, const std::string& name) const;
};

const model& get_model(const std::string& id);  // throws config_error
std::vector<std::string> list_models();

// apply {"name": value} overrides onto defaults; unknown names and sign
// violations raise config_error
vec apply_param_overrides(const model& m, const std::vector<std::pair<std::string, double>>& kv);

mat jacobian_fd(const model& m, const vec& x, const vec& p);
mat jacobian(const model& m, const vec& x, const vec& p);  // analytic if present

}  // namespace recur
