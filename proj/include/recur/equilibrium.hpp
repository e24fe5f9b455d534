#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "recur/eigen.hpp"
#include "recur/model.hpp"

namespace recur {

struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class stability_kind { stable, unstable, saddle };

const char* to_string(stability_kind k);

// stable: all Re < 0; saddle: strictly mixed signs; anything else (including
// zero real parts) is reported unstable.
stability_kind classify_stability(const eigen_spectrum& sp);

struct equilibrium {
    vec state;
    vec params;
    double residual_norm = 0.0;
    eigen_spectrum spectrum;
    stability_kind stability = stability_kind::unstable;
};

// damped Newton (step halving, <= 60 halvings per iteration, <= 200 iterations).
// Throws solver_error on non-convergence or a singular Jacobian.
equilibrium find_equilibrium(const model& m, const vec& p, const vec& seed, double tol = 1e-12);

struct equilibria_scan {
    std::vector<equilibrium> equilibria;  // sorted lexicographically by state, deduplicated
    int failed_seeds = 0;
};

equilibria_scan find_equilibria_scan(const model& m, const vec& p, const std::vector<vec>& seeds,
                                     double tol = 1e-12);

}  // namespace recur
