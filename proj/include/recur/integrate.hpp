#pragma once

#include <string>
#include <vector>

#include "recur/model.hpp"

namespace recur {

enum class step_method { explicit_adaptive, implicit_stiff };

struct integrator_config {
    double rtol = 1e-8;
    double atol = 1e-10;
    double max_step = 0.0;   // <= 0: span/1000
    double dense_dt = 0.0;   // <= 0: span/5000
    step_method method = step_method::explicit_adaptive;
    double diverge_norm = 1e8;
};

struct trajectory {
    std::vector<double> times;       // strictly increasing dense grid
    std::vector<vec> states;
    double t_end = 0.0;              // last accepted time (== t1 unless truncated)
    bool diverged = false;
    bool step_failure = false;
    bool switched_implicit = false;
    long steps_accepted = 0;
    long steps_rejected = 0;

    bool truncated() const { return diverged || step_failure; }
    std::vector<double> column(int idx) const;
};

trajectory integrate(const model& m, const vec& p, const vec& x0, double t0, double t1,
                     const integrator_config& cfg = {});

inline trajectory integrate(const std::string& model_id, const vec& p, const vec& x0,
                            double t0, double t1, const integrator_config& cfg = {}) {
    return integrate(get_model(model_id), p, x0, t0, t1, cfg);
}

// max relative energy error for the harmonic test oscillator x''=-x, states (x, x').
// Falls back to absolute error when E(0) is (numerically) zero.
double energy_drift_check(const trajectory& tr);

}  // namespace recur
