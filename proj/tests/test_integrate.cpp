#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "recur/integrate.hpp"
#include "recur/oscillation.hpp"

using namespace recur;

namespace {

model scalar_decay() {
    model m;
    m.id = "decay-test";
    m.dim = 1;
    m.state_names = {"x"};
    m.params = {{"unused", 0.0, true}};
    m.rhs = [](double, const vec& x, const vec&, vec& d) { d[0] = -x[0]; };
    return m;
}

model harmonic() {
    model m;
    m.id = "harmonic-test";
    m.dim = 2;
    m.state_names = {"x", "v"};
    m.params = {{"unused", 0.0, true}};
    m.rhs = [](double, const vec& x, const vec&, vec& d) {
        d[0] = x[1];
        d[1] = -x[0];
    };
    return m;
}

}  // namespace

TEST_CASE("scalar linear decay hits e^-1") {
    model m = scalar_decay();
    trajectory tr = integrate(m, m.defaults(), {1.0}, 0.0, 1.0);
    REQUIRE_FALSE(tr.truncated());
    CHECK(tr.t_end == doctest::Approx(1.0));
    CHECK(tr.states.back()[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
}

TEST_CASE("dense output grid is uniform and complete") {
    model m = scalar_decay();
    integrator_config cfg;
    cfg.dense_dt = 0.01;
    trajectory tr = integrate(m, m.defaults(), {1.0}, 0.0, 2.0, cfg);
    REQUIRE(tr.times.size() == 201);
    CHECK(tr.times.front() == doctest::Approx(0.0));
    CHECK(tr.times.back() == doctest::Approx(2.0));
    for (std::size_t i = 1; i < tr.times.size(); ++i) {
        CHECK(tr.times[i] > tr.times[i - 1]);
        CHECK(tr.times[i] - tr.times[i - 1] == doctest::Approx(0.01).epsilon(1e-9));
    }
    CHECK(tr.steps_accepted > 0);
    // dense interpolant stays on the true solution, not just at step ends
    for (std::size_t i = 0; i < tr.times.size(); i += 20)
        CHECK(tr.states[i][0] == doctest::Approx(std::exp(-tr.times[i])).epsilon(1e-7));
}

TEST_CASE("vanderpol relaxation period") {
    // reference period at eps=0.01 from a tight-tolerance run of the same
    // system (the eps->0 asymptote 3-2ln2 sits ~18% below at this eps)
    const double reference = 1.9078369567;
    const model& m = get_model("vanderpol");
    vec p = apply_param_overrides(m, {{"eps", 0.01}});
    trajectory tr = integrate(m, p, {2.0, 0.0}, 0.0, 20.0);
    REQUIRE_FALSE(tr.truncated());
    oscillation_record rec = classify_oscillation(tr, 0);
    CHECK(rec.cls == osc_class::sustained);
    CHECK(rec.period == doctest::Approx(reference).epsilon(0.05));
}

TEST_CASE("gause at eps=0 stops oscillating") {
    const model& m = get_model("gause");
    vec p = apply_param_overrides(m, {{"eps", 0.0}});
    trajectory tr = integrate(m, p, {5.0, 10.0}, 0.0, 500.0);
    REQUIRE_FALSE(tr.truncated());
    oscillation_record rec = classify_oscillation(tr, 0);
    CHECK(rec.cls != osc_class::sustained);
}

TEST_CASE("harmonic oscillator energy drift") {
    model m = harmonic();
    integrator_config cfg;
    SUBCASE("tight tolerance") {
        cfg.rtol = 1e-8;
        cfg.atol = 1e-10;
        trajectory tr = integrate(m, m.defaults(), {1.0, 0.0}, 0.0, 100.0, cfg);
        CHECK(energy_drift_check(tr) < 1e-6);
    }
    SUBCASE("loose tolerance") {
        cfg.rtol = 1e-4;
        cfg.atol = 1e-6;
        trajectory tr = integrate(m, m.defaults(), {1.0, 0.0}, 0.0, 100.0, cfg);
        CHECK(energy_drift_check(tr) < 1e-2);
    }
    SUBCASE("zero initial condition") {
        trajectory tr = integrate(m, m.defaults(), {0.0, 0.0}, 0.0, 100.0, cfg);
        CHECK(energy_drift_check(tr) < cfg.atol);
    }
}

TEST_CASE("terminal error shrinks as tolerances shrink") {
    model m = harmonic();
    double prev_err = -1.0;
    for (double rtol : {1e-5, 1e-7, 1e-9}) {
        integrator_config cfg;
        cfg.rtol = rtol;
        cfg.atol = rtol * 1e-2;
        trajectory tr = integrate(m, m.defaults(), {1.0, 0.0}, 0.0, 25.0, cfg);
        const double err = std::abs(tr.states.back()[0] - std::cos(25.0));
        if (prev_err >= 0.0) CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 1e-7);
}

TEST_CASE("ushape trajectory tracks the parabolic slow manifold") {
    const model& m = get_model("ushape");
    vec p = apply_param_overrides(m, {{"eps", 0.005}});
    trajectory tr = integrate(m, p, {2.0, 2.0}, 0.0, 400.0);
    REQUIRE_FALSE(tr.truncated());
    std::size_t on_manifold = 0, total = 0;
    for (std::size_t i = tr.times.size() / 2; i < tr.times.size(); ++i) {
        ++total;
        if (std::abs(tr.states[i][1] - tr.states[i][0] * tr.states[i][0] / 2.0) < 0.05)
            ++on_manifold;
    }
    CHECK(static_cast<double>(on_manifold) / static_cast<double>(total) > 0.5);
}

TEST_CASE("divergence is flagged, not thrown") {
    model m;
    m.id = "blowup-test";
    m.dim = 1;
    m.state_names = {"x"};
    m.params = {{"unused", 0.0, true}};
    m.rhs = [](double, const vec& x, const vec&, vec& d) { d[0] = x[0] * x[0]; };
    trajectory tr = integrate(m, m.defaults(), {1.0}, 0.0, 2.0);  // blows up at t=1
    CHECK(tr.diverged);
    CHECK(tr.truncated());
    CHECK(tr.t_end < 2.0);
    for (const auto& s : tr.states) CHECK(std::isfinite(s[0]));
}

TEST_CASE("stiff rosenbrock path") {
    model m = scalar_decay();
    integrator_config cfg;
    cfg.method = step_method::implicit_stiff;
    trajectory tr = integrate(m, m.defaults(), {1.0}, 0.0, 1.0, cfg);
    REQUIRE_FALSE(tr.truncated());
    CHECK(tr.states.back()[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
}

TEST_CASE("severe stiffness switches to the implicit method") {
    model m;
    m.id = "stiff-test";
    m.dim = 1;
    m.state_names = {"x"};
    m.params = {{"lambda", 1e12, true}};
    m.rhs = [](double t, const vec& x, const vec& p, vec& d) {
        d[0] = -p[0] * (x[0] - std::sin(t));
    };
    trajectory tr = integrate(m, m.defaults(), {0.0}, 0.0, 0.1);
    REQUIRE_FALSE(tr.truncated());
    CHECK(tr.switched_implicit);
    CHECK(tr.states.back()[0] == doctest::Approx(std::sin(0.1)).epsilon(1e-5));
}

TEST_CASE("column extraction") {
    model m = harmonic();
    trajectory tr = integrate(m, m.defaults(), {1.0, 0.0}, 0.0, 1.0);
    auto xs = tr.column(0);
    REQUIRE(xs.size() == tr.times.size());
    CHECK(xs.front() == doctest::Approx(1.0));
    CHECK(xs.back() == doctest::Approx(std::cos(1.0)).epsilon(1e-7));
}
