#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "recur/continuation.hpp"

using namespace recur;

namespace {

equilibrium interior_equilibrium(const model& m, const vec& p) {
    equilibria_scan sc = find_equilibria_scan(m, p, m.seeds(p));
    for (const auto& eq : sc.equilibria) {
        bool positive = true;
        for (double v : eq.state)
            if (v < 1e-6) positive = false;
        if (positive) return eq;
    }
    throw solver_error(m.id + ": no interior equilibrium in scan");
}

std::vector<bif_event> hopf_events(const model& m, const branch& br) {
    std::vector<bif_event> out;
    for (const auto& e : detect_events(m, br))
        if (e.kind == event_kind::hopf) out.push_back(e);
    return out;
}

// synthetic normal forms used across cases
model hopf_normal_form() {
    model m;
    m.id = "hopf-nf-test";
    m.dim = 2;
    m.state_names = {"x", "y"};
    m.params = {{"p", 0.1, false}};
    m.rhs = [](double, const vec& s, const vec& p, vec& d) {
        d[0] = p[0] * s[0] - s[1];
        d[1] = s[0] + p[0] * s[1];
    };
    m.seeds = [](const vec&) { return std::vector<vec>{{0.0, 0.0}}; };
    return m;
}

model fold_normal_form() {
    model m;
    m.id = "fold-nf-test";
    m.dim = 1;
    m.state_names = {"x"};
    m.params = {{"p", 1.0, false}};
    m.rhs = [](double, const vec& s, const vec& p, vec& d) { d[0] = p[0] - s[0] * s[0]; };
    return m;
}

}  // namespace

TEST_CASE("gause branch reproduces the closed form everywhere") {
    const model& m = get_model("gause");
    vec p = m.defaults();
    equilibrium start = find_equilibrium(m, p, {2.0, 9.0});
    branch br = trace_branch(m, p, "eps", 0.0, 0.6, start);
    REQUIRE(br.points.size() > 10);
    double min_eps = 1e9;
    vec at_min_eps;
    for (const auto& pt : br.points) {
        const double eps = pt.param;
        const double xe = eps * 10.0 / (1.0 - eps);
        const double ye = (1.0 - xe / 15.0) * (10.0 + xe);
        CHECK(std::abs(pt.state[0] - xe) < 1e-8);
        CHECK(std::abs(pt.state[1] - ye) < 1e-8);
        if (eps < min_eps) {
            min_eps = eps;
            at_min_eps = pt.state;
        }
    }
    // the trace approaches the singular lower end, where the limit is (0, 10)
    CHECK(min_eps < 1e-4);
    CHECK(dist_inf(at_min_eps, {0.0, 10.0}) < 1e-3);
}

TEST_CASE("gause hopf matches the scalar trace-zero oracle") {
    const model& m = get_model("gause");
    vec p = m.defaults();
    // oracle: bisection on trace(J) along the closed-form equilibrium path
    auto trace_at = [&](double eps) {
        const double xe = eps * 10.0 / (1.0 - eps);
        const double ye = (1.0 - xe / 15.0) * (10.0 + xe);
        mat J(2, 2);
        vec q = apply_param_overrides(m, {{"eps", eps}});
        m.jac({xe, ye}, q, J);
        return J(0, 0) + J(1, 1);
    };
    double lo = 0.1, hi = 0.3;
    REQUIRE(trace_at(lo) > 0.0);
    REQUIRE(trace_at(hi) < 0.0);
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (trace_at(mid) > 0.0 ? lo : hi) = mid;
    }
    const double oracle = 0.5 * (lo + hi);

    equilibrium start = find_equilibrium(m, p, {2.0, 9.0});
    branch br = trace_branch(m, p, "eps", 0.0, 0.6, start);
    auto hopfs = hopf_events(m, br);
    REQUIRE(hopfs.size() == 1);
    CHECK(std::abs(hopfs[0].param_at - oracle) < 1e-6);
    CHECK(hopfs[0].frequency > 0.0);
}

TEST_CASE("hopf location is invariant to the trace starting point") {
    const model& m = get_model("gause");
    auto hopf_from = [&](double eps0) {
        vec p = apply_param_overrides(m, {{"eps", eps0}});
        const double xe = eps0 * 10.0 / (1.0 - eps0);
        const double ye = (1.0 - xe / 15.0) * (10.0 + xe);
        equilibrium start = find_equilibrium(m, p, {xe, ye});
        branch br = trace_branch(m, p, "eps", 0.0, 0.6, start);
        auto hopfs = hopf_events(m, br);
        REQUIRE(hopfs.size() == 1);
        return hopfs[0].param_at;
    };
    const double h1 = hopf_from(0.1);
    const double h2 = hopf_from(0.5);
    CHECK(std::abs(h1 - h2) < 1e-8);
}

TEST_CASE("fear branch has constant state and a moving spectrum") {
    const model& m = get_model("fear");
    vec p = apply_param_overrides(m, {{"eps", 0.3}});
    equilibrium start = interior_equilibrium(m, p);
    branch br = trace_branch(m, p, "eps", 0.001, 0.6, start);
    REQUIRE(br.points.size() > 10);
    double max_dev = 0.0;
    bool saw_stable = false, saw_unstable = false;
    for (const auto& pt : br.points) {
        max_dev = std::max(max_dev, dist_inf(pt.state, start.state));
        if (pt.stability == stability_kind::stable) saw_stable = true;
        if (pt.stability != stability_kind::stable) saw_unstable = true;
    }
    CHECK(max_dev < 1e-8);
    CHECK(saw_stable);    // above the Hopf
    CHECK(saw_unstable);  // below it
    auto hopfs = hopf_events(m, br);
    REQUIRE(hopfs.size() == 1);
    CHECK(hopfs[0].param_at == doctest::Approx(0.4087).epsilon(0.01));
}

TEST_CASE("enso hopf on the nontrivial branch") {
    const model& m = get_model("enso");
    vec p = apply_param_overrides(m, {{"delta", 0.01}});
    std::vector<vec> seeds;
    for (int i = 0; i <= 30; ++i) {
        const double x = -3.0 + 3.0 * i / 30.0;
        seeds.push_back({x, -x * x / 2.0, 0.7 - x / 2.0});
    }
    equilibria_scan sc = find_equilibria_scan(m, p, seeds);
    REQUIRE(sc.equilibria.size() == 2);
    const equilibrium& e1 = dist_inf(sc.equilibria[0].state, {0.0, 0.0, 0.7}) > 0.1
                                ? sc.equilibria[0]
                                : sc.equilibria[1];
    branch br = trace_branch(m, p, "delta", 0.01, 0.4, e1);
    auto hopfs = hopf_events(m, br);
    REQUIRE(hopfs.size() == 1);
    CHECK(std::abs(hopfs[0].param_at - 0.1634) < 0.002);
}

TEST_CASE("foodweb branch shows no eigenvalue crossing near the stop") {
    const model& m = get_model("foodweb");
    vec p = m.defaults();
    equilibrium start = interior_equilibrium(m, p);
    branch br = trace_branch(m, p, "beta", -0.1, 1.0, start);
    REQUIRE(br.points.size() > 10);
    for (const auto& e : detect_events(m, br)) {
        CHECK((e.param_at < -0.032 || e.param_at > -0.012));
        if (e.kind != event_kind::hopf) continue;
        CHECK(e.param_at == doctest::Approx(0.7658).epsilon(0.02));
    }
    // spectrum data exists across the stop neighbourhood
    bool covered = false;
    for (const auto& pt : br.points)
        if (pt.param < -0.03) covered = true;
    CHECK(covered);
}

TEST_CASE("sir-secondary hopf pair") {
    const model& m = get_model("sir-secondary");
    vec p = m.defaults();
    equilibrium start = interior_equilibrium(m, p);
    branch br = trace_branch(m, p, "c3", 0.1, 12.0, start);
    auto hopfs = hopf_events(m, br);
    REQUIRE(hopfs.size() == 2);
    const double a = std::min(hopfs[0].param_at, hopfs[1].param_at);
    const double b = std::max(hopfs[0].param_at, hopfs[1].param_at);
    CHECK(std::abs(a - 0.9523) < 0.01);
    CHECK(std::abs(b - 9.0259) < 0.01);
}

TEST_CASE("refine_hopf") {
    SUBCASE("normal form pinpoints p=0") {
        model m = hopf_normal_form();
        bif_event ev = refine_hopf(m, m.defaults(), "p", -0.5, 0.5);
        CHECK(std::abs(ev.param_at) < 1e-10);
        CHECK(ev.kind == event_kind::hopf);
        CHECK(ev.frequency == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("sir-secondary upper hopf") {
        const model& m = get_model("sir-secondary");
        bif_event ev = refine_hopf(m, m.defaults(), "c3", 8.5, 9.5);
        CHECK(ev.param_at > 9.01);
        CHECK(ev.param_at < 9.04);
    }
    SUBCASE("enso residual at the refined point") {
        const model& m = get_model("enso");
        bif_event ev = refine_hopf(m, m.defaults(), "delta", 0.1, 0.2);
        vec p = apply_param_overrides(m, {{"delta", ev.param_at}});
        equilibrium eq = find_equilibrium(m, p, ev.state_at);
        CHECK(eq.spectrum.has_complex_pair);
        CHECK(std::abs(eq.spectrum.complex_pair_real) < 1e-8);
    }
}

TEST_CASE("fold detection on the saddle-node normal form") {
    model m = fold_normal_form();
    vec p = m.defaults();  // p = 1, equilibrium x = 1
    equilibrium start = find_equilibrium(m, p, {1.0});
    branch br = trace_branch(m, p, "p", -1.0, 1.0, start);
    REQUIRE(br.points.size() > 5);
    auto events = detect_events(m, br);
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == event_kind::fold);
    CHECK(std::abs(events[0].param_at) < 1e-8);
    // the branch traverses the fold onto the unstable sheet
    bool lower_sheet = false;
    for (const auto& pt : br.points)
        if (pt.state[0] < -0.5) lower_sheet = true;
    CHECK(lower_sheet);
}

TEST_CASE("hiv boundary branch crossing is a branch point, not a fold") {
    const model& m = get_model("hiv");
    vec p = apply_param_overrides(m, {{"D", 0.04}});
    equilibrium start = find_equilibrium(m, p, {25.0, 0.0});
    branch br = trace_branch(m, p, "D", 0.01, 0.08, start);
    auto events = detect_events(m, br);
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == event_kind::branch_point);
    CHECK(events[0].param_at == doctest::Approx(0.06).epsilon(1e-6));
}

TEST_CASE("branch_states_at handles folded branches") {
    branch br;
    br.points.resize(3);
    br.points[0].param = 0.0;
    br.points[0].state = {0.0, 0.0};
    br.points[1].param = 1.0;
    br.points[1].state = {1.0, 1.0};
    br.points[2].param = 0.0;
    br.points[2].state = {2.0, 2.0};
    auto states = branch_states_at(br, 0.5);
    REQUIRE(states.size() == 2);
    CHECK(states[0][0] == doctest::Approx(0.5));
    CHECK(states[1][0] == doctest::Approx(1.5));
    CHECK(branch_states_at(br, 2.0).empty());
}

TEST_CASE("event detection is deterministic") {
    const model& m = get_model("gause");
    vec p = m.defaults();
    equilibrium start = find_equilibrium(m, p, {2.0, 9.0});
    branch br = trace_branch(m, p, "eps", 0.0, 0.6, start);
    auto e1 = detect_events(m, br);
    auto e2 = detect_events(m, br);
    REQUIRE(e1.size() == e2.size());
    for (std::size_t i = 0; i < e1.size(); ++i) {
        CHECK(e1[i].param_at == e2[i].param_at);
        CHECK(e1[i].kind == e2[i].kind);
    }
    CHECK(std::string(to_string(event_kind::hopf)) == "Hopf");
    CHECK(std::string(to_string(event_kind::fold)) == "Fold");
    CHECK(std::string(to_string(event_kind::branch_point)) == "BranchPoint");
    CHECK(std::string(to_string(event_kind::oscillation_stop)) == "OscillationStop");
}
