#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "recur/model.hpp"

using namespace recur;

namespace {

vec rhs_at(const model& m, const vec& p, const vec& x) {
    vec d(static_cast<std::size_t>(m.dim), 0.0);
    m.rhs(0.0, x, p, d);
    return d;
}

}  // namespace

TEST_CASE("registry lists the expected models") {
    auto ids = list_models();
    auto has = [&](const char* id) {
        return std::find(ids.begin(), ids.end(), id) != ids.end();
    };
    CHECK(ids.size() == 10);
    CHECK(has("gause"));
    CHECK(has("goodwin"));
    CHECK(has("enso"));
    CHECK(has("vanderpol"));
    CHECK(has("ushape"));
    CHECK(has("hiv"));
    CHECK(has("sir-epidemic"));
    CHECK(has("sir-secondary"));
    CHECK(has("fear"));
    CHECK(has("foodweb"));
    CHECK(get_model("gause").dim == 2);
    CHECK(get_model("goodwin").dim == 6);
    CHECK(get_model("enso").dim == 3);
    CHECK_THROWS_AS((void)get_model("nosuchmodel"), config_error);
}

TEST_CASE("gause closed-form equilibrium zeroes the vector field") {
    const model& m = get_model("gause");
    vec p = m.defaults();  // eps defaults to 0.2
    const double eps = m.param_value(p, "eps");
    const double a = m.param_value(p, "a"), c = m.param_value(p, "c");
    const double mm = m.param_value(p, "m"), r = m.param_value(p, "r");
    const double K = m.param_value(p, "K");
    const double xe = eps * a / (c * mm - eps);
    const double ye = r / mm * (1.0 - xe / K) * (a + xe);
    CHECK(xe == doctest::Approx(2.5));
    CHECK(ye == doctest::Approx(125.0 / 12.0));
    vec d = rhs_at(m, p, {xe, ye});
    CHECK(std::abs(d[0]) < 1e-12);
    CHECK(std::abs(d[1]) < 1e-12);
}

TEST_CASE("enso trivial equilibrium (0, 0, k)") {
    const model& m = get_model("enso");
    vec p = m.defaults();
    vec d = rhs_at(m, p, {0.0, 0.0, 0.7});
    CHECK(std::abs(d[0]) < 1e-14);
    CHECK(std::abs(d[1]) < 1e-14);
    CHECK(std::abs(d[2]) < 1e-14);
}

TEST_CASE("hiv infection-free state (1/D, 0)") {
    const model& m = get_model("hiv");
    for (double D : {0.03, 0.057, 0.08}) {
        vec p = apply_param_overrides(m, {{"D", D}});
        vec d = rhs_at(m, p, {1.0 / D, 0.0});
        CHECK(std::abs(d[0]) < 1e-14);
        CHECK(std::abs(d[1]) < 1e-14);
    }
}

TEST_CASE("finite-difference jacobian is exact on a linear system") {
    model m;
    m.id = "linear-test";
    m.dim = 3;
    m.state_names = {"u", "v", "w"};
    m.params = {{"unused", 0.0, true}};
    const double A[3][3] = {{0.5, -2.0, 1.0}, {3.0, 0.0, -1.5}, {0.25, 1.0, -4.0}};
    m.rhs = [&A](double, const vec& x, const vec&, vec& d) {
        for (int i = 0; i < 3; ++i)
            d[static_cast<std::size_t>(i)] =
                A[i][0] * x[0] + A[i][1] * x[1] + A[i][2] * x[2];
    };
    mat J = jacobian_fd(m, {0.3, -1.2, 2.0}, m.defaults());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(J(i, j) == doctest::Approx(A[i][j]).epsilon(1e-9));
}

TEST_CASE("vanderpol jacobian at the origin") {
    const model& m = get_model("vanderpol");
    vec p = apply_param_overrides(m, {{"eps", 0.01}});
    mat J(2, 2);
    m.jac({0.0, 0.0}, p, J);
    CHECK(J(0, 0) == doctest::Approx(100.0));
    CHECK(J(0, 1) == doctest::Approx(100.0));
    CHECK(J(1, 0) == doctest::Approx(-1.0));
    CHECK(J(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("analytic jacobians agree with finite differences") {
    // two step sizes implied: jacobian_fd uses a scaled central difference,
    // and agreement at 1e-6 over different states rules out a wrong entry
    for (const char* id : {"gause", "fear", "foodweb", "enso", "goodwin"}) {
        const model& m = get_model(id);
        if (!m.jac) continue;
        vec p = m.defaults();
        vec x(static_cast<std::size_t>(m.dim));
        for (int i = 0; i < m.dim; ++i) x[static_cast<std::size_t>(i)] = 0.7 + 0.31 * i;
        mat Ja(m.dim, m.dim);
        m.jac(x, p, Ja);
        mat Jf = jacobian_fd(m, x, p);
        for (int i = 0; i < m.dim; ++i)
            for (int j = 0; j < m.dim; ++j)
                CHECK(Ja(i, j) == doctest::Approx(Jf(i, j)).epsilon(1e-6));
    }
}

TEST_CASE("parameter override plumbing") {
    const model& m = get_model("gause");
    vec p = apply_param_overrides(m, {{"eps", 0.05}, {"K", 20.0}});
    CHECK(m.param_value(p, "eps") == 0.05);
    CHECK(m.param_value(p, "K") == 20.0);
    CHECK(m.param_value(p, "r") == 1.0);  // untouched default
    CHECK(m.param_index("eps") == 5);
    CHECK(m.param_index("bogus") == -1);
    CHECK_THROWS_AS((void)apply_param_overrides(m, {{"bogus", 1.0}}), config_error);
    CHECK_THROWS_AS((void)apply_param_overrides(m, {{"K", -3.0}}), config_error);
    // eps carries no sign constraint (stop brackets probe below zero)
    CHECK_NOTHROW((void)apply_param_overrides(m, {{"eps", -0.01}}));
}

TEST_CASE("fear equilibria are independent of eps") {
    const model& m = get_model("fear");
    // boundary equilibrium at ((1 - d1)/gamma, 0) = (8, 0) with defaults
    for (double eps : {0.05, 0.1, 0.3}) {
        vec p = apply_param_overrides(m, {{"eps", eps}});
        vec d = rhs_at(m, p, {8.0, 0.0});
        CHECK(std::abs(d[0]) < 1e-12);
        CHECK(std::abs(d[1]) < 1e-12);
        vec d0 = rhs_at(m, p, {0.0, 0.0});
        CHECK(std::abs(d0[0]) < 1e-14);
        CHECK(std::abs(d0[1]) < 1e-14);
    }
}

TEST_CASE("registry metadata is coherent") {
    for (const auto& id : list_models()) {
        const model& m = get_model(id);
        CHECK(m.dim >= 2);
        CHECK(static_cast<int>(m.state_names.size()) == m.dim);
        CHECK(static_cast<int>(m.x0.size()) == m.dim);
        CHECK(m.param_index(m.bif_param) >= 0);
        CHECK(m.bif_hi > m.bif_lo);
        CHECK(m.observable >= 0);
        CHECK(m.observable < m.dim);
        REQUIRE(m.rhs);
        vec p = m.defaults();
        CHECK(p.size() == m.params.size());
        // rhs is evaluable at x0 without blowing up
        vec d = rhs_at(m, p, m.x0);
        for (double v : d) CHECK(std::isfinite(v));
    }
}
