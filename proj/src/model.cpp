#include "recur/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace recur {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double bisect_increasing(const std::function<double(double)>& g, double lo, double hi) {
    double flo = g(lo);
    if (flo > 0.0) return lo;
    for (int i = 0; i < 200 && g(hi) < 0.0; ++i) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0) lo = mid; else hi = mid;
        if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

double axis_distance(const vec& x) {
    double d = kInf;
    for (double v : x) d = std::min(d, std::abs(v));
    return d;
}

model make_ushape() {
    model m;
    m.id = "ushape";
    m.dim = 2;
    m.state_names = {"x", "y"};
    m.params = {{"eps", 0.005, true}};
    m.bif_param = "eps";
    m.bif_lo = 0.001;
    m.bif_hi = 0.1;
    m.x0 = {2.0, 2.0};
    m.observable = 0;
    m.explicit_slow_fast = true;
    m.domain_lo = {-kInf, -kInf};
    m.domain_hi = {kInf, kInf};
    m.rhs = [](double, const vec& s, const vec& p, vec& d) {
        d[0] = s[1] - s[0] * s[0] / 2.0;
        d[1] = -p[0] * s[0] * (1.0 + s[0] * s[0]);
    };
    m.jac = [](const vec& s, const vec& p, mat& J) {
        J(0, 0) = -s[0];
        J(0, 1) = 1.0;
        J(1, 0) = -p[0] * (1.0 + 3.0 * s[0] * s[0]);
        J(1, 1) = 0.0;
    };
    m.seeds = [](const vec&) { return std::vector<vec>{{0.0, 0.0}, {1.0, 0.5}}; };
    m.manifold_distance = [](const vec& s, const vec&) {
        return std::abs(s[1] - s[0] * s[0] / 2.0);
    };
    return m;
}

model make_vanderpol() {
    model m;
    m.id = "vanderpol";
    m.dim = 2;
    m.state_names = {"x", "y"};
    m.params = {{"eps", 0.01, true}};
    m.bif_param = "eps";
    m.bif_lo = 0.001;
    m.bif_hi = 0.1;
    m.x0 = {2.0, 0.0};
    m.observable = 0;
    m.explicit_slow_fast = true;
    m.domain_lo = {-kInf, -kInf};
    m.domain_hi = {kInf, kInf};
    m.rhs = [](double, const vec& s, const vec& p, vec& d) {
        d[0] = (s[0] - s[0] * s[0] * s[0] / 3.0 + s[1]) / p[0];
        d[1] = -s[0];
    };
    m.jac = [](const vec& s, const vec& p, mat& J) {
        J(0, 0) = (1.0 - s[0] * s[0]) / p[0];
        J(0, 1) = 1.0 / p[0];
        J(1, 0) = -1.0;
        J(1, 1) = 0.0;
    };
    m.seeds = [](const vec&) { return std::vector<vec>{{0.0, 0.0}, {0.5, -0.5}}; };
    m.manifold_distance = [](const vec& s, const vec&) {
        return std::abs(s[1] - (s[0] * s[0] * s[0] / 3.0 - s[0]));
    };
    return m;
}

model make_hiv() {
    model m;
    m.id = "hiv";
    m.dim = 2;
    m.state_names = {"x", "y"};
    m.params = {{"A", 0.364, true}, {"B", 0.06, true}, {"C", 0.823, true}, {"D", 0.057, true}};
    m.bif_param = "D";
    m.bif_lo = 0.01;
    m.bif_hi = 0.08;
    m.x0 = {5.0, 13.0};
    m.observable = 1;
    m.domain_lo = {0.0, 0.0};
    m.domain_hi = {kInf, kInf};
    m.rhs = [](double, const vec& s, const vec& p, vec& d) {
        const double phi = p[1] + p[0] * s[1] / (s[1] + p[2]);
        d[0] = 1.0 - p[3] * s[0] - phi * s[0] * s[1];
        d[1] = phi * s[0] * s[1] - s[1];
    };
    m.jac = [](const vec& s, const vec& p, mat& J) {
        const double phi = p[1] + p[0] * s[1] / (s[1] + p[2]);
        const double dphi = p[0] * p[2] / ((s[1] + p[2]) * (s[1] + p[2]));
        const double dy = s[0] * (dphi * s[1] + phi);
        J(0, 0) = -p[3] - phi * s[1];
        J(0, 1) = -dy;
        J(1, 0) = phi * s[1];
        J(1, 1) = dy - 1.0;
    };
    m.seeds = [](const vec& p) {
        std::vector<vec> out;
        out.push_back({1.0 / p[3], 0.0});
        // interior equilibria: x=(1-y)/D with phi(y)(1-y)=D, y in (0,1)
        auto g = [&](double y) {
            const double phi = p[1] + p[0] * y / (y + p[2]);
            return phi * (1.0 - y) - p[3];
        };
        double yprev = 1e-5, gprev = g(yprev);
        for (int i = 1; i <= 400; ++i) {
            const double y = 1e-5 + (1.0 - 2e-5) * i / 400.0;
            const double gy = g(y);
            if (gprev == 0.0 || gprev * gy < 0.0) {
                double lo = yprev, hi = y;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (g(lo) * g(mid) <= 0.0) hi = mid; else lo = mid;
                }
                const double yr = 0.5 * (lo + hi);
                out.push_back({(1.0 - yr) / p[3], yr});
            }
            yprev = y;
            gprev = gy;
        }
        return out;
    };
    m.manifold_distance = [](const vec& s, const vec&) { return axis_distance(s); };
    return m;
}

model make_gause() {
    model m;
    m.id = "gause";
    m.dim = 2;
    m.state_names = {"x", "y"};
    m.params = {{"r", 1.0, true}, {"K", 15.0, true}, {"m", 1.0, true},
                {"a", 10.0, true}, {"c", 1.0, true}, {"eps", 0.2, false}};
    m.bif_param = "eps";
    m.bif_lo = 0.0;
    m.bif_hi = 0.6;
    m.x0 = {5.0, 10.0};
    m.observable = 0;
    m.domain_lo = {0.0, 0.0};
    m.domain_hi = {kInf, kInf};
    m.rhs = [](double, const vec& s, const vec& p, vec& d) {
        const double pred = p[2] * s[0] / (p[3] + s[0]);
        d[0] = p[0] * s[0] * (1.0 - s[0] / p[1]) - s[1] * pred;
        d[1] = s[1] * (-p[5] + p[4] * pred);
    };
    m.jac = [](const vec& s, const vec& p, mat& J) {
        const double pred = p[2] * s[0] / (p[3] + s[0]);
        const double dpred = p[2] * p[3] / ((p[3] + s[0]) * (p[3] + s[0]));
        J(0, 0) = p[0] * (1.0 - 2.0 * s[0] / p[1]) - s[1] * dpred;
        J(0, 1) = -pred;
        J(1, 0) = s[1] * p[4] * dpred;
        J(1, 1) = -p[5] + p[4] * pred;
    };
    m.seeds = [](const vec& p) {
        std::vector<vec> out{{0.0, 0.0}, {p[1], 0.0}};
        const double cm = p[4] * p[2];
        if (p[5] > 0.0 && p[5] < cm) {
            const double xe = p[5] * p[3] / (cm - p[5]);
            const double ye = p[0] / p[2] * (1.0 - xe / p[1]) * (p[3] + xe);
            out.push_back({xe, ye});
        }
        out.push_back({5.0, 10.0});
        return out;
    };
    m.manifold_distance = [](const vec& s, const vec& p) {
        // fast nullcline: x = 0 together with y = (r/m)(1 - x/K)(a + x)
        const double par = p[0] / p[2] * (1.0 - s[0] / p[1]) * (p[3] + s[0]);
        return std::min(std::abs(s[0]), std::abs(s[1] - par));
    };
    return m;
}

model make_sir_epidemic() {
    model m;
    m.id = "sir-epidemic";
    m.dim = 3;
    m.state_names = {"S", "I", "N"};
    m.params = {{"alpha", 0.048, true}, {"beta", 1.0, true}, {"gamma", 0.75, true},
                {"d", 0.2, true},      {"p", 0.01, true},   {"K", 0.1, true},
                {"Nstar", 400.0, true}, {"eps", 0.005, true}};
    m.bif_param = "eps";
    m.bif_lo = 0.0;
    m.bif_hi = 0.02;
    m.x0 = {40.0, 20.0, 150.0};
    m.observable = 1;
    m.explicit_slow_fast = true;
    m.domain_lo = {0.0, 0.0, 0.0};
    m.domain_hi = {kInf, kInf, kInf};
    m.rhs = [](double, const vec& s, const vec& p, vec& d) {
        const double a = p[3] + p[0] + p[2];
        const double h = p[1] * s[0] / (p[5] + s[0]);
        const double g = s[2] * (1.0 - s[2] / p[6]);
        d[0] = p[3] * s[2] + p[7] * g - h * s[1] - (p[3] + p[4]) * s[0];
        d[1] = h * s[1] - a * s[1];
        d[2] = p[7] * g - p[0] * s[1];
    };
    m.jac = [](const vec& s, const vec& p, mat& J) {
        const double a = p[3] + p[0] + p[2];
        const double h = p[1] * s[0] / (p[5] + s[0]);
        const double dh = p[1] * p[5] / ((p[5] + s[0]) * (p[5] + s[0]));
        const double dg = 1.0 - 2.0 * s[2] / p[6];
        J(0, 0) = -dh * s[1] - (p[3] + p[4]);
        J(0, 1) = -h;
        J(0, 2) = p[3] + p[7] * dg;
        J(1, 0) = dh * s[1];
        J(1, 1) = h - a;
        J(1, 2) = 0.0;
        J(2, 0) = 0.0;
        J(2, 1) = -p[0];
        J(2, 2) = p[7] * dg;
    };
    m.seeds = [](const vec& p) {
        const double a = p[3] + p[0] + p[2];
        std::vector<vec> out{{0.0, 0.0, 0.0}};
        out.push_back({p[3] * p[6] / (p[3] + p[4]), 0.0, p[6]});
        if (p[1] > a) {
            const double se = p[5] * a / (p[1] - a);
            out.push_back({se, 5.0, 100.0});
            out.push_back({se, 20.0, 200.0});
            out.push_back({se, 40.0, 350.0});
        }
        return out;
    };
    m.manifold_distance = [](const vec& s, const vec&) { return axis_distance(s); };
    return m;
}

model make_fear() {
    model m;
    m.id = "fear";
    m.dim = 2;
    m.state_names = {"x", "y"};
    m.params = {{"d1", 0.2, true}, {"d2", 0.1, true}, {"kappa", 5.0, true},
                {"gamma", 0.1, true}, {"theta", 2.0, true}, {"eps", 0.1, true}};
    m.bif_param = "eps";
    m.bif_lo = 0.0;
    m.bif_hi = 0.6;
    m.x0 = {0.2, 0.9};
    m.observable = 0;
    m.explicit_slow_fast = true;
    m.domain_lo = {0.0, 0.0};
    m.domain_hi = {kInf, kInf};
    m.rhs = [](double, const vec& s, const vec& p, vec& d) {
        const double F = (1.0 + s[0]) / (1.0 + s[0] + p[2] * s[1]) - p[0] - p[3] * s[0];
        const double G = s[0] / (p[4] + s[1] + s[0]) - p[1];
        d[0] = s[0] * F;
        d[1] = p[5] * s[1] * G;
    };
    m.jac = [](const vec& s, const vec& p, mat& J) {
        const double den = 1.0 + s[0] + p[2] * s[1];
        const double F = (1.0 + s[0]) / den - p[0] - p[3] * s[0];
        const double Fx = p[2] * s[1] / (den * den) - p[3];
        const double Fy = -p[2] * (1.0 + s[0]) / (den * den);
        const double den2 = p[4] + s[1] + s[0];
        const double G = s[0] / den2 - p[1];
        const double Gx = (p[4] + s[1]) / (den2 * den2);
        const double Gy = -s[0] / (den2 * den2);
        J(0, 0) = F + s[0] * Fx;
        J(0, 1) = s[0] * Fy;
        J(1, 0) = p[5] * s[1] * Gx;
        J(1, 1) = p[5] * (G + s[1] * Gy);
    };
    m.seeds = [](const vec& p) {
        std::vector<vec> out{{0.0, 0.0}};
        if (p[3] > 0.0) out.push_back({(1.0 - p[0]) / p[3], 0.0});
        // interior: x = d2(theta+y)/(1-d2) on G=0, then F=0 gives scalar in y
        auto xi = [&](double y) { return p[1] * (p[4] + y) / (1.0 - p[1]); };
        auto h = [&](double y) {
            const double x = xi(y);
            return (1.0 + x) / (1.0 + x + p[2] * y) - p[0] - p[3] * x;
        };
        double yprev = 1e-4, hprev = h(yprev);
        for (int i = 1; i <= 300; ++i) {
            const double y = 1e-4 + (30.0 - 1e-4) * i / 300.0;
            const double hy = h(y);
            if (hprev * hy < 0.0) {
                double lo = yprev, hi = y;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (h(lo) * h(mid) <= 0.0) hi = mid; else lo = mid;
                }
                const double yr = 0.5 * (lo + hi);
                out.push_back({xi(yr), yr});
            }
            yprev = y;
            hprev = hy;
        }
        return out;
    };
    m.manifold_distance = [](const vec& s, const vec&) { return axis_distance(s); };
    return m;
}

model make_foodweb() {
    model m;
    m.id = "foodweb";
    m.dim = 3;
    m.state_names = {"x", "y", "z"};
    m.params = {{"alpha", 2.5, true}, {"gbar", 1.0, true}, {"gamma", 0.25, true},
                {"delta", 1.0, true}, {"d1", 0.5, true},   {"d2", 0.26, true},
                {"beta", 0.2, false}};
    m.bif_param = "beta";
    m.bif_lo = -0.1;
    m.bif_hi = 1.0;
    m.x0 = {1.0, 1.0, 1.0};
    m.observable = 1;
    m.log_state = true;
    m.domain_lo = {0.0, 0.0, 0.0};
    m.domain_hi = {kInf, kInf, kInf};
    m.rhs = [](double, const vec& s, const vec& p, vec& d) {
        d[0] = s[0] * (1.0 - s[0] - s[1] - p[1] * s[2]);
        d[1] = s[1] * (-p[4] + p[0] * s[0] - p[6] * s[2]);
        d[2] = s[2] * (-p[5] + p[2] * s[0] + p[3] * s[1]);
    };
    m.rhs_percap = [](double, const vec& s, const vec& p, vec& d) {
        d[0] = 1.0 - s[0] - s[1] - p[1] * s[2];
        d[1] = -p[4] + p[0] * s[0] - p[6] * s[2];
        d[2] = -p[5] + p[2] * s[0] + p[3] * s[1];
    };
    m.jac = [](const vec& s, const vec& p, mat& J) {
        J(0, 0) = 1.0 - 2.0 * s[0] - s[1] - p[1] * s[2];
        J(0, 1) = -s[0];
        J(0, 2) = -p[1] * s[0];
        J(1, 0) = p[0] * s[1];
        J(1, 1) = -p[4] + p[0] * s[0] - p[6] * s[2];
        J(1, 2) = -p[6] * s[1];
        J(2, 0) = p[2] * s[2];
        J(2, 1) = p[3] * s[2];
        J(2, 2) = -p[5] + p[2] * s[0] + p[3] * s[1];
    };
    m.seeds = [](const vec& p) {
        std::vector<vec> out{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
        if (p[0] > 0.0) out.push_back({p[4] / p[0], 1.0 - p[4] / p[0], 0.0});
        // interior: the bracket terms form a linear system
        mat A(3, 3);
        A(0, 0) = 1.0;  A(0, 1) = 1.0;  A(0, 2) = p[1];
        A(1, 0) = p[0]; A(1, 1) = 0.0;  A(1, 2) = -p[6];
        A(2, 0) = p[2]; A(2, 1) = p[3]; A(2, 2) = 0.0;
        vec x;
        if (solve_linear(A, {1.0, p[4], p[5]}, x)) out.push_back(x);
        return out;
    };
    m.manifold_distance = [](const vec& s, const vec&) { return axis_distance(s); };
    return m;
}

model make_enso() {
    model m;
    m.id = "enso";
    m.dim = 3;
    m.state_names = {"x", "y", "z"};
    m.params = {{"a", 2.0, true}, {"c", 1.4, true}, {"k", 0.7, true},
                {"rho", 0.01, true}, {"delta", 0.1, true}};
    m.bif_param = "delta";
    m.bif_lo = 0.0;
    m.bif_hi = 0.4;
    m.x0 = {-0.001, -0.4, 0.8};
    m.observable = 0;
    m.explicit_slow_fast = true;
    m.domain_lo = {-kInf, -kInf, 0.0};
    m.domain_hi = {0.0, kInf, kInf};
    m.rhs = [](double, const vec& s, const vec& p, vec& d) {
        const double T = std::tanh(s[0] + s[2]);
        d[0] = s[0] * (s[0] + s[1] + p[1] * (1.0 - T)) + p[3] * p[4] * (s[0] * s[0] - p[0] * s[0]);
        d[1] = -p[3] * p[4] * (p[0] * s[1] + s[0] * s[0]);
        d[2] = p[4] * (p[2] - s[2] - s[0] / 2.0);
    };
    m.jac = [](const vec& s, const vec& p, mat& J) {
        const double T = std::tanh(s[0] + s[2]);
        const double dT = 1.0 - T * T;
        J(0, 0) = 2.0 * s[0] + s[1] + p[1] * (1.0 - T) - s[0] * p[1] * dT +
                  p[3] * p[4] * (2.0 * s[0] - p[0]);
        J(0, 1) = s[0];
        J(0, 2) = -s[0] * p[1] * dT;
        J(1, 0) = -2.0 * p[3] * p[4] * s[0];
        J(1, 1) = -p[3] * p[4] * p[0];
        J(1, 2) = 0.0;
        J(2, 0) = -p[4] / 2.0;
        J(2, 1) = 0.0;
        J(2, 2) = -p[4];
    };
    m.seeds = [](const vec& p) {
        std::vector<vec> out;
        for (int i = 0; i <= 10; ++i) {
            const double x = -3.0 * i / 10.0;
            out.push_back({x, -x * x / p[0], p[2] - x / 2.0});
        }
        return out;
    };
    m.manifold_distance = [](const vec& s, const vec&) { return std::abs(s[0]); };
    return m;
}

model make_goodwin() {
    model m;
    m.id = "goodwin";
    m.dim = 6;
    m.state_names = {"S1", "S2", "S3", "S4", "S5", "S6"};
    m.params = {{"alpha", 1.0, true}, {"K", 50.0, true}, {"rho", 9.0, true},
                {"b1", 1.0, true}, {"b2", 1.0, true}, {"b3", 1.0, true},
                {"b4", 1.0, true}, {"b5", 1.0, true}, {"b6", 1.0, true}};
    m.bif_param = "b6";
    m.bif_lo = 0.01;
    m.bif_hi = 45.0;
    m.x0 = vec(6, 0.0);
    m.observable = 0;
    m.domain_lo = vec(6, 0.0);
    m.domain_hi = vec(6, kInf);
    m.rhs = [](double, const vec& s, const vec& p, vec& d) {
        d[0] = p[1] / (1.0 + p[0] * std::pow(s[5], p[2])) - p[3] * s[0];
        for (int i = 1; i < 6; ++i) d[i] = p[2 + i] * s[i - 1] - p[3 + i] * s[i];
    };
    m.jac = [](const vec& s, const vec& p, mat& J) {
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) J(i, j) = 0.0;
        const double u = std::pow(s[5], p[2] - 1.0);
        const double den = 1.0 + p[0] * u * s[5];
        J(0, 0) = -p[3];
        J(0, 5) = -p[1] * p[0] * p[2] * u / (den * den);
        for (int i = 1; i < 6; ++i) {
            J(i, i - 1) = p[2 + i];
            J(i, i) = -p[3 + i];
        }
    };
    m.seeds = [](const vec& p) {
        // cascade equilibrium: b6*u*(1 + alpha*u^rho) = K with u = S6
        auto g = [&](double u) { return p[8] * u * (1.0 + p[0] * std::pow(u, p[2])) - p[1]; };
        const double u = bisect_increasing(g, 0.0, std::max(1.0, p[1] / std::max(p[8], 1e-12)));
        vec s(6);
        const double inflow = p[8] * u;  // = b1*S1 at equilibrium
        for (int i = 0; i < 5; ++i) s[i] = inflow / p[3 + i];
        s[5] = u;
        return std::vector<vec>{s};
    };
    m.manifold_distance = [](const vec& s, const vec&) { return axis_distance(s); };
    return m;
}

model make_sir_secondary() {
    model m;
    m.id = "sir-secondary";
    m.dim = 3;
    m.state_names = {"x", "y", "z"};
    m.params = {{"c1", 1.0, true}, {"c2", 5.0, true}, {"c3", 4.0, true}, {"c4", 90.0, true}};
    m.bif_param = "c3";
    m.bif_lo = 0.1;
    m.bif_hi = 12.0;
    m.x0 = {0.09777, 0.02081, 1.04290};
    m.observable = 1;
    m.explicit_slow_fast = true;
    m.domain_lo = {0.0, 0.0, 0.0};
    m.domain_hi = {kInf, kInf, kInf};
    m.rhs = [](double, const vec& s, const vec& p, vec& d) {
        d[0] = (s[0] + s[1]) * (1.0 - s[0] - s[1]) - p[0] * s[0] * s[1] - s[0] * s[2];
        d[1] = p[0] * s[0] * s[1] + s[0] * s[2] - p[1] * s[1];
        d[2] = p[2] * (p[3] * s[1] - s[2]);
    };
    m.jac = [](const vec& s, const vec& p, mat& J) {
        J(0, 0) = 1.0 - 2.0 * s[0] - 2.0 * s[1] - p[0] * s[1] - s[2];
        J(0, 1) = 1.0 - 2.0 * s[0] - 2.0 * s[1] - p[0] * s[0];
        J(0, 2) = -s[0];
        J(1, 0) = p[0] * s[1] + s[2];
        J(1, 1) = p[0] * s[0] - p[1];
        J(1, 2) = s[0];
        J(2, 0) = 0.0;
        J(2, 1) = p[2] * p[3];
        J(2, 2) = -p[2];
    };
    m.seeds = [](const vec& p) {
        std::vector<vec> out{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
        // endemic pair: x* = c2/(c1+c4), then s = x+y solves
        // s^2 + s(kappa*x - 1) - kappa*x^2 = 0 with kappa = c1+c4
        const double kappa = p[0] + p[3];
        if (kappa > 0.0) {
            const double xs = p[1] / kappa;
            const double b = kappa * xs - 1.0;
            const double disc = b * b + 4.0 * kappa * xs * xs;
            const double root = std::sqrt(disc);
            for (double sgn : {1.0, -1.0}) {
                const double s = 0.5 * (-b + sgn * root);
                out.push_back({xs, s - xs, p[3] * (s - xs)});
            }
        }
        return out;
    };
    m.manifold_distance = [](const vec& s, const vec&) { return axis_distance(s); };
    return m;
}

const std::vector<model>& registry() {
    static const std::vector<model> models = [] {
        std::vector<model> v;
        v.push_back(make_ushape());
        v.push_back(make_vanderpol());
        v.push_back(make_hiv());
        v.push_back(make_gause());
        v.push_back(make_sir_epidemic());
        v.push_back(make_fear());
        v.push_back(make_foodweb());
        v.push_back(make_enso());
        v.push_back(make_goodwin());
        v.push_back(make_sir_secondary());
        for (const auto& m : v) {
            for (const auto& ps : m.params)
                if (ps.nonnegative && ps.value < 0.0)
                    throw std::logic_error(m.id + ": negative default for " + ps.name);
            if (static_cast<int>(m.x0.size()) != m.dim)
                throw std::logic_error(m.id + ": bad default state size");
        }
        return v;
    }();
    return models;
}

}  // namespace

vec model::defaults() const {
    vec p(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) p[i] = params[i].value;
    return p;
}

int model::param_index(const std::string& name) const {
    for (std::size_t i = 0; i < params.size(); ++i)
        if (params[i].name == name) return static_cast<int>(i);
    return -1;
}

double model::param_value(const vec& p, const std::string& name) const {
    const int i = param_index(name);
    if (i < 0) throw config_error(id + ": unknown parameter " + name);
    return p[static_cast<std::size_t>(i)];
}

const model& get_model(const std::string& id) {
    for (const auto& m : registry())
        if (m.id == id) return m;
    throw config_error("unknown model: " + id);
}

std::vector<std::string> list_models() {
    std::vector<std::string> out;
    for (const auto& m : registry()) out.push_back(m.id);
    return out;
}

vec apply_param_overrides(const model& m, const std::vector<std::pair<std::string, double>>& kv) {
    vec p = m.defaults();
    for (const auto& [name, value] : kv) {
        const int i = m.param_index(name);
        if (i < 0) throw config_error(m.id + ": unknown parameter " + name);
        if (m.params[static_cast<std::size_t>(i)].nonnegative && value < 0.0)
            throw config_error(m.id + ": parameter " + name + " must be nonnegative");
        p[static_cast<std::size_t>(i)] = value;
    }
    return p;
}

mat jacobian_fd(const model& m, const vec& x, const vec& p) {
    mat J(m.dim, m.dim);
    vec xp = x, xm = x, fp(m.dim), fm(m.dim);
    for (int j = 0; j < m.dim; ++j) {
        // cbrt(eps) balances truncation against rounding for central differences
        const double h = std::max(6e-6, 6e-6 * std::abs(x[j]));
        xp[j] = x[j] + h;
        xm[j] = x[j] - h;
        m.rhs(0.0, xp, p, fp);
        m.rhs(0.0, xm, p, fm);
        for (int i = 0; i < m.dim; ++i) J(i, j) = (fp[i] - fm[i]) / (2.0 * h);
        xp[j] = x[j];
        xm[j] = x[j];
    }
    return J;
}

mat jacobian(const model& m, const vec& x, const vec& p) {
    if (m.jac) {
        mat J(m.dim, m.dim);
        m.jac(x, p, J);
        return J;
    }
    return jacobian_fd(m, x, p);
}

}  // namespace recur
