#include "recur/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace recur {

namespace {

using rhs_fn = std::function<void(double, const vec&, vec&)>;

bool all_finite(const vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// scaled RMS error norm
double error_norm(const vec& err, const vec& y, const vec& ynew, double rtol, double atol) {
    double acc = 0.0;
    const int n = static_cast<int>(err.size());
    for (int i = 0; i < n; ++i) {
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        const double q = err[i] / sc;
        acc += q * q;
    }
    const double e = std::sqrt(acc / n);
    return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
}

// Dormand-Prince 5(4) with FSAL
struct dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    int n;
    vec k2, k3, k4, k5, k6, ytmp;

    explicit dopri5(int dim) : n(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), ytmp(dim) {}

    // k1 = f(t, y) supplied (FSAL); on exit k7 = f(t+h, ynew)
    void step(const rhs_fn& f, double t, const vec& y, const vec& k1, double h, vec& ynew,
              vec& k7, vec& err) {
        for (int i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        f(t + c2 * h, ytmp, k2);
        for (int i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * h, ytmp, k3);
        for (int i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + c4 * h, ytmp, k4);
        for (int i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * h, ytmp, k5);
        for (int i = 0; i < n; ++i)
            ytmp[i] = y[i] +
                      h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f(t + h, ytmp, k6);
        for (int i = 0; i < n; ++i)
            ynew[i] = y[i] +
                      h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f(t + h, ynew, k7);
        for (int i = 0; i < n; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * k7[i]);
    }
};

// Rosenbrock 2(3) pair (the ode23s scheme), autonomous form
struct ros23 {
    int n;
    vec k1, k2, k3, f1, f2, ytmp;
    mat W;
    std::vector<int> piv;

    explicit ros23(int dim)
        : n(dim), k1(dim), k2(dim), k3(dim), f1(dim), f2(dim), ytmp(dim), W(dim, dim), piv(dim) {}

    // returns false if W is singular or non-finite values appear
    bool step(const rhs_fn& f, const mat& J, double t, const vec& y, const vec& f0, double h,
              vec& ynew, vec& fnew, vec& err) {
        static const double d = 1.0 / (2.0 + std::sqrt(2.0));
        static const double e32 = 6.0 + std::sqrt(2.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) W(i, j) = (i == j ? 1.0 : 0.0) - h * d * J(i, j);
        if (!lu_factor(W, piv)) return false;
        k1 = f0;
        lu_solve(W, piv, k1);
        for (int i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * h * k1[i];
        f(t + 0.5 * h, ytmp, f1);
        for (int i = 0; i < n; ++i) k2[i] = f1[i] - k1[i];
        lu_solve(W, piv, k2);
        for (int i = 0; i < n; ++i) k2[i] += k1[i];
        for (int i = 0; i < n; ++i) ynew[i] = y[i] + h * k2[i];
        if (!all_finite(ynew)) return false;
        f(t + h, ynew, f2);
        for (int i = 0; i < n; ++i)
            k3[i] = f2[i] - e32 * (k2[i] - f1[i]) - 2.0 * (k1[i] - f0[i]);
        lu_solve(W, piv, k3);
        for (int i = 0; i < n; ++i) err[i] = (h / 6.0) * (k1[i] - 2.0 * k2[i] + k3[i]);
        fnew = f2;
        return true;
    }
};

mat jac_fd(const rhs_fn& f, double t, const vec& y) {
    const int n = static_cast<int>(y.size());
    mat J(n, n);
    vec yp = y, ym = y, fp(n), fm(n);
    for (int j = 0; j < n; ++j) {
        const double h = std::max(1e-7, 1e-7 * std::abs(y[j]));
        yp[j] = y[j] + h;
        ym[j] = y[j] - h;
        f(t, yp, fp);
        f(t, ym, fm);
        for (int i = 0; i < n; ++i) J(i, j) = (fp[i] - fm[i]) / (2.0 * h);
        yp[j] = y[j];
        ym[j] = y[j];
    }
    return J;
}

// cubic Hermite on [t, t+h] given endpoint states and derivatives
void hermite(double theta, double h, const vec& y0, const vec& f0, const vec& y1, const vec& f1,
             vec& out) {
    const int n = static_cast<int>(y0.size());
    out.resize(n);
    for (int i = 0; i < n; ++i) {
        const double dy = y1[i] - y0[i];
        out[i] = (1.0 - theta) * y0[i] + theta * y1[i] +
                 theta * (theta - 1.0) *
                     ((1.0 - 2.0 * theta) * dy + (theta - 1.0) * h * f0[i] +
                      theta * h * f1[i]);
    }
}

struct dense_writer {
    trajectory* tr;
    double t0, t1, dt;
    long next = 0;
    long total;
    vec buf;

    dense_writer(trajectory* out, double a, double b, double dti) : tr(out), t0(a), t1(b), dt(dti) {
        total = static_cast<long>(std::ceil((b - a) / dti - 1e-9));
    }
    double target(long i) const { return i >= total ? t1 : t0 + dt * i; }
    // emit all grid targets inside (t, t+h]
    void advance(double t, double h, const vec& y0, const vec& f0, const vec& y1, const vec& f1) {
        while (next <= total) {
            const double tt = target(next);
            if (tt > t + h + 1e-12 * std::max(1.0, std::abs(t + h))) break;
            if (tt > t) {
                const double theta = std::min(1.0, std::max(0.0, (tt - t) / h));
                hermite(theta, h, y0, f0, y1, f1, buf);
                tr->times.push_back(tt);
                tr->states.push_back(buf);
            }
            ++next;
        }
    }
};

struct divergence_guard {
    double norm_limit;
    bool log_mode;
    bool hit(const vec& y) const {
        if (!all_finite(y)) return true;
        if (log_mode) {
            for (double u : y)
                if (u > 50.0) return true;
            return false;
        }
        return norm_inf(y) > norm_limit;
    }
};

trajectory run(const rhs_fn& f, const vec& y_init, double t0, double t1, integrator_config cfg,
               bool log_mode, const std::function<vec(const vec&)>& unmap) {
    const double span = t1 - t0;
    if (!(span > 0.0)) throw config_error("integrate: t1 must exceed t0");
    if (cfg.rtol <= 0.0 || cfg.atol <= 0.0) throw config_error("integrate: tolerances must be positive");
    const double max_step = cfg.max_step > 0.0 ? cfg.max_step : span / 1000.0;
    const double dense_dt = cfg.dense_dt > 0.0 ? cfg.dense_dt : span / 5000.0;
    const int n = static_cast<int>(y_init.size());

    trajectory tr;
    tr.times.push_back(t0);
    tr.states.push_back(unmap(y_init));
    tr.t_end = t0;
    dense_writer dense(&tr, t0, t1, dense_dt);
    dense.next = 1;  // t0 already emitted
    divergence_guard guard{cfg.diverge_norm, log_mode};

    dopri5 erk(n);
    ros23 irk(n);
    bool implicit = cfg.method == step_method::implicit_stiff;
    tr.switched_implicit = false;

    vec y = y_init, fcur(n), ynew(n), fnew(n), errv(n);
    double t = t0;
    f(t, y, fcur);
    if (guard.hit(y) || !all_finite(fcur)) {
        tr.diverged = true;
        return tr;
    }

    // initial step heuristic
    double h;
    {
        double d0 = 0.0, d1 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double sc = cfg.atol + cfg.rtol * std::abs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1 += (fcur[i] / sc) * (fcur[i] / sc);
        }
        d0 = std::sqrt(d0 / n);
        d1 = std::sqrt(d1 / n);
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1;
        h = std::min(h, max_step);
    }

    double errold = 1e-4;
    int tiny_streak = 0;
    const double tiny_step = 1e-10 * span;
    int rejects_in_row = 0;

    while (t < t1 - 1e-12 * span) {
        const double hmin = std::max(1e-14 * span, 8.0 * std::numeric_limits<double>::epsilon() *
                                                       std::max(std::abs(t), 1.0));
        if (h < hmin) {
            if (!implicit) {
                implicit = true;
                tr.switched_implicit = true;
                h = std::min(max_step, 1e4 * hmin);
                rejects_in_row = 0;
                continue;
            }
            tr.step_failure = true;
            break;
        }
        h = std::min({h, max_step, t1 - t});

        bool accepted = false;
        double err = std::numeric_limits<double>::infinity();
        if (!implicit) {
            erk.step(f, t, y, fcur, h, ynew, fnew, errv);
            err = error_norm(errv, y, ynew, cfg.rtol, cfg.atol);
            accepted = err <= 1.0;
        } else {
            const mat J = jac_fd(f, t, y);
            if (irk.step(f, J, t, y, fcur, h, ynew, fnew, errv)) {
                err = error_norm(errv, y, ynew, cfg.rtol, cfg.atol);
                accepted = err <= 1.0;
            }
        }

        if (!accepted) {
            ++tr.steps_rejected;
            ++rejects_in_row;
            const double fac = std::isfinite(err) && err > 0.0
                                   ? std::max(0.2, 0.9 * std::pow(err, implicit ? -1.0 / 3 : -0.2))
                                   : 0.2;
            h *= std::min(1.0, fac);
            if (rejects_in_row > 200) {
                tr.step_failure = true;
                break;
            }
            continue;
        }

        rejects_in_row = 0;
        ++tr.steps_accepted;
        if (guard.hit(ynew)) {
            tr.diverged = true;
            break;
        }
        dense.advance(t, h, y, fcur, ynew, fnew);
        t += h;
        y = ynew;
        fcur = fnew;
        tr.t_end = t;

        if (!implicit) {
            if (h < tiny_step) {
                if (++tiny_streak >= 50) {
                    implicit = true;
                    tr.switched_implicit = true;
                    tiny_streak = 0;
                }
            } else {
                tiny_streak = 0;
            }
        }

        double fac;
        if (err <= 1e-300) {
            fac = 5.0;
        } else if (!implicit) {
            fac = 0.9 * std::pow(err, -0.2) * std::pow(errold, 0.08);
        } else {
            fac = 0.9 * std::pow(err, -1.0 / 3);
        }
        fac = std::min(5.0, std::max(0.2, fac));
        h *= fac;
        errold = std::max(err, 1e-4);
    }

    if (log_mode) {
        for (std::size_t i = 1; i < tr.states.size(); ++i) tr.states[i] = unmap(tr.states[i]);
    }
    return tr;
}

}  // namespace

std::vector<double> trajectory::column(int idx) const {
    std::vector<double> out(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) out[i] = states[i][static_cast<std::size_t>(idx)];
    return out;
}

trajectory integrate(const model& m, const vec& p, const vec& x0, double t0, double t1,
                     const integrator_config& cfg) {
    if (static_cast<int>(x0.size()) != m.dim) throw config_error(m.id + ": bad state size");

    bool log_mode = false;
    if (m.log_state && m.rhs_percap) {
        log_mode = true;
        for (double v : x0)
            if (!(v > 0.0)) log_mode = false;  // fall back to linear coordinates
    }

    if (!log_mode) {
        rhs_fn f = [&m, p](double t, const vec& y, vec& dy) {
            dy.resize(y.size());
            m.rhs(t, y, p, dy);
        };
        auto id = [](const vec& y) { return y; };
        return run(f, x0, t0, t1, cfg, false, id);
    }

    // integrate u = log(x); du/dt is the per-capita rate evaluated at x = exp(u)
    vec u0(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) u0[i] = std::log(x0[i]);
    rhs_fn f = [&m, p](double t, const vec& u, vec& du) {
        du.resize(u.size());
        vec x(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) x[i] = std::exp(std::min(u[i], 35.0));
        m.rhs_percap(t, x, p, du);
    };
    auto unmap = [](const vec& u) {
        vec x(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) x[i] = std::exp(std::min(u[i], 700.0));
        return x;
    };
    return run(f, u0, t0, t1, cfg, true, unmap);
}

double energy_drift_check(const trajectory& tr) {
    if (tr.states.empty()) return 0.0;
    auto energy = [](const vec& s) { return 0.5 * (s[0] * s[0] + s[1] * s[1]); };
    const double e0 = energy(tr.states.front());
    double worst = 0.0;
    for (const auto& s : tr.states) worst = std::max(worst, std::abs(energy(s) - e0));
    return e0 > 1e-300 ? worst / e0 : worst;
}

}  // namespace recur
