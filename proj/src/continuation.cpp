#include "recur/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace recur {

namespace {

constexpr double kDeadBand = 1e-12;

vec with_param(vec base, int ip, double a) {
    base[static_cast<std::size_t>(ip)] = a;
    return base;
}

// d rhs / d alpha, central difference
vec rhs_alpha(const model& m, const vec& x, const vec& base, int ip, double a) {
    const double h = std::max(1e-7, 1e-7 * std::abs(a));
    vec fp(m.dim), fm(m.dim);
    m.rhs(0.0, x, with_param(base, ip, a + h), fp);
    m.rhs(0.0, x, with_param(base, ip, a - h), fm);
    vec out(m.dim);
    for (int i = 0; i < m.dim; ++i) out[i] = (fp[i] - fm[i]) / (2.0 * h);
    return out;
}

struct wpoint {
    vec x;
    double a = 0.0;
};

double wdist(const wpoint& u, const wpoint& v) {
    double acc = (u.a - v.a) * (u.a - v.a);
    for (std::size_t i = 0; i < u.x.size(); ++i) acc += (u.x[i] - v.x[i]) * (u.x[i] - v.x[i]);
    return std::sqrt(acc);
}

struct wtangent {
    vec tx;
    double ta = 0.0;

    void normalize() {
        double acc = ta * ta;
        for (double v : tx) acc += v * v;
        const double s = 1.0 / std::max(std::sqrt(acc), 1e-300);
        for (double& v : tx) v *= s;
        ta *= s;
    }
};

wtangent secant(const wpoint& from, const wpoint& to) {
    wtangent t;
    t.tx.resize(from.x.size());
    for (std::size_t i = 0; i < from.x.size(); ++i) t.tx[i] = to.x[i] - from.x[i];
    t.ta = to.a - from.a;
    t.normalize();
    return t;
}

// Newton corrector for [rhs(x; a); t.(w - w_pred)] = 0
bool correct(const model& m, const vec& base, int ip, const wtangent& t, const wpoint& pred,
             wpoint& out) {
    const int n = m.dim;
    wpoint w = pred;
    vec f(n), dw(n + 1);
    for (int iter = 0; iter < 25; ++iter) {
        const vec p = with_param(base, ip, w.a);
        m.rhs(0.0, w.x, p, f);
        double plane = -t.ta * (w.a - pred.a);
        for (int i = 0; i < n; ++i) plane -= t.tx[i] * (w.x[i] - pred.x[i]);
        const double fnorm = norm_inf(f);
        if (fnorm < 1e-11 && std::abs(plane) < 1e-11) {
            out = w;
            return true;
        }
        mat J = jacobian(m, w.x, p);
        const vec fa = rhs_alpha(m, w.x, base, ip, w.a);
        mat B(n + 1, n + 1);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) B(i, j) = J(i, j);
            B(i, n) = fa[i];
        }
        for (int j = 0; j < n; ++j) B(n, j) = t.tx[j];
        B(n, n) = t.ta;
        vec rhs(n + 1);
        for (int i = 0; i < n; ++i) rhs[i] = -f[i];
        rhs[n] = plane;
        if (!solve_linear(B, rhs, dw)) return false;
        for (int i = 0; i < n; ++i) w.x[i] += dw[i];
        w.a += dw[n];
        if (!std::isfinite(w.a)) return false;
        for (double v : w.x)
            if (!std::isfinite(v)) return false;
    }
    return false;
}

branch_point_rec make_point(const model& m, const vec& base, int ip, const wpoint& w) {
    branch_point_rec r;
    r.param = w.a;
    r.state = w.x;
    r.spectrum = eigenvalues(jacobian(m, w.x, with_param(base, ip, w.a)));
    r.stability = classify_stability(r.spectrum);
    return r;
}

// fixed-parameter Newton from a nearby state
bool natural_solve(const model& m, const vec& base, int ip, double a, const vec& seed, wpoint& out) {
    try {
        equilibrium eq = find_equilibrium(m, with_param(base, ip, a), seed, 1e-11);
        out.x = eq.state;
        out.a = a;
        return true;
    } catch (const solver_error&) {
        return false;
    }
}

struct leg {
    std::vector<branch_point_rec> points;
    std::string end_note;
    int failures = 0;
};

leg trace_direction(const model& m, const vec& base, int ip, double lo_eff, double hi,
                    const wpoint& w0, int dir, const arc_config& cfg, double ds_max, double ds0,
                    double dalpha_cap) {
    leg out;
    wpoint w = w0;

    // initial tangent from the natural parameterization
    wtangent t;
    {
        const vec p = with_param(base, ip, w.a);
        mat J = jacobian(m, w.x, p);
        const vec fa = rhs_alpha(m, w.x, base, ip, w.a);
        vec dx(m.dim);
        vec nfa(m.dim);
        for (int i = 0; i < m.dim; ++i) nfa[i] = -fa[i];
        if (solve_linear(J, nfa, dx)) {
            t.tx = dx;
            t.ta = 1.0;
        } else {
            t.tx.assign(static_cast<std::size_t>(m.dim), 0.0);
            t.ta = 1.0;
        }
        t.normalize();
        if (t.ta * dir < 0.0) {
            for (double& v : t.tx) v = -v;
            t.ta = -t.ta;
        }
    }

    double ds = ds0;
    int successes = 0;
    while (static_cast<int>(out.points.size()) < cfg.max_points) {
        wpoint pred;
        pred.x.resize(w.x.size());
        for (std::size_t i = 0; i < w.x.size(); ++i) pred.x[i] = w.x[i] + ds * t.tx[i];
        pred.a = w.a + ds * t.ta;

        wpoint wn;
        bool ok = correct(m, base, ip, t, pred, wn);
        if (ok && std::abs(wn.a - w.a) > dalpha_cap) ok = false;  // keep the param grid fine
        if (!ok) {
            ++out.failures;
            successes = 0;
            ds *= 0.5;
            if (ds < cfg.ds_min) {
                out.end_note = "corrector failure at minimum step";
                break;
            }
            continue;
        }

        if (wn.a > hi) {
            wpoint we;
            if (natural_solve(m, base, ip, hi, w.x, we)) out.points.push_back(make_point(m, base, ip, we));
            out.end_note = "reached range end";
            break;
        }
        if (wn.a < lo_eff) {
            wpoint we;
            if (natural_solve(m, base, ip, lo_eff, w.x, we))
                out.points.push_back(make_point(m, base, ip, we));
            out.end_note = "reached range end";
            break;
        }

        out.points.push_back(make_point(m, base, ip, wn));
        t = secant(w, wn);
        w = wn;
        if (++successes >= 4) {
            ds = std::min(ds * 1.3, ds_max);
            successes = 0;
        }
    }
    if (out.end_note.empty() && static_cast<int>(out.points.size()) >= cfg.max_points)
        out.end_note = "point budget exhausted";
    return out;
}

// ---- event detection -------------------------------------------------------

double hopf_test(const branch_point_rec& r) {
    return r.spectrum.has_complex_pair ? r.spectrum.complex_pair_real
                                       : std::numeric_limits<double>::quiet_NaN();
}

double det_test(const model& m, const vec& base, int ip, const branch_point_rec& r) {
    return determinant(jacobian(m, r.state, with_param(base, ip, r.param)));
}

// sign with the dead-band rule: values inside +-1e-12 are re-evaluated at a
// slightly perturbed parameter so each near-zero grid point gets one sign
template <typename TestFn>
double resolved_sign(const model& m, const vec& base, int ip, const branch_point_rec& r,
                     double value, TestFn test) {
    if (std::abs(value) >= kDeadBand) return value > 0.0 ? 1.0 : -1.0;
    for (double da : {1e-9, -1e-9}) {
        wpoint wp;
        if (!natural_solve(m, base, ip, r.param + da, r.state, wp)) continue;
        const double v = test(make_point(m, base, ip, wp));
        if (std::abs(v) >= kDeadBand) return v > 0.0 ? 1.0 : -1.0;
    }
    return 1.0;
}

template <typename TestFn>
bool refine_between(const model& m, const vec& base, int ip, const branch_point_rec& pl,
                    const branch_point_rec& pr, TestFn test, wpoint& result) {
    wpoint wl{pl.state, pl.param}, wr{pr.state, pr.param};
    double vl = test(pl);
    if (std::isnan(vl)) return false;
    for (int iter = 0; iter < 90; ++iter) {
        const double width = std::abs(wr.a - wl.a);
        const double scale = std::max(1.0, 0.5 * std::abs(wl.a + wr.a));
        if (width < 1e-10 * scale && iter > 0) break;
        wtangent t = secant(wl, wr);
        wpoint pred;
        pred.x.resize(wl.x.size());
        for (std::size_t i = 0; i < wl.x.size(); ++i) pred.x[i] = 0.5 * (wl.x[i] + wr.x[i]);
        pred.a = 0.5 * (wl.a + wr.a);
        wpoint wm;
        if (!correct(m, base, ip, t, pred, wm)) {
            if (!natural_solve(m, base, ip, pred.a, pred.x, wm)) break;
        }
        const double vm = test(make_point(m, base, ip, wm));
        if (std::isnan(vm)) break;
        if ((vm > 0.0) == (vl > 0.0)) {
            wl = wm;
            vl = vm;
        } else {
            wr = wm;
        }
        if (wdist(wl, wr) < 1e-13 * std::max(1.0, std::abs(wl.a))) break;
    }
    result.x.resize(wl.x.size());
    for (std::size_t i = 0; i < wl.x.size(); ++i) result.x[i] = 0.5 * (wl.x[i] + wr.x[i]);
    result.a = 0.5 * (wl.a + wr.a);
    return true;
}

}  // namespace

const char* to_string(event_kind k) {
    switch (k) {
        case event_kind::hopf: return "Hopf";
        case event_kind::fold: return "Fold";
        case event_kind::branch_point: return "BranchPoint";
        default: return "OscillationStop";
    }
}

branch trace_branch(const model& m, const vec& base_params, const std::string& bif_param,
                    double lo, double hi, const equilibrium& start, const arc_config& cfg) {
    const int ip = m.param_index(bif_param);
    if (ip < 0) throw config_error(m.id + ": unknown parameter " + bif_param);
    if (!(hi > lo)) throw solver_error("trace_branch: zero-length range");
    if (!(start.residual_norm < 1e-9)) throw solver_error("trace_branch: start not converged");
    const double a0 = start.params[static_cast<std::size_t>(ip)];
    if (a0 < lo - 1e-12 || a0 > hi + 1e-12)
        throw solver_error("trace_branch: start parameter outside range");

    const double lo_eff = lo + cfg.lo_gap;
    const double ds_max = cfg.ds_max > 0.0 ? cfg.ds_max : 0.05 * (hi - lo + norm2(start.state) + 1.0);
    const double ds0 = cfg.ds0 > 0.0 ? cfg.ds0 : std::max(cfg.ds_min, ds_max / 50.0);
    const double dalpha_cap = 0.02 * (hi - lo);

    branch br;
    br.bif_param = bif_param;
    br.param_index = ip;
    br.base_params = base_params;

    wpoint w0{start.state, a0};
    leg down, up;
    if (a0 > lo_eff + 1e-12)
        down = trace_direction(m, br.base_params, ip, lo_eff, hi, w0, -1, cfg, ds_max, ds0,
                               dalpha_cap);
    if (a0 < hi - 1e-12)
        up = trace_direction(m, br.base_params, ip, lo_eff, hi, w0, +1, cfg, ds_max, ds0,
                             dalpha_cap);

    br.points.reserve(down.points.size() + up.points.size() + 1);
    for (auto it = down.points.rbegin(); it != down.points.rend(); ++it) br.points.push_back(*it);
    br.points.push_back(make_point(m, br.base_params, ip, w0));
    for (auto& r : up.points) br.points.push_back(std::move(r));
    br.corrector_failures = down.failures + up.failures;
    br.end_note_lo = down.end_note;
    br.end_note_hi = up.end_note;
    return br;
}

std::vector<bif_event> detect_events(const model& m, const branch& br) {
    std::vector<bif_event> events;
    if (br.points.size() < 2) return events;
    const int ip = br.param_index;
    const vec& base = br.base_params;

    const std::size_t n = br.points.size();
    std::vector<double> hv(n), dv(n), hs(n), dsg(n);
    for (std::size_t i = 0; i < n; ++i) {
        hv[i] = hopf_test(br.points[i]);
        dv[i] = det_test(m, base, ip, br.points[i]);
    }
    auto hopf_fn = [](const branch_point_rec& r) { return hopf_test(r); };
    auto det_fn = [&](const branch_point_rec& r) { return det_test(m, base, ip, r); };
    for (std::size_t i = 0; i < n; ++i) {
        hs[i] = std::isnan(hv[i]) ? 0.0 : resolved_sign(m, base, ip, br.points[i], hv[i], hopf_fn);
        dsg[i] = resolved_sign(m, base, ip, br.points[i], dv[i], det_fn);
    }

    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (hs[i] != 0.0 && hs[i + 1] != 0.0 && hs[i] * hs[i + 1] < 0.0) {
            wpoint at;
            if (refine_between(m, base, ip, br.points[i], br.points[i + 1], hopf_fn, at)) {
                branch_point_rec r = make_point(m, base, ip, at);
                bif_event ev;
                ev.kind = event_kind::hopf;
                ev.param_at = at.a;
                ev.state_at = at.x;
                ev.test_value = std::abs(r.spectrum.complex_pair_real);
                ev.frequency = std::abs(r.spectrum.complex_pair_imag);
                events.push_back(std::move(ev));
            }
        }
        if (dsg[i] * dsg[i + 1] < 0.0) {
            wpoint at;
            if (refine_between(m, base, ip, br.points[i], br.points[i + 1], det_fn, at)) {
                const double dpre = at.a - br.points[i].param;
                const double dpost = br.points[i + 1].param - at.a;
                bif_event ev;
                ev.kind = dpre * dpost < 0.0 ? event_kind::fold : event_kind::branch_point;
                ev.param_at = at.a;
                ev.state_at = at.x;
                ev.test_value = std::abs(det_test(m, base, ip, make_point(m, base, ip, at)));
                events.push_back(std::move(ev));
            }
        }
    }

    std::sort(events.begin(), events.end(),
              [](const bif_event& a, const bif_event& b) { return a.param_at < b.param_at; });
    std::vector<bif_event> unique;
    for (auto& ev : events) {
        bool dup = false;
        for (const auto& u : unique)
            if (u.kind == ev.kind && std::abs(u.param_at - ev.param_at) < 1e-8) {
                dup = true;
                break;
            }
        if (!dup) unique.push_back(std::move(ev));
    }
    return unique;
}

std::vector<vec> branch_states_at(const branch& br, double a) {
    std::vector<vec> out;
    const auto& pts = br.points;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        double a0 = pts[i].param, a1 = pts[i + 1].param;
        if ((a0 - a) * (a1 - a) > 0.0) continue;
        double da = a1 - a0;
        double w = std::abs(da) < 1e-300 ? 0.0 : (a - a0) / da;
        vec s(pts[i].state.size());
        for (size_t k = 0; k < s.size(); ++k)
            s[k] = pts[i].state[k] + w * (pts[i + 1].state[k] - pts[i].state[k]);
        out.push_back(std::move(s));
    }
    return out;
}

bif_event refine_hopf(const model& m, const vec& params, const std::string& bif_param, double lo,
                      double hi) {
    const int ip = m.param_index(bif_param);
    if (ip < 0) throw config_error(m.id + ": unknown parameter " + bif_param);
    if (!(hi > lo)) throw solver_error("refine_hopf: empty bracket");

    const vec p_lo = with_param(params, ip, lo);
    equilibria_scan scan = find_equilibria_scan(m, p_lo, m.seeds(p_lo), 1e-11);

    auto pair_real_at = [&](double a, const vec& seed, vec& state_out, double& im_out) -> double {
        wpoint wp;
        if (!natural_solve(m, params, ip, a, seed, wp))
            return std::numeric_limits<double>::quiet_NaN();
        const eigen_spectrum sp = eigenvalues(jacobian(m, wp.x, with_param(params, ip, a)));
        state_out = wp.x;
        im_out = std::abs(sp.complex_pair_imag);
        return sp.has_complex_pair ? sp.complex_pair_real : std::numeric_limits<double>::quiet_NaN();
    };

    for (const auto& eq : scan.equilibria) {
        if (!eq.spectrum.has_complex_pair) continue;
        double vl = eq.spectrum.complex_pair_real;
        vec xl = eq.state, xr = eq.state;
        double im = std::abs(eq.spectrum.complex_pair_imag);

        // walk the equilibrium across the bracket
        bool chain_ok = true;
        double vr = vl;
        const int steps = 16;
        for (int k = 1; k <= steps; ++k) {
            const double a = lo + (hi - lo) * k / steps;
            vec xs;
            double imk;
            const double v = pair_real_at(a, xr, xs, imk);
            if (std::isnan(v)) {
                chain_ok = false;
                break;
            }
            xr = xs;
            vr = v;
        }
        if (!chain_ok || vl * vr > 0.0) continue;

        double al = lo, ar = hi;
        vec xm = xl;
        double vm = vl, am = al;
        for (int iter = 0; iter < 200; ++iter) {
            am = 0.5 * (al + ar);
            vec xs;
            double imk;
            const double v = pair_real_at(am, (am - al < ar - am) ? xl : xr, xs, imk);
            if (std::isnan(v)) break;
            xm = xs;
            vm = v;
            im = imk;
            if ((v > 0.0) == (vl > 0.0)) {
                al = am;
                xl = xs;
                vl = v;
            } else {
                ar = am;
                xr = xs;
            }
            if (ar - al < 1e-10 * std::max(1.0, std::abs(am)) && std::abs(vm) < 1e-8) break;
        }
        bif_event ev;
        ev.kind = event_kind::hopf;
        ev.param_at = am;
        ev.state_at = xm;
        ev.test_value = std::abs(vm);
        ev.frequency = im;
        return ev;
    }
    throw solver_error("refine_hopf: no sign change of the leading pair in bracket");
}

}  // namespace recur
