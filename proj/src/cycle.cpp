#include "recur/cycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace recur {

namespace {

double histogram_mode64(const std::vector<double>& w) {
    const auto [mn_it, mx_it] = std::minmax_element(w.begin(), w.end());
    const double mn = *mn_it, mx = *mx_it;
    if (!(mx > mn)) return mn;
    constexpr int bins = 64;
    int count[bins] = {};
    for (double v : w) {
        int b = static_cast<int>((v - mn) / (mx - mn) * bins);
        if (b >= bins) b = bins - 1;
        ++count[b];
    }
    int best = 0;
    for (int b = 1; b < bins; ++b)
        if (count[b] > count[best]) best = b;
    return mn + (best + 0.5) * (mx - mn) / bins;
}

struct crossing {
    double t = 0.0;
    vec state;
};

void hermite_eval(double theta, double h, const vec& y0, const vec& f0, const vec& y1,
                  const vec& f1, vec& out) {
    const std::size_t n = y0.size();
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dy = y1[i] - y0[i];
        out[i] = (1.0 - theta) * y0[i] + theta * y1[i] +
                 theta * (theta - 1.0) *
                     ((1.0 - 2.0 * theta) * dy + (theta - 1.0) * h * f0[i] + theta * h * f1[i]);
    }
}

// refine the section hit inside one dense interval by bisection on the cubic
crossing refine_crossing(const model& m, const vec& p, double t0, double t1, const vec& y0,
                         const vec& y1, int obs, double level) {
    const double h = t1 - t0;
    vec f0(y0.size()), f1(y1.size());
    m.rhs(t0, y0, p, f0);
    m.rhs(t1, y1, p, f1);
    vec tmp;
    double lo = 0.0, hi = 1.0;
    const std::size_t io = static_cast<std::size_t>(obs);
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        hermite_eval(mid, h, y0, f0, y1, f1, tmp);
        if (tmp[io] < level)
            lo = mid;
        else
            hi = mid;
    }
    crossing c;
    c.t = t0 + 0.5 * (lo + hi) * h;
    hermite_eval(0.5 * (lo + hi), h, y0, f0, y1, f1, c.state);
    return c;
}

double state_scale(const vec& s) {
    double m = 1.0;
    for (double v : s) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

limit_cycle extract_limit_cycle(const model& m, const vec& p, const vec& x0, int observable,
                                double base_duration) {
    if (observable < 0 || observable >= m.dim)
        throw config_error(m.id + ": observable index out of range");

    double duration = base_duration;
    bool saw_crossings = false;
    for (int attempt = 0; attempt < 4; ++attempt, duration *= 2.0) {
        integrator_config cfg;
        cfg.rtol = 1e-9;
        cfg.atol = 1e-11;
        cfg.max_step = duration / 20000.0;
        cfg.dense_dt = duration / 20000.0;
        trajectory tr = integrate(m, p, x0, 0.0, duration, cfg);
        if (tr.truncated()) throw solver_error("extract_limit_cycle: integration failed");

        const std::vector<double> w = tr.column(observable);
        const std::size_t half = w.size() / 2;
        std::vector<double> settled(w.begin() + half, w.end());
        const double level = histogram_mode64(settled);

        double full_max = 0.0;
        for (double v : w) full_max = std::max(full_max, std::abs(v));
        const auto [smn, smx] = std::minmax_element(settled.begin(), settled.end());
        if (*smx - *smn <= 1e-4 * full_max)
            throw solver_error("extract_limit_cycle: converged_to_point");

        std::vector<crossing> hits;
        std::vector<std::size_t> hit_idx;
        for (std::size_t i = half; i + 1 < w.size(); ++i) {
            if (w[i] < level && w[i + 1] >= level && w[i + 1] > w[i]) {
                hits.push_back(refine_crossing(m, p, tr.times[i], tr.times[i + 1], tr.states[i],
                                               tr.states[i + 1], observable, level));
                hit_idx.push_back(i);
            }
        }
        if (hits.size() < 2) {
            if (!hits.empty()) saw_crossings = true;
            continue;  // need a longer window
        }
        saw_crossings = true;

        for (std::size_t k = 0; k + 1 < hits.size(); ++k) {
            const double tol = 1e-8 * state_scale(hits[k].state);
            if (dist_inf(hits[k].state, hits[k + 1].state) > tol) continue;

            limit_cycle cyc;
            cyc.observable = observable;
            cyc.period = hits[k + 1].t - hits[k].t;
            cyc.times.push_back(0.0);
            cyc.points.push_back(hits[k].state);
            for (std::size_t i = hit_idx[k] + 1; i <= hit_idx[k + 1]; ++i) {
                if (tr.times[i] <= hits[k].t || tr.times[i] >= hits[k + 1].t) continue;
                cyc.times.push_back(tr.times[i] - hits[k].t);
                cyc.points.push_back(tr.states[i]);
            }
            cyc.times.push_back(cyc.period);
            cyc.points.push_back(hits[k + 1].state);

            double diameter = 0.0;
            for (int c = 0; c < m.dim; ++c) {
                double mn = cyc.points[0][static_cast<std::size_t>(c)], mx = mn;
                for (const auto& pt : cyc.points) {
                    mn = std::min(mn, pt[static_cast<std::size_t>(c)]);
                    mx = std::max(mx, pt[static_cast<std::size_t>(c)]);
                }
                diameter = std::max(diameter, mx - mn);
            }
            if (diameter <= 1e-8 * state_scale(cyc.points[0]))
                throw solver_error("extract_limit_cycle: converged_to_point");
            if (dist_inf(cyc.points.front(), cyc.points.back()) >= 1e-6 * diameter)
                continue;  // closure not met; keep looking at later pairs

            cyc.obs_min = cyc.points[0][static_cast<std::size_t>(observable)];
            cyc.obs_max = cyc.obs_min;
            for (const auto& pt : cyc.points) {
                const double v = pt[static_cast<std::size_t>(observable)];
                cyc.obs_min = std::min(cyc.obs_min, v);
                cyc.obs_max = std::max(cyc.obs_max, v);
            }
            return cyc;
        }
    }
    throw solver_error(saw_crossings ? "extract_limit_cycle: no_convergence"
                                     : "extract_limit_cycle: no_crossings");
}

double manifold_proximity_axes(const limit_cycle& cyc) {
    if (cyc.points.empty()) throw solver_error("manifold_proximity: empty cycle");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& pt : cyc.points)
        for (double v : pt) best = std::min(best, std::abs(v));
    return best;
}

double manifold_proximity_point(const limit_cycle& cyc, const vec& point) {
    if (cyc.points.empty()) throw solver_error("manifold_proximity: empty cycle");
    if (point.size() != cyc.points.front().size())
        throw solver_error("manifold_proximity: dimension mismatch");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& pt : cyc.points) {
        double acc = 0.0;
        for (std::size_t i = 0; i < point.size(); ++i)
            acc += (pt[i] - point[i]) * (pt[i] - point[i]);
        best = std::min(best, std::sqrt(acc));
    }
    return best;
}

double manifold_proximity(const limit_cycle& cyc, const model& m, const vec& p) {
    if (cyc.points.empty()) throw solver_error("manifold_proximity: empty cycle");
    if (static_cast<int>(cyc.points.front().size()) != m.dim)
        throw solver_error("manifold_proximity: dimension mismatch");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& pt : cyc.points) best = std::min(best, m.manifold_distance(pt, p));
    return best;
}

}  // namespace recur
