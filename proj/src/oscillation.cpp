#include "recur/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace recur {

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 3-point extrema; strict on the left, ties allowed on the right
std::vector<std::size_t> local_maxima(const std::vector<double>& w) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < w.size(); ++i)
        if (w[i] > w[i - 1] && w[i] >= w[i + 1]) out.push_back(i);
    return out;
}

std::vector<std::size_t> local_minima(const std::vector<double>& w) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < w.size(); ++i)
        if (w[i] < w[i - 1] && w[i] <= w[i + 1]) out.push_back(i);
    return out;
}

struct peak_set {
    std::vector<double> heights;  // prominence over the adjacent-trough midpoint
    std::vector<double> times;
    std::vector<double> values;
};

// peaks kept only when flanked by troughs on both sides and taller than floor
peak_set prominent_peaks(const std::vector<double>& t, const std::vector<double>& w,
                         double floor) {
    peak_set out;
    const auto pk = local_maxima(w);
    const auto tr = local_minima(w);
    for (std::size_t i : pk) {
        auto after = std::upper_bound(tr.begin(), tr.end(), i);
        if (after == tr.end() || after == tr.begin()) continue;
        auto before = std::prev(after);
        const double h = w[i] - 0.5 * (w[*before] + w[*after]);
        if (h > floor) {
            out.heights.push_back(h);
            out.times.push_back(t[i]);
            out.values.push_back(w[i]);
        }
    }
    return out;
}

double histogram_mode(const std::vector<double>& w) {
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

}  // namespace

const char* to_string(osc_class c) {
    switch (c) {
        case osc_class::sustained: return "sustained";
        case osc_class::damped: return "damped";
        default: return "none";
    }
}

namespace {

// settle window [settle*n, n); the amplitude floor is anchored to the full series
series_class classify_window(const std::vector<double>& t, const std::vector<double>& w,
                             double settle_fraction) {
    series_class out;
    if (w.size() < 4) return out;

    double full_max = 0.0;
    for (double v : w) full_max = std::max(full_max, std::abs(v));
    const double floor = 1e-4 * full_max;

    const std::size_t half = static_cast<std::size_t>(w.size() * settle_fraction);
    std::vector<double> ws(w.begin() + half, w.end());
    std::vector<double> ts(t.begin() + half, t.end());

    const auto [mn, mx] = std::minmax_element(ws.begin(), ws.end());
    out.amplitude = *mx - *mn;
    if (out.amplitude <= floor) return out;

    const peak_set pk = prominent_peaks(ts, ws, floor);
    out.peaks = static_cast<int>(pk.heights.size());
    if (out.peaks < 3) return out;

    std::vector<double> slopes;
    slopes.reserve(pk.heights.size() * (pk.heights.size() - 1) / 2);
    std::vector<double> lh(pk.heights.size());
    for (std::size_t i = 0; i < pk.heights.size(); ++i) lh[i] = std::log(pk.heights[i]);
    for (std::size_t i = 0; i < lh.size(); ++i)
        for (std::size_t j = i + 1; j < lh.size(); ++j)
            slopes.push_back((lh[j] - lh[i]) / static_cast<double>(j - i));
    out.r = std::exp(median(std::move(slopes)));

    double gaps = 0.0;
    for (std::size_t i = 1; i < pk.times.size(); ++i) gaps += pk.times[i] - pk.times[i - 1];
    out.period = pk.times.size() > 1 ? gaps / (pk.times.size() - 1) : 0.0;

    if (out.r >= 0.99 && out.r <= 1.01 && out.peaks >= 5)
        out.cls = osc_class::sustained;
    else if (out.r < 0.99 && out.peaks >= 3)
        out.cls = osc_class::damped;
    else
        out.cls = osc_class::none;
    return out;
}

}  // namespace

series_class classify_series(const std::vector<double>& t, const std::vector<double>& w) {
    return classify_window(t, w, 0.5);
}

oscillation_record classify_oscillation(const trajectory& tr, int observable,
                                        double settle_fraction) {
    if (tr.truncated())
        throw solver_error(std::string("classify_oscillation: trajectory flagged ") +
                           (tr.diverged ? "diverged" : "step failure"));
    if (!(settle_fraction >= 0.0 && settle_fraction < 1.0))
        throw solver_error("classify_oscillation: settle_fraction must lie in [0,1)");

    const series_class sc = classify_window(tr.times, tr.column(observable), settle_fraction);
    oscillation_record rec;
    rec.cls = sc.cls;
    rec.amplitude = sc.amplitude;
    rec.period = sc.period;
    rec.decay_ratio = sc.r;
    rec.peak_count = sc.peaks;
    if (rec.cls != osc_class::none) {
        const recurrence_stats rs = recurrence_metrics(tr, observable);
        rec.quiescence_fraction = rs.quiescence_fraction;
        rec.spike_count = rs.spike_count;
    }
    return rec;
}

recurrence_stats recurrence_metrics(const trajectory& tr, int observable, double quiescence_band) {
    recurrence_stats out;
    const std::vector<double> w_full = tr.column(observable);
    const std::size_t half = w_full.size() / 2;
    std::vector<double> w(w_full.begin() + half, w_full.end());
    std::vector<double> t(tr.times.begin() + half, tr.times.end());
    if (w.empty()) {
        out.quiescence_fraction = 1.0;
        return out;
    }

    const auto [mn, mx] = std::minmax_element(w.begin(), w.end());
    const double amp = *mx - *mn;
    if (!(amp > 0.0)) {
        out.quiescence_fraction = 1.0;
        out.spike_count = 0;
        return out;
    }

    const double mode = histogram_mode(w);
    std::size_t inside = 0;
    for (double v : w)
        if (std::abs(v - mode) <= quiescence_band * amp) ++inside;
    out.quiescence_fraction = static_cast<double>(inside) / w.size();

    std::vector<double> spike_times;
    for (std::size_t i : local_maxima(w))
        if (w[i] - *mn > 0.5 * amp) spike_times.push_back(t[i]);
    out.spike_count = static_cast<int>(spike_times.size());
    if (spike_times.size() > 1) {
        double gaps = 0.0;
        for (std::size_t i = 1; i < spike_times.size(); ++i)
            gaps += spike_times[i] - spike_times[i - 1];
        out.mean_interspike = gaps / (spike_times.size() - 1);
    }
    return out;
}

double hopf_informed_duration(double hopf_imag) {
    const double im = std::abs(hopf_imag);
    if (!std::isfinite(im) || im <= 0.0) return 500.0;
    return 200.0 / im;
}

oscillation_record classify_cell(const model& m, const vec& p, const vec& x0, int observable,
                                 const cell_options& opt, vec* final_state) {
    oscillation_record rec;
    double span = opt.base_duration;
    const double cap = opt.base_duration * opt.max_multiple;
    for (;;) {
        trajectory tr = integrate(m, p, x0, 0.0, span, opt.integ);
        if (final_state && !tr.states.empty()) *final_state = tr.states.back();
        if (tr.truncated()) {
            rec.cls = osc_class::none;
            rec.integration_failed = true;
            rec.note = tr.diverged ? "diverged" : "step failure";
            return rec;
        }
        const series_class sc = classify_series(tr.times, tr.column(observable));
        rec.cls = sc.cls;
        rec.amplitude = sc.amplitude;
        rec.period = sc.period;
        rec.decay_ratio = sc.r;
        rec.peak_count = sc.peaks;

        double full_max = 0.0;
        for (const auto& s : tr.states)
            full_max = std::max(full_max, std::abs(s[static_cast<std::size_t>(observable)]));
        const bool flat = sc.amplitude <= 1e-4 * full_max;
        if (sc.peaks >= 8 || flat || span >= cap * (1.0 - 1e-12)) {
            if (rec.cls != osc_class::none) {
                const recurrence_stats rs = recurrence_metrics(tr, observable);
                rec.quiescence_fraction = rs.quiescence_fraction;
                rec.spike_count = rs.spike_count;
            }
            return rec;
        }
        span *= 2.0;
    }
}

scan_result scan_parameter(const model& m, const vec& params, const std::string& bif_param,
                           const std::vector<double>& grid, const vec& x0,
                           const cell_options& opt) {
    if (grid.size() < 3) throw config_error("scan_parameter: need at least 3 grid values");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw config_error("scan_parameter: grid must be sorted ascending");
    const int ip = m.param_index(bif_param);
    if (ip < 0) throw config_error(m.id + ": unknown parameter " + bif_param);

    scan_result out;
    out.grid = grid;
    for (double g : grid) {
        vec p = params;
        p[static_cast<std::size_t>(ip)] = g;
        oscillation_record rec = classify_cell(m, p, x0, m.observable, opt);
        rec.param = g;
        out.records.push_back(std::move(rec));
    }
    for (std::size_t i = 0; i + 1 < out.records.size(); ++i) {
        const osc_class a = out.records[i].cls, b = out.records[i + 1].cls;
        if (a == osc_class::sustained && b == osc_class::none) {
            out.stop_bracket = {grid[i], grid[i + 1]};
            out.has_stop_bracket = true;
            break;
        }
        if (a == osc_class::none && b == osc_class::sustained) {
            out.stop_bracket = {grid[i + 1], grid[i]};
            out.has_stop_bracket = true;
            break;
        }
    }
    return out;
}

double find_stop_point(const model& m, const vec& params, const std::string& bif_param,
                       double osc_param, double non_param, const vec& x0,
                       const cell_options& opt) {
    const int ip = m.param_index(bif_param);
    if (ip < 0) throw config_error(m.id + ": unknown parameter " + bif_param);
    auto classify_at = [&](double a) {
        vec p = params;
        p[static_cast<std::size_t>(ip)] = a;
        return classify_cell(m, p, x0, m.observable, opt).cls;
    };
    if (classify_at(osc_param) != osc_class::sustained)
        throw solver_error("find_stop_point: oscillating endpoint is not sustained");
    if (classify_at(non_param) != osc_class::none)
        throw solver_error("find_stop_point: non-oscillating endpoint is not 'none'");

    double a = osc_param, b = non_param;
    const double target = 1e-3 * std::abs(b - a);
    for (int iter = 0; iter < 12 && std::abs(b - a) > target; ++iter) {
        const double mid = 0.5 * (a + b);
        if (classify_at(mid) != osc_class::none)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

}  // namespace recur
