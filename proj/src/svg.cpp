#include "recur/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace recur {

namespace {

constexpr double W = 720.0, H = 480.0;
constexpr double ML = 70.0, MR = 20.0, MT = 20.0, MB = 50.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

struct axis_map {
    double xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;

    void include(double x, double y) {
        xlo = std::min(xlo, x);
        xhi = std::max(xhi, x);
        ylo = std::min(ylo, y);
        yhi = std::max(yhi, y);
    }
    void finish() {
        if (!(xhi > xlo)) {
            xlo -= 1.0;
            xhi += 1.0;
        }
        if (!(yhi > ylo)) {
            ylo -= 1.0;
            yhi += 1.0;
        }
        double pad = 0.04 * (yhi - ylo);
        ylo -= pad;
        yhi += pad;
    }
    double px(double x) const { return ML + (x - xlo) / (xhi - xlo) * (W - ML - MR); }
    double py(double y) const { return H - MB - (y - ylo) / (yhi - ylo) * (H - MT - MB); }
};

void frame(std::ostringstream& os, const axis_map& ax, const std::string& xlabel,
           const std::string& ylabel) {
    os << "<rect x=\"" << num(ML) << "\" y=\"" << num(MT) << "\" width=\"" << num(W - ML - MR)
       << "\" height=\"" << num(H - MT - MB)
       << "\" fill=\"white\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        double fx = ax.xlo + (ax.xhi - ax.xlo) * i / 5.0;
        double fy = ax.ylo + (ax.yhi - ax.ylo) * i / 5.0;
        double px = ax.px(fx), py = ax.py(fy);
        os << "<line x1=\"" << num(px) << "\" y1=\"" << num(H - MB) << "\" x2=\"" << num(px)
           << "\" y2=\"" << num(H - MB + 5) << "\" stroke=\"#444\"/>\n";
        os << "<text x=\"" << num(px) << "\" y=\"" << num(H - MB + 18)
           << "\" font-size=\"11\" text-anchor=\"middle\">" << tick(fx) << "</text>\n";
        os << "<line x1=\"" << num(ML - 5) << "\" y1=\"" << num(py) << "\" x2=\"" << num(ML)
           << "\" y2=\"" << num(py) << "\" stroke=\"#444\"/>\n";
        os << "<text x=\"" << num(ML - 8) << "\" y=\"" << num(py + 4)
           << "\" font-size=\"11\" text-anchor=\"end\">" << tick(fy) << "</text>\n";
    }
    os << "<text x=\"" << num(ML + (W - ML - MR) / 2) << "\" y=\"" << num(H - 12)
       << "\" font-size=\"13\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    os << "<text x=\"16\" y=\"" << num(MT + (H - MT - MB) / 2)
       << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << num(MT + (H - MT - MB) / 2) << ")\">" << ylabel << "</text>\n";
}

const char* marker_color(event_kind k) {
    switch (k) {
        case event_kind::hopf: return "#d62728";              // red
        case event_kind::oscillation_stop: return "#1f77b4";  // blue
        default: return "#ff7f0e";                            // orange: fold / branch point
    }
}

}  // namespace

std::string render_bifurcation_svg(const model& m, const std::vector<branch>& branches,
                                   const std::vector<bif_event>& events, const scan_result& scan,
                                   int observable) {
    size_t obs = static_cast<size_t>(observable);
    axis_map ax;
    bool seeded = false;
    auto seed = [&](double x, double y) {
        if (!std::isfinite(x) || !std::isfinite(y)) return;
        if (!seeded) {
            ax.xlo = ax.xhi = x;
            ax.ylo = ax.yhi = y;
            seeded = true;
        } else {
            ax.include(x, y);
        }
    };
    for (const auto& br : branches)
        for (const auto& pt : br.points) seed(pt.param, pt.state[obs]);
    for (const auto& e : events)
        if (obs < e.state_at.size()) seed(e.param_at, e.state_at[obs]);
    ax.finish();

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (int)W << "\" height=\""
       << (int)H << "\" viewBox=\"0 0 " << (int)W << " " << (int)H << "\">\n";
    frame(os, ax, m.bif_param.empty() ? std::string("param") : m.bif_param,
          obs < m.state_names.size() ? m.state_names[obs] : std::string("x"));

    // amplitude envelope of the oscillation scan (vertical bars centred on the
    // nearest branch value)
    for (const auto& r : scan.records) {
        if (r.cls != osc_class::sustained || !(r.amplitude > 0.0)) continue;
        // centre the bar on the branch value at this parameter, preferring an
        // unstable branch (the one the cycle surrounds)
        double centre = 0.5 * (ax.ylo + ax.yhi);
        bool found = false, found_unstable = false;
        for (const auto& br : branches)
            for (size_t i = 0; i + 1 < br.points.size(); ++i) {
                double a0 = br.points[i].param, a1 = br.points[i + 1].param;
                if ((a0 - r.param) * (a1 - r.param) > 0.0) continue;
                double t = a1 == a0 ? 0.0 : (r.param - a0) / (a1 - a0);
                double v = br.points[i].state[obs] +
                           t * (br.points[i + 1].state[obs] - br.points[i].state[obs]);
                bool unstable = br.points[i].stability != stability_kind::stable;
                if (!found || (unstable && !found_unstable)) {
                    centre = v;
                    found = true;
                    found_unstable = found_unstable || unstable;
                }
            }
        os << "<line x1=\"" << num(ax.px(r.param)) << "\" y1=\""
           << num(ax.py(centre - 0.5 * r.amplitude)) << "\" x2=\"" << num(ax.px(r.param))
           << "\" y2=\"" << num(ax.py(centre + 0.5 * r.amplitude))
           << "\" stroke=\"#bbbbbb\" stroke-width=\"3\" opacity=\"0.6\"/>\n";
    }

    // branch curves: consecutive runs of equal stability share one polyline;
    // each run extends one point into the next so the curve stays connected
    for (const auto& br : branches) {
        size_t i = 0;
        while (i < br.points.size()) {
            bool stable = br.points[i].stability == stability_kind::stable;
            size_t j = i;
            while (j + 1 < br.points.size() &&
                   (br.points[j + 1].stability == stability_kind::stable) == stable)
                ++j;
            size_t last = std::min(j + 1, br.points.size() - 1);
            os << "<polyline fill=\"none\" stroke=\"#333333\" stroke-width=\"1.5\"";
            if (!stable) os << " stroke-dasharray=\"6 4\"";
            os << " points=\"";
            for (size_t k = i; k <= last; ++k)
                os << num(ax.px(br.points[k].param)) << ","
                   << num(ax.py(br.points[k].state[obs])) << (k == last ? "" : " ");
            os << "\"/>\n";
            i = j + 1;
        }
    }

    for (const auto& e : events) {
        double y = obs < e.state_at.size() ? e.state_at[obs] : 0.5 * (ax.ylo + ax.yhi);
        os << "<circle cx=\"" << num(ax.px(e.param_at)) << "\" cy=\"" << num(ax.py(y))
           << "\" r=\"5\" fill=\"" << marker_color(e.kind)
           << "\" stroke=\"#222\" stroke-width=\"0.8\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string render_timeseries_svg(const trajectory& tr, int observable,
                                  const std::string& label) {
    size_t obs = static_cast<size_t>(observable);
    axis_map ax;
    bool seeded = false;
    for (size_t i = 0; i < tr.times.size(); ++i) {
        double y = tr.states[i][obs];
        if (!std::isfinite(y)) continue;
        if (!seeded) {
            ax.xlo = ax.xhi = tr.times[i];
            ax.ylo = ax.yhi = y;
            seeded = true;
        } else {
            ax.include(tr.times[i], y);
        }
    }
    ax.finish();

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (int)W << "\" height=\""
       << (int)H << "\" viewBox=\"0 0 " << (int)W << " " << (int)H << "\">\n";
    frame(os, ax, "t", label.empty() ? std::string("x") : label);
    os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\" points=\"";
    for (size_t i = 0; i < tr.times.size(); ++i) {
        double y = tr.states[i][obs];
        if (!std::isfinite(y)) continue;
        os << num(ax.px(tr.times[i])) << "," << num(ax.py(y))
           << (i + 1 == tr.times.size() ? "" : " ");
    }
    os << "\"/>\n</svg>\n";
    return os.str();
}

}  // namespace recur
