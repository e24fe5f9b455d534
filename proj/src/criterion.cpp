#include "recur/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "recur/equilibrium.hpp"

namespace recur {

const char* to_string(verdict_kind v) {
    switch (v) {
        case verdict_kind::recurrence: return "recurrence";
        case verdict_kind::semi_recurrence: return "semi-recurrence";
        case verdict_kind::none: return "none";
    }
    return "none";
}

const char* to_string(stop_kind_t k) {
    switch (k) {
        case stop_kind_t::sudden_stop: return "SuddenStop";
        case stop_kind_t::transcritical: return "Transcritical";
        case stop_kind_t::saddle_node: return "SaddleNode";
        case stop_kind_t::no_stop: return "NoStop";
    }
    return "NoStop";
}

namespace {

constexpr double kinf = std::numeric_limits<double>::infinity();

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = lo + (hi - lo) * double(i) / double(n - 1);
    g.back() = hi;
    return g;
}

// limit state beyond a branch end: least-squares line through the last 5
// points of the end closer to a
bool branch_state_extrapolated(const branch& b, double a, vec& out) {
    const auto& pts = b.points;
    if (pts.empty()) return false;
    size_t n = std::min<size_t>(5, pts.size());
    bool from_back = std::abs(pts.back().param - a) <= std::abs(pts.front().param - a);
    size_t begin = from_back ? pts.size() - n : 0;

    double pm = 0.0;
    for (size_t i = begin; i < begin + n; ++i) pm += pts[i].param;
    pm /= double(n);
    double saa = 0.0;
    for (size_t i = begin; i < begin + n; ++i) saa += (pts[i].param - pm) * (pts[i].param - pm);

    size_t dim = pts[begin].state.size();
    out.assign(dim, 0.0);
    for (size_t k = 0; k < dim; ++k) {
        double xm = 0.0;
        for (size_t i = begin; i < begin + n; ++i) xm += pts[i].state[k];
        xm /= double(n);
        double sax = 0.0;
        for (size_t i = begin; i < begin + n; ++i)
            sax += (pts[i].param - pm) * (pts[i].state[k] - xm);
        double slope = saa > 1e-300 ? sax / saa : 0.0;
        out[k] = xm + slope * (a - pm);
    }
    return true;
}

double pair_distance_at(const branch& b1, const branch& b2, double a) {
    auto s1 = branch_states_at(b1, a);
    if (s1.empty()) {
        vec t;
        if (branch_state_extrapolated(b1, a, t)) s1.push_back(std::move(t));
    }
    auto s2 = branch_states_at(b2, a);
    if (s2.empty()) {
        vec t;
        if (branch_state_extrapolated(b2, a, t)) s2.push_back(std::move(t));
    }
    double best = kinf;
    for (const auto& u : s1)
        for (const auto& v : s2)
            if (u.size() == v.size()) best = std::min(best, dist_inf(u, v));
    return best;
}

double min_branch_distance(const branch& b1, const branch& b2, double lo, double hi) {
    if (!(hi >= lo)) std::swap(lo, hi);
    const int n = 33;
    double best = kinf, best_a = lo;
    for (int i = 0; i < n; ++i) {
        double a = n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1);
        double d = pair_distance_at(b1, b2, a);
        if (d < best) {
            best = d;
            best_a = a;
        }
    }
    // ternary refinement around the coarse minimum
    double step = (hi - lo) / double(n - 1);
    double l = std::max(lo, best_a - step), r = std::min(hi, best_a + step);
    for (int it = 0; it < 60 && r - l > 1e-14 * std::max(1.0, std::abs(best_a)); ++it) {
        double m1 = l + (r - l) / 3.0, m2 = r - (r - l) / 3.0;
        if (pair_distance_at(b1, b2, m1) <= pair_distance_at(b1, b2, m2)) r = m2;
        else l = m1;
    }
    return std::min(best, pair_distance_at(b1, b2, 0.5 * (l + r)));
}

}  // namespace

double scan_base_duration(const std::vector<bif_event>& hopfs) {
    double w = 0.0;
    for (const auto& h : hopfs)
        if (h.kind == event_kind::hopf) w = std::max(w, std::abs(h.frequency));
    if (w <= 0.0) return 500.0;
    return 4.0 * 200.0 / w;
}

std::vector<branch> trace_all_branches(const model& m, const vec& params,
                                       const std::string& bif_param, double lo, double hi,
                                       std::vector<std::string>* notes) {
    int ip = m.param_index(bif_param);
    if (ip < 0) throw config_error("model '" + m.id + "' has no parameter '" + bif_param + "'");
    if (!(hi > lo)) throw config_error("empty parameter range");

    std::vector<branch> branches;
    const double seed_probe_gap = 1e-6;  // matches the tracer's lower-end gap
    for (double a : {lo + seed_probe_gap, 0.5 * (lo + hi), hi}) {
        vec p = params;
        p[static_cast<size_t>(ip)] = a;
        auto seeds = m.seeds ? m.seeds(p) : std::vector<vec>{};
        equilibria_scan scan = find_equilibria_scan(m, p, seeds);
        for (const auto& eq : scan.equilibria) {
            bool known = false;
            for (const auto& b : branches) {
                for (const auto& s : branch_states_at(b, a)) {
                    double scale = std::max(1.0, norm_inf(eq.state));
                    if (dist_inf(s, eq.state) < 1e-5 * scale) {
                        known = true;
                        break;
                    }
                }
                if (known) break;
            }
            if (known) continue;
            try {
                branches.push_back(trace_branch(m, params, bif_param, lo, hi, eq));
            } catch (const std::exception& ex) {
                if (notes) notes->push_back(std::string("branch trace failed: ") + ex.what());
            }
        }
    }
    return branches;
}

stop_classification classify_stop_kind(const model& m, const branch& main_branch,
                                       const std::vector<branch>& other_branches,
                                       double stop_param, double neighborhood) {
    stop_classification out;
    out.param_at = stop_param;

    std::vector<const branch*> all;
    all.push_back(&main_branch);
    for (const auto& b : other_branches) all.push_back(&b);

    double cover_lo = kinf, cover_hi = -kinf;
    for (const branch* b : all)
        for (const auto& p : b->points) {
            cover_lo = std::min(cover_lo, p.param);
            cover_hi = std::max(cover_hi, p.param);
        }
    if (!(cover_lo <= cover_hi)) {
        out.kind = stop_kind_t::no_stop;
        return out;
    }

    double wlo = stop_param - neighborhood, whi = stop_param + neighborhood;
    if (wlo < cover_lo) {
        wlo = cover_lo;
        out.one_sided = true;
    }
    if (whi > cover_hi) {
        whi = cover_hi;
        out.one_sided = true;
    }
    if (wlo > whi) wlo = whi = std::clamp(stop_param, cover_lo, cover_hi);

    // (a) a real eigenvalue changing the sign of its real part gives a det(J)
    // sign change, i.e. a fold or branch-point event inside the window
    for (const branch* b : all) {
        for (const auto& e : detect_events(m, *b)) {
            if (e.kind != event_kind::fold && e.kind != event_kind::branch_point) continue;
            if (e.param_at < wlo - 1e-12 || e.param_at > whi + 1e-12) continue;
            out.eigen_zero_crossing = true;
            if (e.kind == event_kind::fold) out.fold_tangent_reversal = true;
        }
    }

    // (b) a second branch passing within 1e-4 of the primary one
    for (const auto& b : other_branches) {
        if (min_branch_distance(main_branch, b, wlo, whi) < 1e-4) {
            out.coinciding_branches = true;
            break;
        }
    }

    if (!out.eigen_zero_crossing && !out.coinciding_branches)
        out.kind = stop_kind_t::sudden_stop;
    else if (out.eigen_zero_crossing && out.coinciding_branches)
        out.kind = stop_kind_t::transcritical;
    else if (out.eigen_zero_crossing && out.fold_tangent_reversal)
        out.kind = stop_kind_t::saddle_node;
    else if (out.coinciding_branches)
        out.kind = stop_kind_t::transcritical;
    else
        out.kind = stop_kind_t::saddle_node;
    return out;
}

window_result window_report(const bif_event& hopf, double stop, const scan_result& scan) {
    window_result w;
    if (hopf.param_at == stop) return w;  // degenerate: empty window
    for (const auto& r : scan.records) {
        bool beyond = stop < hopf.param_at ? r.param > hopf.param_at : r.param < hopf.param_at;
        if (beyond && r.cls == osc_class::sustained)
            throw config_error("sustained oscillation beyond the Hopf side of the window");
    }
    w.lo = std::min(hopf.param_at, stop);
    w.hi = std::max(hopf.param_at, stop);
    w.empty = false;
    w.continuity = true;
    for (const auto& r : scan.records)
        if (r.param > w.lo && r.param < w.hi && r.cls != osc_class::sustained)
            w.continuity = false;
    return w;
}

criterion_report check_criterion(const model& m, const vec& params, const std::string& bif_param,
                                 double lo, double hi, const vec& x0, int grid_density) {
    criterion_report rep;
    rep.model_id = m.id;
    rep.bif_param = bif_param;
    rep.range_lo = lo;
    rep.range_hi = hi;

    int ip = m.param_index(bif_param);
    if (ip < 0) throw config_error("model '" + m.id + "' has no parameter '" + bif_param + "'");
    if (!(hi > lo)) throw config_error("empty parameter range for criterion check");
    if (grid_density < 1) throw config_error("grid density must be positive");

    auto param_set = [&](double a) {
        vec p = params;
        p[static_cast<size_t>(ip)] = a;
        return p;
    };
    auto note = [&](const std::string& s) { rep.notes.push_back(s); };

    // ---- equilibrium branches seeded at lo, mid and hi ----------------
    std::vector<branch> branches;
    std::vector<int> hopf_branch;  // branch index per entry of rep.c3.hopf
    try {
        branches = trace_all_branches(m, params, bif_param, lo, hi, &rep.notes);
    } catch (const std::exception& ex) {
        rep.indeterminate.push_back("continuation");
        note(std::string("continuation: ") + ex.what());
    }
    if (branches.empty() &&
        std::find(rep.indeterminate.begin(), rep.indeterminate.end(), "continuation") ==
            rep.indeterminate.end())
        rep.indeterminate.push_back("continuation");

    // ---- events and hypothesis C3 --------------------------------------
    rep.c3.checked = true;
    try {
        for (size_t bi = 0; bi < branches.size(); ++bi) {
            for (const auto& e : detect_events(m, branches[bi])) {
                rep.events.push_back(e);
                if (e.kind == event_kind::hopf && e.param_at >= lo && e.param_at <= hi) {
                    rep.c3.hopf.push_back(e);
                    hopf_branch.push_back(static_cast<int>(bi));
                }
            }
        }
    } catch (const std::exception& ex) {
        rep.indeterminate.push_back("event_detection");
        note(std::string("event detection: ") + ex.what());
    }
    std::sort(rep.events.begin(), rep.events.end(),
              [](const bif_event& a, const bif_event& b) { return a.param_at < b.param_at; });
    rep.events.erase(std::unique(rep.events.begin(), rep.events.end(),
                                 [](const bif_event& a, const bif_event& b) {
                                     return a.kind == b.kind &&
                                            std::abs(a.param_at - b.param_at) <
                                                1e-8 * std::max(1.0, std::abs(a.param_at));
                                 }),
                     rep.events.end());
    {
        // keep the hopf list aligned after the same dedup
        std::vector<bif_event> hs;
        std::vector<int> hb;
        for (size_t i = 0; i < rep.c3.hopf.size(); ++i) {
            bool dup = false;
            for (const auto& h : hs)
                if (std::abs(h.param_at - rep.c3.hopf[i].param_at) <
                    1e-8 * std::max(1.0, std::abs(h.param_at)))
                    dup = true;
            if (!dup) {
                hs.push_back(rep.c3.hopf[i]);
                hb.push_back(hopf_branch[i]);
            }
        }
        rep.c3.hopf = hs;
        hopf_branch = hb;
    }
    rep.c3.holds = !rep.c3.hopf.empty();

    // ---- coarse oscillation scan (11 cells across the range) -----------
    cell_options copt;
    copt.base_duration = scan_base_duration(rep.c3.hopf);
    scan_result coarse;
    try {
        coarse = scan_parameter(m, params, bif_param, linspace(lo, hi, 11), x0, copt);
    } catch (const std::exception& ex) {
        rep.indeterminate.push_back("oscillation_scan");
        note(std::string("oscillation scan: ") + ex.what());
    }
    rep.scan_records = coarse.records;

    // maximal sustained run (most cells, lower parameters on ties)
    int block_lo = -1, block_hi = -1;
    {
        int best_len = 0;
        int i = 0, n = static_cast<int>(coarse.records.size());
        while (i < n) {
            if (coarse.records[static_cast<size_t>(i)].cls != osc_class::sustained) {
                ++i;
                continue;
            }
            int j = i;
            while (j + 1 < n &&
                   coarse.records[static_cast<size_t>(j + 1)].cls == osc_class::sustained)
                ++j;
            if (j - i + 1 > best_len) {
                best_len = j - i + 1;
                block_lo = i;
                block_hi = j;
            }
            i = j + 1;
        }
    }

    auto hopf_between = [&](double a, double b) {
        double l = std::min(a, b), h = std::max(a, b);
        for (const auto& e : rep.c3.hopf)
            if (e.param_at > l && e.param_at < h) return true;
        return false;
    };

    // ---- stop edges around the sustained block --------------------------
    bool stop_found = false;
    double stop_param = 0.0;
    bool lower_hopf_bounded = false, upper_hopf_bounded = false;
    if (block_lo >= 0) {
        const auto& grid = coarse.grid;
        for (int dir : {-1, +1}) {
            bool& bounded = dir < 0 ? lower_hopf_bounded : upper_hopf_bounded;
            int e = dir < 0 ? block_lo : block_hi;
            int q = e + dir;
            if (q < 0 || q >= static_cast<int>(grid.size())) continue;  // range end
            if (hopf_between(grid[static_cast<size_t>(e)], grid[static_cast<size_t>(q)])) {
                bounded = true;
                continue;
            }
            // adjudicate the edge: a cold start may just have missed the
            // attractor, so re-check the neighbour from a carried state
            vec carry;
            classify_cell(m, param_set(grid[static_cast<size_t>(e)]), x0, m.observable, copt,
                          &carry);
            bool decided = false;
            while (!decided && q >= 0 && q < static_cast<int>(grid.size())) {
                vec next_carry;
                oscillation_record rec =
                    classify_cell(m, param_set(grid[static_cast<size_t>(q)]),
                                  carry.empty() ? x0 : carry, m.observable, copt, &next_carry);
                if (rec.cls == osc_class::sustained) {
                    std::ostringstream os;
                    os << "cell at " << bif_param << "=" << grid[static_cast<size_t>(q)]
                       << " sustains from a carried state; block extended";
                    note(os.str());
                    if (dir < 0) block_lo = q;
                    else block_hi = q;
                    e = q;
                    q += dir;
                    carry = next_carry;
                    if (q >= 0 && q < static_cast<int>(grid.size()) &&
                        hopf_between(grid[static_cast<size_t>(e)], grid[static_cast<size_t>(q)])) {
                        bounded = true;
                        decided = true;
                    }
                    continue;
                }
                if (rec.cls == osc_class::none && !stop_found) {
                    try {
                        stop_param = find_stop_point(m, params, bif_param,
                                                     grid[static_cast<size_t>(e)],
                                                     grid[static_cast<size_t>(q)], x0, copt);
                        stop_found = true;
                    } catch (const std::exception& ex) {
                        rep.indeterminate.push_back("stop_bisection");
                        note(std::string("stop bisection: ") + ex.what());
                    }
                } else if (rec.cls == osc_class::none) {
                    std::ostringstream os;
                    os << "second stop edge near " << bif_param << "="
                       << grid[static_cast<size_t>(q)] << " left unrefined";
                    note(os.str());
                }
                decided = true;
            }
        }
    }

    // ---- hypothesis C2: a sudden stop ----------------------------------
    rep.c2.checked = true;
    rep.c2.stop_found = stop_found;
    if (stop_found) {
        rep.c2.stop_param = stop_param;
        try {
            // primary branch: the one carrying a Hopf event, else the longest
            int main_idx = hopf_branch.empty() ? -1 : hopf_branch.front();
            if (main_idx < 0) {
                size_t best = 0;
                for (size_t i = 0; i < branches.size(); ++i)
                    if (branches[i].points.size() > branches[best].points.size()) best = i;
                main_idx = branches.empty() ? -1 : static_cast<int>(best);
            }
            if (main_idx < 0) throw solver_error("no branch available for stop classification");
            std::vector<branch> others;
            for (size_t i = 0; i < branches.size(); ++i)
                if (static_cast<int>(i) != main_idx) others.push_back(branches[i]);
            double nbhd = 0.01 * std::max(1.0, std::abs(stop_param));
            rep.stop_detail = classify_stop_kind(m, branches[static_cast<size_t>(main_idx)],
                                                 others, stop_param, nbhd);
            rep.stop_kind = rep.stop_detail.kind;
        } catch (const std::exception& ex) {
            rep.indeterminate.push_back("stop_classification");
            note(std::string("stop classification: ") + ex.what());
        }
        rep.c2.kind = rep.stop_kind;
        rep.c2.holds = rep.stop_kind == stop_kind_t::sudden_stop;
    }

    // ---- hypothesis C4: sustained window between stop and Hopf ----------
    rep.c4.checked = true;
    const bif_event* window_hopf = nullptr;
    if (stop_found && rep.c3.holds) {
        // the Hopf bounding the oscillation window on the far side of the stop:
        // nearest one above it, else nearest one below
        const bif_event* above = nullptr;
        const bif_event* below = nullptr;
        for (const auto& h : rep.c3.hopf) {
            if (h.param_at > stop_param) {
                if (!above || h.param_at < above->param_at) above = &h;
            } else if (!below || h.param_at > below->param_at) {
                below = &h;
            }
        }
        window_hopf = above ? above : below;
    }
    if (window_hopf) {
        window_result w;
        try {
            w = window_report(*window_hopf, stop_param, coarse);
        } catch (const std::exception& ex) {
            rep.indeterminate.push_back("window");
            note(std::string("window: ") + ex.what());
        }
        rep.c4.window_defined = !w.empty;
        rep.c4.window_lo = w.lo;
        rep.c4.window_hi = w.hi;
        if (!w.empty && !w.continuity)
            note("coarse scan shows non-sustained cells inside the window");
        if (!w.empty) {
            bool all_sustained = true;
            vec carry = x0;  // first cell cold, then state carried toward the Hopf
            double from = stop_param, to = window_hopf->param_at;
            for (int k = 1; k <= grid_density; ++k) {
                double a = from + (to - from) * double(k) / double(grid_density + 1);
                vec next_carry;
                oscillation_record rec =
                    classify_cell(m, param_set(a), carry, m.observable, copt, &next_carry);
                rep.c4.cells.push_back({a, rec.cls});
                if (rec.cls != osc_class::sustained) all_sustained = false;
                carry = next_carry;
            }
            rep.c4.holds = all_sustained;
        }
    }

    // ---- hypothesis C1: an equilibrium inside the window -----------------
    rep.c1.checked = true;
    double c1_at;
    if (rep.c4.window_defined) c1_at = 0.5 * (rep.c4.window_lo + rep.c4.window_hi);
    else if (rep.c3.hopf.size() >= 2) {
        double hmin = kinf, hmax = -kinf;
        for (const auto& h : rep.c3.hopf) {
            hmin = std::min(hmin, h.param_at);
            hmax = std::max(hmax, h.param_at);
        }
        c1_at = 0.5 * (hmin + hmax);
    } else c1_at = 0.5 * (lo + hi);
    rep.c1.at_param = c1_at;
    try {
        vec p = param_set(c1_at);
        auto seeds = m.seeds ? m.seeds(p) : std::vector<vec>{};
        equilibria_scan sc = find_equilibria_scan(m, p, seeds);
        rep.c1.count = static_cast<int>(sc.equilibria.size());
        rep.c1.holds = rep.c1.count >= 1;
    } catch (const std::exception& ex) {
        rep.indeterminate.push_back("equilibria");
        note(std::string("equilibrium scan: ") + ex.what());
    }

    // ---- semi-recurrence: both edges Hopf-bounded, damped stop below ----
    bool recurrence_holds = rep.c1.holds && rep.c2.holds && rep.c3.holds && rep.c4.holds;
    bool hopf_bracketed = block_lo >= 0 && lower_hopf_bounded && upper_hopf_bounded;
    if (!recurrence_holds && hopf_bracketed && rep.c3.hopf.size() >= 2) {
        double inner = kinf;
        for (const auto& h : rep.c3.hopf) inner = std::min(inner, h.param_at);
        std::optional<double> damped_at, none_at;
        for (double f : {0.95, 0.9, 0.75, 0.5}) {
            double a = inner * f;
            if (a <= lo) break;
            osc_class c = classify_cell(m, param_set(a), x0, m.observable, copt).cls;
            if (c == osc_class::damped) damped_at = a;
            else if (c == osc_class::none && damped_at) {
                none_at = a;
                break;
            }
        }
        if (damped_at && !none_at && !coarse.records.empty() &&
            coarse.records.front().cls == osc_class::none)
            none_at = coarse.grid.front();
        if (damped_at && none_at) {
            double t = *damped_at, f = *none_at;
            double width0 = std::abs(t - f);
            for (int it = 0; it < 12 && std::abs(t - f) > 1e-3 * width0; ++it) {
                double mid = 0.5 * (t + f);
                if (classify_cell(m, param_set(mid), x0, m.observable, copt).cls ==
                    osc_class::damped)
                    t = mid;
                else
                    f = mid;
            }
            rep.damped_stop_found = true;
            rep.damped_stop_param = 0.5 * (t + f);
        } else if (damped_at) {
            // damped all the way to the range end
            rep.damped_stop_found = true;
            rep.damped_stop_param = lo;
            note("damped oscillations persist to the lower range end");
        }
    }

    // ---- verdict ---------------------------------------------------------
    if (recurrence_holds) rep.verdict = verdict_kind::recurrence;
    else if (hopf_bracketed && rep.c3.hopf.size() >= 2 && rep.damped_stop_found)
        rep.verdict = verdict_kind::semi_recurrence;
    else rep.verdict = verdict_kind::none;

    // the earlier criterion needs an explicit slow-fast split and an observed
    // oscillation to say anything at all
    bool any_sustained = false;
    for (const auto& r : rep.scan_records)
        if (r.cls == osc_class::sustained) any_sustained = true;
    rep.old_criterion_applies = m.explicit_slow_fast && any_sustained;

    return rep;
}

}  // namespace recur
