#include "recur/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "recur/criterion.hpp"
#include "recur/cycle.hpp"
#include "recur/report.hpp"
#include "recur/svg.hpp"

namespace recur {

using nlohmann::json;

namespace {

std::vector<double> parse_number_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw config_error(std::string("bad ") + what + " entry '" + item + "'");
        }
    }
    if (out.empty()) throw config_error(std::string("empty ") + what + " list");
    return out;
}

std::pair<double, double> parse_pair(const std::string& s, const char* what) {
    auto colon = s.find(':');
    if (colon == std::string::npos)
        throw config_error(std::string(what) + " must be lo:hi, got '" + s + "'");
    try {
        size_t p1 = 0, p2 = 0;
        std::string a = s.substr(0, colon), b = s.substr(colon + 1);
        double lo = std::stod(a, &p1), hi = std::stod(b, &p2);
        if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument(s);
        return {lo, hi};
    } catch (const std::exception&) {
        throw config_error(std::string("bad ") + what + " '" + s + "'");
    }
}

std::pair<std::string, double> parse_set(const std::string& s) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw config_error("--set expects name=value, got '" + s + "'");
    std::string name = s.substr(0, eq), val = s.substr(eq + 1);
    try {
        size_t pos = 0;
        double v = std::stod(val, &pos);
        if (pos != val.size()) throw std::invalid_argument(val);
        return {name, v};
    } catch (const std::exception&) {
        throw config_error("bad value in --set '" + s + "'");
    }
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir);
    std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open " + path + " for writing");
    out << content;
    if (!out) throw config_error("failed writing " + path);
    std::cout << "wrote " << path << "\n";
}

step_method parse_method(const std::string& s) {
    if (s == "explicit") return step_method::explicit_adaptive;
    if (s == "implicit") return step_method::implicit_stiff;
    throw config_error("integrator method must be 'explicit' or 'implicit', got '" + s + "'");
}

const char* method_name(step_method m) {
    return m == step_method::implicit_stiff ? "implicit" : "explicit";
}

// raw flag values; sentinel = not given
struct cli_opts {
    std::string config_file;
    std::string model_id;
    std::vector<std::string> sets;
    std::string bif_param;
    std::string range_s;
    std::string grid_s;
    std::string x0_s;
    std::string out_dir;
    double rtol = std::nan(""), atol = std::nan(""), max_step = std::nan(""),
           dense_dt = std::nan("");
    std::string method;
    std::string tspan_s;
    double duration = std::nan("");
    int cells = 11;
    int grid_density = 9;
    bool timeseries = false;
};

run_config resolve(const cli_opts& o) {
    run_config cfg;
    if (!o.config_file.empty()) {
        std::ifstream in(o.config_file);
        if (!in) throw config_error("cannot open config file " + o.config_file);
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = parse_config_json(ss.str());
    }
    if (!o.model_id.empty()) cfg.model_id = o.model_id;
    for (const auto& s : o.sets) cfg.params.push_back(parse_set(s));
    if (!o.bif_param.empty()) cfg.bif_param = o.bif_param;
    if (!o.range_s.empty()) {
        auto [lo, hi] = parse_pair(o.range_s, "range");
        cfg.has_range = true;
        cfg.range_lo = lo;
        cfg.range_hi = hi;
    }
    if (!o.grid_s.empty()) cfg.grid = parse_number_list(o.grid_s, "grid");
    if (!o.x0_s.empty()) cfg.x0 = parse_number_list(o.x0_s, "x0");
    if (!std::isnan(o.rtol)) {
        cfg.integ.rtol = o.rtol;
        cfg.has_rtol = true;
    }
    if (!std::isnan(o.atol)) {
        cfg.integ.atol = o.atol;
        cfg.has_atol = true;
    }
    if (!std::isnan(o.max_step)) {
        cfg.integ.max_step = o.max_step;
        cfg.has_max_step = true;
    }
    if (!std::isnan(o.dense_dt)) {
        cfg.integ.dense_dt = o.dense_dt;
        cfg.has_dense_dt = true;
    }
    if (!o.method.empty()) {
        cfg.integ.method = parse_method(o.method);
        cfg.has_method = true;
    }
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (cfg.out_dir.empty()) {
        const char* env = std::getenv("RECUR_OUT_DIR");
        cfg.out_dir = env && *env ? env : ".";
    }
    return cfg;
}

// everything the subcommands need, resolved against the model registry
struct resolved {
    const model* m = nullptr;
    vec params;
    std::string bif_param;
    int bif_index = -1;
    double lo = 0.0, hi = 0.0;
    vec x0;
    integrator_config integ;
    std::string out_dir;
    std::vector<double> grid;
};

resolved materialize(const run_config& cfg) {
    if (cfg.model_id.empty()) throw config_error("no model given (--model or config file)");
    resolved r;
    r.m = &get_model(cfg.model_id);
    r.params = apply_param_overrides(*r.m, cfg.params);
    r.bif_param = cfg.bif_param.empty() ? r.m->bif_param : cfg.bif_param;
    r.bif_index = r.m->param_index(r.bif_param);
    if (r.bif_index < 0)
        throw config_error("model '" + r.m->id + "' has no parameter '" + r.bif_param + "'");
    r.lo = cfg.has_range ? cfg.range_lo : r.m->bif_lo;
    r.hi = cfg.has_range ? cfg.range_hi : r.m->bif_hi;
    if (!(r.hi > r.lo)) throw config_error("range must satisfy lo < hi");
    if (cfg.x0.empty()) {
        r.x0 = r.m->x0;
    } else {
        if (static_cast<int>(cfg.x0.size()) != r.m->dim)
            throw config_error("x0 needs " + std::to_string(r.m->dim) + " entries");
        r.x0 = cfg.x0;
    }
    r.integ = cfg.integ;
    r.out_dir = cfg.out_dir;
    r.grid = cfg.grid;
    return r;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = lo + (hi - lo) * double(i) / double(n - 1);
    g.back() = hi;
    return g;
}

// merged, deduplicated events across all branches
std::vector<bif_event> merged_events(const model& m, const std::vector<branch>& branches) {
    std::vector<bif_event> events;
    for (const auto& b : branches)
        for (const auto& e : detect_events(m, b)) events.push_back(e);
    std::sort(events.begin(), events.end(),
              [](const bif_event& a, const bif_event& b) { return a.param_at < b.param_at; });
    events.erase(std::unique(events.begin(), events.end(),
                             [](const bif_event& a, const bif_event& b) {
                                 return a.kind == b.kind &&
                                        std::abs(a.param_at - b.param_at) <
                                            1e-8 * std::max(1.0, std::abs(a.param_at));
                             }),
                 events.end());
    return events;
}

size_t main_branch_index(const model& m, const std::vector<branch>& branches) {
    for (size_t i = 0; i < branches.size(); ++i)
        for (const auto& e : detect_events(m, branches[i]))
            if (e.kind == event_kind::hopf) return i;
    size_t best = 0;
    for (size_t i = 0; i < branches.size(); ++i)
        if (branches[i].points.size() > branches[best].points.size()) best = i;
    return best;
}

int cmd_simulate(const resolved& r, const cli_opts& o) {
    auto [t0, t1] = o.tspan_s.empty() ? std::pair<double, double>{0.0, 500.0}
                                      : parse_pair(o.tspan_s, "tspan");
    if (!(t1 > t0)) throw config_error("tspan must satisfy t0 < t1");
    trajectory tr = integrate(*r.m, r.params, r.x0, t0, t1, r.integ);
    write_file(r.out_dir, "trajectory.csv", trajectory_csv(*r.m, tr));
    if (tr.truncated()) {
        std::cerr << "integration " << (tr.diverged ? "diverged" : "failed") << " at t=" << tr.t_end
                  << "\n";
        return 3;
    }
    return 0;
}

int cmd_equilibria(const resolved& r) {
    auto seeds = r.m->seeds ? r.m->seeds(r.params) : std::vector<vec>{};
    equilibria_scan sc = find_equilibria_scan(*r.m, r.params, seeds);
    std::string doc = equilibria_json(sc.equilibria);
    validate_schema(doc, "equilibria.json");
    write_file(r.out_dir, "equilibria.json", doc);
    std::cout << sc.equilibria.size() << " equilibria (" << sc.failed_seeds
              << " seeds failed)\n";
    return 0;
}

int cmd_branch(const resolved& r) {
    std::vector<std::string> notes;
    auto branches = trace_all_branches(*r.m, r.params, r.bif_param, r.lo, r.hi, &notes);
    for (const auto& n : notes) std::cerr << n << "\n";
    if (branches.empty()) throw solver_error("no equilibrium branch could be traced");
    size_t main_idx = main_branch_index(*r.m, branches);
    write_file(r.out_dir, "branch.csv", branch_csv(*r.m, branches[main_idx]));
    int extra = 2;
    for (size_t i = 0; i < branches.size(); ++i) {
        if (i == main_idx) continue;
        write_file(r.out_dir, "branch_" + std::to_string(extra++) + ".csv",
                   branch_csv(*r.m, branches[i]));
    }
    auto events = merged_events(*r.m, branches);
    std::string doc = events_json(events);
    validate_schema(doc, "events.json");
    write_file(r.out_dir, "events.json", doc);
    for (const auto& e : events)
        std::cout << to_string(e.kind) << " at " << r.bif_param << "=" << e.param_at
                  << (e.kind == event_kind::hopf
                          ? "  (frequency " + std::to_string(e.frequency) + ")"
                          : std::string())
                  << "\n";
    return 0;
}

int cmd_scan(const resolved& r, const cli_opts& o) {
    std::vector<double> grid = r.grid;
    if (grid.empty()) {
        if (o.cells < 3) throw config_error("scan needs at least 3 cells");
        grid = linspace(r.lo, r.hi, o.cells);
    }
    cell_options copt;
    copt.integ = r.integ;
    if (!std::isnan(o.duration)) copt.base_duration = o.duration;
    scan_result sc = scan_parameter(*r.m, r.params, r.bif_param, grid, r.x0, copt);
    write_file(r.out_dir, "scan.csv", scan_csv(sc));
    for (const auto& rec : sc.records)
        std::cout << r.bif_param << "=" << rec.param << "  " << to_string(rec.cls)
                  << (rec.integration_failed ? "  [integration failed]" : "") << "\n";
    if (sc.has_stop_bracket)
        std::cout << "stop bracket: (" << sc.stop_bracket.first << ", " << sc.stop_bracket.second
                  << ")\n";
    return 0;
}

int cmd_criterion(const resolved& r, const cli_opts& o) {
    criterion_report rep =
        check_criterion(*r.m, r.params, r.bif_param, r.lo, r.hi, r.x0, o.grid_density);
    std::string doc = criterion_report_json(rep);
    validate_schema(doc, "criterion_report.json");
    write_file(r.out_dir, "criterion.json", doc);
    std::cout << criterion_summary_table(rep);
    return 0;
}

int cmd_cycle(const resolved& r, const cli_opts& o) {
    double base = std::isnan(o.duration) ? 500.0 : o.duration;
    limit_cycle cyc = extract_limit_cycle(*r.m, r.params, r.x0, r.m->observable, base);
    double prox = manifold_proximity(cyc, *r.m, r.params);
    write_file(r.out_dir, "cycle.csv", cycle_csv(*r.m, cyc));
    std::string doc = cycle_header_json(cyc, prox);
    validate_schema(doc, "cycle_header.json");
    write_file(r.out_dir, "cycle.json", doc);
    std::cout << "period " << cyc.period << ", manifold proximity " << prox << "\n";
    return 0;
}

int cmd_plot(const resolved& r, const cli_opts& o) {
    if (o.timeseries) {
        auto [t0, t1] = o.tspan_s.empty() ? std::pair<double, double>{0.0, 500.0}
                                          : parse_pair(o.tspan_s, "tspan");
        if (!(t1 > t0)) throw config_error("tspan must satisfy t0 < t1");
        trajectory tr = integrate(*r.m, r.params, r.x0, t0, t1, r.integ);
        std::string label = r.m->state_names[static_cast<size_t>(r.m->observable)];
        write_file(r.out_dir, "timeseries.svg",
                   render_timeseries_svg(tr, r.m->observable, label));
        return tr.truncated() ? 3 : 0;
    }
    std::vector<std::string> notes;
    auto branches = trace_all_branches(*r.m, r.params, r.bif_param, r.lo, r.hi, &notes);
    if (branches.empty()) throw solver_error("no equilibrium branch could be traced");
    auto events = merged_events(*r.m, branches);

    std::vector<bif_event> hopfs;
    for (const auto& e : events)
        if (e.kind == event_kind::hopf) hopfs.push_back(e);
    cell_options copt;
    copt.integ = r.integ;
    copt.base_duration = std::isnan(o.duration) ? scan_base_duration(hopfs) : o.duration;
    scan_result sc =
        scan_parameter(*r.m, r.params, r.bif_param, linspace(r.lo, r.hi, 11), r.x0, copt);
    if (sc.has_stop_bracket) {
        double stop = find_stop_point(*r.m, r.params, r.bif_param, sc.stop_bracket.first,
                                      sc.stop_bracket.second, r.x0, copt);
        bif_event ev;
        ev.kind = event_kind::oscillation_stop;
        ev.param_at = stop;
        auto states = branch_states_at(branches[main_branch_index(*r.m, branches)], stop);
        ev.state_at = states.empty() ? vec(static_cast<size_t>(r.m->dim), 0.0) : states.front();
        events.push_back(ev);
    }
    write_file(r.out_dir, "bifurcation.svg",
               render_bifurcation_svg(*r.m, branches, events, sc, r.m->observable));
    return 0;
}

}  // namespace

run_config parse_config_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const std::exception& ex) {
        throw config_error(std::string("config is not valid JSON: ") + ex.what());
    }
    if (!doc.is_object()) throw config_error("config root must be an object");
    run_config cfg;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        const json& v = it.value();
        try {
            if (key == "model") {
                cfg.model_id = v.get<std::string>();
            } else if (key == "params") {
                if (!v.is_object()) throw config_error("params must be an object");
                for (auto p = v.begin(); p != v.end(); ++p)
                    cfg.params.emplace_back(p.key(), p.value().get<double>());
            } else if (key == "bif_param") {
                cfg.bif_param = v.get<std::string>();
            } else if (key == "range") {
                if (!v.is_array() || v.size() != 2)
                    throw config_error("range must be [lo, hi]");
                cfg.has_range = true;
                cfg.range_lo = v[0].get<double>();
                cfg.range_hi = v[1].get<double>();
            } else if (key == "grid") {
                for (const auto& g : v) cfg.grid.push_back(g.get<double>());
            } else if (key == "x0") {
                for (const auto& g : v) cfg.x0.push_back(g.get<double>());
            } else if (key == "integrator") {
                if (!v.is_object()) throw config_error("integrator must be an object");
                for (auto p = v.begin(); p != v.end(); ++p) {
                    if (p.key() == "rtol") {
                        cfg.integ.rtol = p.value().get<double>();
                        cfg.has_rtol = true;
                    } else if (p.key() == "atol") {
                        cfg.integ.atol = p.value().get<double>();
                        cfg.has_atol = true;
                    } else if (p.key() == "max_step") {
                        cfg.integ.max_step = p.value().get<double>();
                        cfg.has_max_step = true;
                    } else if (p.key() == "dense_dt") {
                        cfg.integ.dense_dt = p.value().get<double>();
                        cfg.has_dense_dt = true;
                    } else if (p.key() == "method") {
                        cfg.integ.method = parse_method(p.value().get<std::string>());
                        cfg.has_method = true;
                    } else {
                        throw config_error("unknown integrator key '" + p.key() + "'");
                    }
                }
            } else if (key == "out_dir") {
                cfg.out_dir = v.get<std::string>();
            } else {
                throw config_error("unknown config key '" + key + "'");
            }
        } catch (const json::exception& ex) {
            throw config_error("bad config value for '" + key + "': " + ex.what());
        }
    }
    return cfg;
}

std::string config_json(const run_config& cfg) {
    json j;
    if (!cfg.model_id.empty()) j["model"] = cfg.model_id;
    if (!cfg.params.empty()) {
        json p = json::object();
        for (const auto& [k, v] : cfg.params) p[k] = v;
        j["params"] = p;
    }
    if (!cfg.bif_param.empty()) j["bif_param"] = cfg.bif_param;
    if (cfg.has_range) j["range"] = json::array({cfg.range_lo, cfg.range_hi});
    if (!cfg.grid.empty()) j["grid"] = cfg.grid;
    if (!cfg.x0.empty()) j["x0"] = cfg.x0;
    json integ = json::object();
    if (cfg.has_rtol) integ["rtol"] = cfg.integ.rtol;
    if (cfg.has_atol) integ["atol"] = cfg.integ.atol;
    if (cfg.has_max_step) integ["max_step"] = cfg.integ.max_step;
    if (cfg.has_dense_dt) integ["dense_dt"] = cfg.integ.dense_dt;
    if (cfg.has_method) integ["method"] = method_name(cfg.integ.method);
    if (!integ.empty()) j["integrator"] = integ;
    if (!cfg.out_dir.empty()) j["out_dir"] = cfg.out_dir;
    return j.dump(2) + "\n";
}

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"slow-fast recurrence analysis toolkit"};
    app.name("recur");
    app.require_subcommand(0, 1);

    cli_opts o;
    auto add_common = [&](CLI::App* sub, bool with_range) {
        sub->add_option("--config", o.config_file, "JSON config file");
        sub->add_option("--model", o.model_id, "model id (see list-models)");
        sub->add_option("--set", o.sets, "parameter override name=value (repeatable)");
        sub->add_option("--out-dir", o.out_dir, "output directory (default $RECUR_OUT_DIR or .)");
        sub->add_option("--x0", o.x0_s, "initial state, comma separated");
        sub->add_option("--rtol", o.rtol, "relative tolerance");
        sub->add_option("--atol", o.atol, "absolute tolerance");
        sub->add_option("--max-step", o.max_step, "maximum step size");
        sub->add_option("--dense-dt", o.dense_dt, "dense output spacing");
        sub->add_option("--method", o.method, "integrator method: explicit|implicit");
        if (with_range) {
            sub->add_option("--param", o.bif_param, "bifurcation parameter name");
            sub->add_option("--range", o.range_s, "parameter range lo:hi");
        }
    };

    auto* sim = app.add_subcommand("simulate", "integrate and write trajectory.csv");
    add_common(sim, false);
    sim->add_option("--tspan", o.tspan_s, "time span t0:t1 (default 0:500)");

    auto* eq = app.add_subcommand("equilibria", "seed-grid equilibrium scan, equilibria.json");
    add_common(eq, false);

    auto* br = app.add_subcommand("branch", "trace equilibrium branches, branch.csv + events.json");
    add_common(br, true);

    auto* sc = app.add_subcommand("scan", "classify oscillations over a parameter grid, scan.csv");
    add_common(sc, true);
    sc->add_option("--grid", o.grid_s, "explicit parameter grid, comma separated");
    sc->add_option("--cells", o.cells, "grid size over the range (default 11)");
    sc->add_option("--duration", o.duration, "cell base duration");

    auto* cr = app.add_subcommand("criterion", "full recurrence criterion, criterion.json");
    add_common(cr, true);
    cr->add_option("--grid-density", o.grid_density, "interior window grid points (default 9)");

    auto* cy = app.add_subcommand("cycle", "extract one limit-cycle period, cycle.csv + cycle.json");
    add_common(cy, false);
    cy->add_option("--duration", o.duration, "integration base duration (default 500)");

    auto* pl = app.add_subcommand("plot", "render bifurcation.svg (or timeseries.svg)");
    add_common(pl, true);
    pl->add_flag("--timeseries", o.timeseries, "plot observable vs t instead");
    pl->add_option("--tspan", o.tspan_s, "time span for --timeseries");
    pl->add_option("--duration", o.duration, "scan cell base duration");

    auto* lm = app.add_subcommand("list-models", "print the model registry");

    std::vector<const char*> argv;
    argv.push_back("recur");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 2;
    }

    try {
        if (lm->parsed()) {
            for (const auto& id : list_models()) {
                const model& m = get_model(id);
                std::cout << id << "  dim " << m.dim << "  " << m.bif_param << " in ["
                          << m.bif_lo << ", " << m.bif_hi << "]\n";
            }
            return 0;
        }
        resolved r = materialize(resolve(o));
        if (sim->parsed()) return cmd_simulate(r, o);
        if (eq->parsed()) return cmd_equilibria(r);
        if (br->parsed()) return cmd_branch(r);
        if (sc->parsed()) return cmd_scan(r, o);
        if (cr->parsed()) return cmd_criterion(r, o);
        if (cy->parsed()) return cmd_cycle(r, o);
        if (pl->parsed()) return cmd_plot(r, o);
        std::cerr << app.help();
        return 2;
    } catch (const config_error& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 2;
    } catch (const schema_error& ex) {
        std::cerr << "schema validation failed: " << ex.what() << "\n";
        return 3;
    } catch (const solver_error& ex) {
        std::cerr << "numerical failure: " << ex.what() << "\n";
        return 3;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 3;
    }
}

}  // namespace recur
