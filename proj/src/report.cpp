#include "recur/report.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace recur {

using nlohmann::json;

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trajectory_csv(const model& m, const trajectory& tr) {
    std::ostringstream os;
    os << "t";
    for (const auto& n : m.state_names) os << "," << n;
    os << "\n";
    for (size_t i = 0; i < tr.times.size(); ++i) {
        os << format_g17(tr.times[i]);
        for (double v : tr.states[i]) os << "," << format_g17(v);
        os << "\n";
    }
    return os.str();
}

std::string branch_csv(const model& m, const branch& br) {
    std::ostringstream os;
    os << "param";
    for (const auto& n : m.state_names) os << "," << n;
    for (int k = 1; k <= m.dim; ++k) os << ",re_lambda_" << k;
    for (int k = 1; k <= m.dim; ++k) os << ",im_lambda_" << k;
    os << ",stability\n";
    for (const auto& pt : br.points) {
        os << format_g17(pt.param);
        for (double v : pt.state) os << "," << format_g17(v);
        for (const auto& ev : pt.spectrum.values) os << "," << format_g17(ev.real());
        for (const auto& ev : pt.spectrum.values) os << "," << format_g17(ev.imag());
        os << "," << to_string(pt.stability) << "\n";
    }
    return os.str();
}

std::string scan_csv(const scan_result& sc) {
    std::ostringstream os;
    os << "param,class,amplitude,period,quiescence_fraction,spike_count\n";
    for (const auto& r : sc.records) {
        os << format_g17(r.param) << "," << to_string(r.cls) << "," << format_g17(r.amplitude)
           << "," << format_g17(r.period) << "," << format_g17(r.quiescence_fraction) << ","
           << r.spike_count << "\n";
    }
    return os.str();
}

std::string cycle_csv(const model& m, const limit_cycle& lc) {
    std::ostringstream os;
    os << "t";
    for (const auto& n : m.state_names) os << "," << n;
    os << "\n";
    for (size_t i = 0; i < lc.times.size(); ++i) {
        os << format_g17(lc.times[i]);
        for (double v : lc.points[i]) os << "," << format_g17(v);
        os << "\n";
    }
    return os.str();
}

namespace {

json vec_json(const vec& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

json event_json(const bif_event& e) {
    json j;
    j["kind"] = to_string(e.kind);
    j["param"] = e.param_at;
    j["state"] = vec_json(e.state_at);
    j["test_value"] = e.test_value;
    j["frequency"] = e.frequency;
    return j;
}

}  // namespace

std::string equilibria_json(const std::vector<equilibrium>& eqs) {
    json out = json::array();
    for (const auto& eq : eqs) {
        json j;
        j["state"] = vec_json(eq.state);
        j["residual_norm"] = eq.residual_norm;
        json evs = json::array();
        for (const auto& ev : eq.spectrum.values)
            evs.push_back(json{{"re", ev.real()}, {"im", ev.imag()}});
        j["eigenvalues"] = evs;
        j["stability"] = to_string(eq.stability);
        out.push_back(j);
    }
    return out.dump(2) + "\n";
}

std::string events_json(const std::vector<bif_event>& events) {
    json out = json::array();
    for (const auto& e : events) out.push_back(event_json(e));
    return out.dump(2) + "\n";
}

std::string cycle_header_json(const limit_cycle& lc, double proximity) {
    json j;
    j["period"] = lc.period;
    j["proximity"] = proximity;
    j["observable"] = lc.observable;
    j["obs_min"] = lc.obs_min;
    j["obs_max"] = lc.obs_max;
    j["samples"] = lc.times.size();
    return j.dump(2) + "\n";
}

std::string criterion_report_json(const criterion_report& rep) {
    json j;
    j["model"] = rep.model_id;
    j["bif_param"] = rep.bif_param;
    j["range"] = json::array({rep.range_lo, rep.range_hi});

    j["c1"] = json{{"checked", rep.c1.checked},
                   {"holds", rep.c1.holds},
                   {"count", rep.c1.count},
                   {"at_param", rep.c1.at_param}};
    j["c2"] = json{{"checked", rep.c2.checked},
                   {"holds", rep.c2.holds},
                   {"stop_found", rep.c2.stop_found},
                   {"stop_param", rep.c2.stop_param},
                   {"kind", to_string(rep.c2.kind)}};
    {
        json hs = json::array();
        for (const auto& h : rep.c3.hopf)
            hs.push_back(json{{"param", h.param_at},
                              {"frequency", h.frequency},
                              {"state", vec_json(h.state_at)}});
        j["c3"] = json{{"checked", rep.c3.checked}, {"holds", rep.c3.holds}, {"hopf", hs}};
    }
    {
        json cells = json::array();
        for (const auto& c : rep.c4.cells)
            cells.push_back(json{{"param", c.param}, {"class", to_string(c.cls)}});
        j["c4"] = json{{"checked", rep.c4.checked},
                       {"holds", rep.c4.holds},
                       {"window_defined", rep.c4.window_defined},
                       {"window", json::array({rep.c4.window_lo, rep.c4.window_hi})},
                       {"cells", cells}};
    }

    j["verdict"] = to_string(rep.verdict);
    j["stop_kind"] = to_string(rep.stop_kind);
    j["stop_classification"] = json{{"param_at", rep.stop_detail.param_at},
                                    {"eigen_zero_crossing", rep.stop_detail.eigen_zero_crossing},
                                    {"coinciding_branches", rep.stop_detail.coinciding_branches},
                                    {"fold_tangent_reversal", rep.stop_detail.fold_tangent_reversal},
                                    {"one_sided", rep.stop_detail.one_sided},
                                    {"kind", to_string(rep.stop_detail.kind)}};
    j["damped_stop"] =
        json{{"found", rep.damped_stop_found}, {"param", rep.damped_stop_param}};
    j["old_criterion_applies"] = rep.old_criterion_applies;

    {
        json sc = json::array();
        for (const auto& r : rep.scan_records)
            sc.push_back(json{{"param", r.param},
                              {"class", to_string(r.cls)},
                              {"amplitude", r.amplitude},
                              {"period", r.period},
                              {"quiescence_fraction", r.quiescence_fraction},
                              {"spike_count", r.spike_count}});
        j["scan"] = sc;
    }
    {
        json evs = json::array();
        for (const auto& e : rep.events) evs.push_back(event_json(e));
        j["events"] = evs;
    }
    j["indeterminate"] = rep.indeterminate;
    j["notes"] = rep.notes;
    return j.dump(2) + "\n";
}

std::string criterion_summary_table(const criterion_report& rep) {
    std::ostringstream os;
    os << "model: " << rep.model_id << "   parameter: " << rep.bif_param << " in ["
       << rep.range_lo << ", " << rep.range_hi << "]\n";
    auto mark = [](bool b) { return b ? "yes" : "no"; };
    os << "  C1 equilibrium in window   " << mark(rep.c1.holds) << "  (count " << rep.c1.count
       << " at " << rep.c1.at_param << ")\n";
    os << "  C2 sudden stop             " << mark(rep.c2.holds);
    if (rep.c2.stop_found)
        os << "  (stop at " << rep.c2.stop_param << ", " << to_string(rep.c2.kind) << ")";
    os << "\n";
    os << "  C3 Hopf bifurcation        " << mark(rep.c3.holds);
    if (!rep.c3.hopf.empty()) {
        os << "  (";
        for (size_t i = 0; i < rep.c3.hopf.size(); ++i)
            os << (i ? ", " : "") << rep.c3.hopf[i].param_at;
        os << ")";
    }
    os << "\n";
    os << "  C4 sustained window        " << mark(rep.c4.holds);
    if (rep.c4.window_defined)
        os << "  (" << rep.c4.window_lo << " .. " << rep.c4.window_hi << ")";
    os << "\n";
    if (rep.damped_stop_found)
        os << "  damped stop                yes  (at " << rep.damped_stop_param << ")\n";
    os << "  verdict: " << to_string(rep.verdict) << "   stop kind: " << to_string(rep.stop_kind)
       << "\n";
    if (!rep.indeterminate.empty()) {
        os << "  indeterminate stages:";
        for (const auto& s : rep.indeterminate) os << " " << s;
        os << "\n";
    }
    return os.str();
}

std::string schema_dir() {
#ifdef RECUR_SCHEMA_DIR
    return RECUR_SCHEMA_DIR;
#else
    return "schemas";
#endif
}

namespace {

void check_node(const json& doc, const json& schema, const std::string& path) {
    if (schema.contains("type")) {
        const auto& ty = schema["type"];
        auto matches = [&](const std::string& t) {
            if (t == "object") return doc.is_object();
            if (t == "array") return doc.is_array();
            if (t == "string") return doc.is_string();
            if (t == "number") return doc.is_number();
            if (t == "integer") return doc.is_number_integer();
            if (t == "boolean") return doc.is_boolean();
            if (t == "null") return doc.is_null();
            throw schema_error("unknown schema type '" + t + "' at " + path);
        };
        bool ok = false;
        if (ty.is_array()) {
            for (const auto& t : ty) ok = ok || matches(t.get<std::string>());
        } else {
            ok = matches(ty.get<std::string>());
        }
        if (!ok)
            throw schema_error("type mismatch at " + path + ": expected " + ty.dump() + ", got " +
                               std::string(doc.type_name()));
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& v : schema["enum"]) ok = ok || v == doc;
        if (!ok) throw schema_error("value " + doc.dump() + " not in enum at " + path);
    }
    if (doc.is_object()) {
        if (schema.contains("required"))
            for (const auto& r : schema["required"])
                if (!doc.contains(r.get<std::string>()))
                    throw schema_error("missing required key '" + r.get<std::string>() + "' at " +
                                       path);
        const json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
        bool extra_ok = true;
        if (schema.contains("additionalProperties") &&
            schema["additionalProperties"].is_boolean())
            extra_ok = schema["additionalProperties"].get<bool>();
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            if (props && props->contains(it.key()))
                check_node(it.value(), (*props)[it.key()], path + "/" + it.key());
            else if (!extra_ok)
                throw schema_error("unexpected key '" + it.key() + "' at " + path);
        }
    }
    if (doc.is_array() && schema.contains("items")) {
        size_t i = 0;
        for (const auto& el : doc) {
            check_node(el, schema["items"], path + "/" + std::to_string(i));
            ++i;
        }
    }
}

}  // namespace

void validate_schema(const std::string& json_text, const std::string& schema_name) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const std::exception& ex) {
        throw schema_error(std::string("document is not valid JSON: ") + ex.what());
    }
    std::string file = schema_dir() + "/" + schema_name;
    std::ifstream in(file);
    if (!in) throw schema_error("cannot open schema " + file);
    json schema;
    try {
        in >> schema;
    } catch (const std::exception& ex) {
        throw schema_error("schema " + file + " is not valid JSON: " + ex.what());
    }
    check_node(doc, schema, "");
}

}  // namespace recur
