#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "recur/oscillation.hpp"

using namespace recur;

namespace {

std::pair<std::vector<double>, std::vector<double>> sampled(double t1, int n,
                                                            double (*f)(double)) {
    std::vector<double> t(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        t[static_cast<std::size_t>(i)] = t1 * i / (n - 1.0);
        w[static_cast<std::size_t>(i)] = f(t[static_cast<std::size_t>(i)]);
    }
    return {t, w};
}

trajectory synthetic_trajectory(const std::vector<double>& t, const std::vector<double>& w) {
    trajectory tr;
    tr.times = t;
    for (double v : w) tr.states.push_back({v});
    tr.t_end = t.back();
    return tr;
}

}  // namespace

TEST_CASE("series classifier on synthetic signals") {
    SUBCASE("constant-amplitude sinusoid is sustained") {
        auto [t, w] = sampled(200.0, 5001, +[](double x) { return std::sin(x); });
        series_class sc = classify_series(t, w);
        CHECK(sc.cls == osc_class::sustained);
        CHECK(sc.r == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(sc.peaks >= 5);
        CHECK(sc.period == doctest::Approx(2.0 * 3.14159265358979).epsilon(0.01));
        CHECK(sc.amplitude == doctest::Approx(2.0).epsilon(0.01));
    }
    SUBCASE("exponential decay is damped with the expected per-peak ratio") {
        auto [t, w] =
            sampled(160.0, 5001, +[](double x) { return std::exp(-0.05 * x) * std::sin(x); });
        series_class sc = classify_series(t, w);
        CHECK(sc.cls == osc_class::damped);
        CHECK(sc.r == doctest::Approx(std::exp(-0.05 * 2.0 * 3.14159265358979)).epsilon(0.03));
    }
    SUBCASE("growth is neither sustained nor damped") {
        auto [t, w] =
            sampled(200.0, 5001, +[](double x) { return std::exp(0.02 * x) * std::sin(x); });
        series_class sc = classify_series(t, w);
        CHECK(sc.cls == osc_class::none);
        CHECK(sc.r > 1.01);
    }
    SUBCASE("flat signal has no oscillation") {
        auto [t, w] = sampled(100.0, 1001, +[](double) { return 3.25; });
        CHECK(classify_series(t, w).cls == osc_class::none);
    }
    SUBCASE("two settled peaks are not enough") {
        auto [t, w] = sampled(8.0 * 3.14159265358979, 2001,
                              +[](double x) { return std::sin(x); });
        CHECK(classify_series(t, w).cls == osc_class::none);
    }
}

TEST_CASE("classify_oscillation guards") {
    auto [t, w] = sampled(100.0, 1001, +[](double x) { return std::sin(x); });
    trajectory tr = synthetic_trajectory(t, w);
    CHECK_THROWS_AS((void)classify_oscillation(tr, 0, 1.5), solver_error);
    tr.diverged = true;
    CHECK_THROWS_AS((void)classify_oscillation(tr, 0), solver_error);
}

TEST_CASE("gause classifications at the paper panels") {
    const model& m = get_model("gause");
    SUBCASE("eps=0.2 sits at criticality: slow algebraic decay") {
        // the interior Jacobian trace vanishes exactly at eps=0.2, so the
        // trajectory spirals down slowly; measured per-peak ratio ~0.9875
        for (vec x0 : {vec{5.0, 10.0}, vec{2.0, 12.0}}) {
            vec p = apply_param_overrides(m, {{"eps", 0.2}});
            trajectory tr = integrate(m, p, x0, 0.0, 800.0);
            REQUIRE_FALSE(tr.truncated());
            oscillation_record rec = classify_oscillation(tr, 0);
            CHECK(rec.cls == osc_class::damped);
            CHECK(rec.decay_ratio == doctest::Approx(0.9875).epsilon(0.005));
        }
    }
    SUBCASE("eps=0 is quiescent") {
        vec p = apply_param_overrides(m, {{"eps", 0.0}});
        trajectory tr = integrate(m, p, {5.0, 10.0}, 0.0, 800.0);
        oscillation_record rec = classify_oscillation(tr, 0);
        CHECK(rec.cls == osc_class::none);
    }
}

TEST_CASE("sir-secondary decays below the lower hopf") {
    const model& m = get_model("sir-secondary");
    vec p = apply_param_overrides(m, {{"c3", 0.5}});
    cell_options opt;
    oscillation_record rec =
        classify_cell(m, p, {0.09777, 0.02081, 1.04290}, m.observable, opt);
    CHECK(rec.cls == osc_class::damped);
}

TEST_CASE("gause parameter scan reproduces the panel sweep") {
    const model& m = get_model("gause");
    cell_options opt;
    opt.base_duration = 800.0;
    scan_result sc = scan_parameter(m, m.defaults(), "eps",
                                    {0.0, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4}, {5.0, 10.0}, opt);
    REQUIRE(sc.records.size() == 7);
    CHECK(sc.records[0].cls == osc_class::none);       // eps=0
    CHECK(sc.records[1].cls == osc_class::sustained);  // 0.02
    CHECK(sc.records[2].cls == osc_class::sustained);  // 0.05
    CHECK(sc.records[3].cls == osc_class::sustained);  // 0.1
    CHECK(sc.records[4].cls == osc_class::damped);     // 0.2 (criticality)
    CHECK(sc.records[5].cls == osc_class::none);       // 0.3 focus
    CHECK(sc.records[6].cls == osc_class::none);       // 0.4 focus
    REQUIRE(sc.has_stop_bracket);
    CHECK(sc.stop_bracket.first == 0.02);
    CHECK(sc.stop_bracket.second == 0.0);
}

TEST_CASE("foodweb scan oscillates through beta=0") {
    const model& m = get_model("foodweb");
    cell_options opt;
    scan_result sc =
        scan_parameter(m, m.defaults(), "beta",
                       {0.0, 0.001, 0.01, 0.1, 0.2, 0.3, 0.4, 0.6, 0.8}, {1.0, 1.0, 1.0}, opt);
    for (const auto& rec : sc.records) {
        if (rec.param >= 0.8) {
            CHECK(rec.cls == osc_class::damped);  // above the hopf at 0.766
        } else {
            CHECK(rec.cls == osc_class::sustained);
        }
    }
    CHECK_FALSE(sc.has_stop_bracket);
}

TEST_CASE("foodweb multi-loop spikes at beta=0.001") {
    const model& m = get_model("foodweb");
    vec p = apply_param_overrides(m, {{"beta", 0.001}});
    trajectory tr = integrate(m, p, {1.0, 1.0, 1.0}, 0.0, 2000.0);
    REQUIRE_FALSE(tr.truncated());
    auto y = tr.column(1);
    const std::size_t half = y.size() / 2;
    double wmax = 0.0, wmin = 1e300;
    for (std::size_t i = half; i < y.size(); ++i) {
        wmax = std::max(wmax, y[i]);
        wmin = std::min(wmin, y[i]);
    }
    double peak_hi = 0.0, peak_lo = 1e300;
    for (std::size_t i = half + 1; i + 1 < y.size(); ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
        if (y[i] - wmin < 0.2 * (wmax - wmin)) continue;  // ignore ripple
        peak_hi = std::max(peak_hi, y[i]);
        peak_lo = std::min(peak_lo, y[i]);
    }
    REQUIRE(peak_hi > 0.0);
    // loops of visibly different height within the same epoch
    CHECK(peak_hi - peak_lo > 0.15 * (wmax - wmin));
}

TEST_CASE("find_stop_point pinned brackets") {
    cell_options opt;
    SUBCASE("gause stops at the lower parameter end") {
        const model& m = get_model("gause");
        const double stop =
            find_stop_point(m, m.defaults(), "eps", 0.02, -0.01, {5.0, 10.0}, opt);
        CHECK(std::abs(stop) < 0.005);
    }
    SUBCASE("enso stop lies inside [0, 0.02)") {
        const model& m = get_model("enso");
        const double stop =
            find_stop_point(m, m.defaults(), "delta", 0.02, 0.0, m.x0, opt);
        CHECK(stop >= 0.0);
        CHECK(stop < 0.02);
    }
    SUBCASE("foodweb stop from a cold start") {
        const model& m = get_model("foodweb");
        const double stop =
            find_stop_point(m, m.defaults(), "beta", 0.0, -0.05, {1.0, 1.0, 1.0}, opt);
        CHECK(stop > -0.013);
        CHECK(stop < -0.005);
    }
    SUBCASE("misclassified endpoints are rejected") {
        const model& m = get_model("gause");
        CHECK_THROWS_AS(
            (void)find_stop_point(m, m.defaults(), "eps", 0.3, 0.0, {5.0, 10.0}, opt),
            solver_error);
    }
}

TEST_CASE("recurrence metrics") {
    SUBCASE("sinusoid spends little time at any level") {
        auto [t, w] = sampled(400.0, 8001, +[](double x) { return std::sin(x); });
        trajectory tr = synthetic_trajectory(t, w);
        recurrence_stats st = recurrence_metrics(tr, 0);
        CHECK(st.quiescence_fraction < 0.3);
    }
    SUBCASE("square-wave dwell fraction is recovered") {
        // 95% baseline dwell, brief excursions to 1
        std::vector<double> t, w;
        const int cycles = 40, period = 100;
        for (int i = 0; i < cycles * period; ++i) {
            t.push_back(i);
            w.push_back(i % period < 95 ? 0.0 : 1.0);
        }
        trajectory tr = synthetic_trajectory(t, w);
        recurrence_stats st = recurrence_metrics(tr, 0);
        CHECK(st.quiescence_fraction == doctest::Approx(0.95).epsilon(0.021));
        CHECK(st.spike_count == cycles / 2);
    }
    SUBCASE("degenerate flat window") {
        auto [t, w] = sampled(100.0, 1001, +[](double) { return 2.0; });
        trajectory tr = synthetic_trajectory(t, w);
        recurrence_stats st = recurrence_metrics(tr, 0);
        CHECK(st.quiescence_fraction == 1.0);
        CHECK(st.spike_count == 0);
    }
    SUBCASE("gause quiescence grows toward the stop") {
        const model& m = get_model("gause");
        auto qf_at = [&](double eps) {
            vec p = apply_param_overrides(m, {{"eps", eps}});
            trajectory tr = integrate(m, p, {5.0, 10.0}, 0.0, 800.0);
            return recurrence_metrics(tr, 0).quiescence_fraction;
        };
        CHECK(qf_at(0.02) > qf_at(0.2));
    }
}

TEST_CASE("duration heuristic") {
    CHECK(hopf_informed_duration(0.5) == doctest::Approx(400.0));
    CHECK(hopf_informed_duration(-0.5) == doctest::Approx(400.0));
    CHECK(hopf_informed_duration(0.0) == doctest::Approx(500.0));
}

TEST_CASE("cell classification details") {
    SUBCASE("divergence marks the cell as none, not an exception") {
        const model& m = get_model("foodweb");
        vec p = apply_param_overrides(m, {{"beta", -0.05}});
        cell_options opt;
        oscillation_record rec = classify_cell(m, p, {1.0, 1.0, 1.0}, m.observable, opt);
        CHECK(rec.cls == osc_class::none);
        CHECK(rec.integration_failed);
    }
    SUBCASE("final state is carried out") {
        const model& m = get_model("gause");
        vec p = apply_param_overrides(m, {{"eps", 0.1}});
        cell_options opt;
        vec fs;
        oscillation_record rec = classify_cell(m, p, {5.0, 10.0}, 0, opt, &fs);
        CHECK(rec.cls == osc_class::sustained);
        REQUIRE(fs.size() == 2);
        CHECK(std::isfinite(fs[0]));
        CHECK(std::isfinite(fs[1]));
    }
    SUBCASE("span extension rescues a slow-growth cell") {
        // near the enso hopf a cold start needs the 8x extension before five
        // qualifying peaks fit the settled window (base = 4 windows of 200/omega)
        const model& m = get_model("enso");
        vec p = apply_param_overrides(m, {{"delta", 0.16}});
        cell_options opt;
        opt.base_duration = 3800.0;
        oscillation_record rec = classify_cell(m, p, m.x0, m.observable, opt);
        CHECK(rec.cls == osc_class::sustained);
    }
}

TEST_CASE("scan input validation") {
    const model& m = get_model("gause");
    cell_options opt;
    CHECK_THROWS_AS((void)scan_parameter(m, m.defaults(), "eps", {0.0, 0.1}, m.x0, opt),
                    config_error);
    CHECK_THROWS_AS(
        (void)scan_parameter(m, m.defaults(), "eps", {0.2, 0.1, 0.3}, m.x0, opt),
        config_error);
    CHECK_THROWS_AS(
        (void)scan_parameter(m, m.defaults(), "zzz", {0.1, 0.2, 0.3}, m.x0, opt),
        config_error);
}
