// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Pass criterion numbers as arguments to run a subset.

#include "kinhydro/diagnostics.hpp"
#include "kinhydro/errors.hpp"
#include "kinhydro/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace kinhydro;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

RunConfig make_run(const std::string& flux, const ScenarioSpec& spec, std::size_t nx, double v_min,
                   double v_max, std::size_t nv, double t_end, Scenario* scenario_out = nullptr)
{
    RunConfig c;
    c.flux = FluxModel::parse(flux);
    c.x_grid = SpatialGrid(nx);
    c.v_grid = VelocityGrid(v_min, v_max, nv);
    c.t_end = t_end;
    auto sc = build_scenario(spec, c.flux, c.x_grid, c.v_grid);
    apply_scenario(c, sc);
    if (scenario_out != nullptr) {
        *scenario_out = sc;
    }
    return c;
}

ScenarioSpec spec(const std::string& initial, const std::string& left = "match",
                  const std::string& right = "match", const std::string& source = "none")
{
    ScenarioSpec s;
    s.initial = initial;
    s.left = left;
    s.right = right;
    s.source = source;
    return s;
}

// worst value - (bound + tolerance) over asserted entries
std::string worst_entry(const DiagnosticsReport& rep)
{
    double worst = -1e300;
    std::string name = "-";
    for (const auto& [n, e] : rep.entries()) {
        if (!e.asserted) {
            continue;
        }
        const double m = e.value - (e.bound + e.tolerance);
        if (m > worst || std::isnan(e.value)) {
            worst = std::isnan(e.value) ? INFINITY : m;
            name = n;
        }
    }
    return fmt("worst margin %.3g at %s", worst, name.c_str());
}

double ulp(double x)
{
    return std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
}

// ---------------------------------------------------------------------------

Outcome ac1()
{
    const VelocityGrid g(-1.5, 2.0, 70);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(g.v_min(), g.v_max());
    std::vector<double> a(g.size());
    std::vector<double> b(g.size());
    std::vector<double> diff(g.size());
    double worst_mass = 0.0;
    double worst_dist = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const double u1 = d(rng);
        const double u2 = d(rng);
        project_equilibrium_into(u1, g, a);
        project_equilibrium_into(u2, g, b);
        worst_mass = std::max(worst_mass, std::abs(zeroth_moment(a, g) - u1) / ulp(u1));
        for (std::size_t j = 0; j < g.size(); ++j) {
            diff[j] = std::abs(a[j] - b[j]);
        }
        const double dist = compensated_sum(diff) * g.dv();
        worst_dist = std::max(worst_dist, std::abs(dist - std::abs(u1 - u2)) /
                                              ulp(std::abs(u1) + std::abs(u2)));
    }
    return {worst_mass <= 4.0 && worst_dist <= 4.0,
            fmt("1000 samples, worst moment error %.2f ulp, worst distance error %.2f ulp",
                worst_mass, worst_dist)};
}

Outcome ac2()
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> state(-0.9, 0.9);
    std::uniform_real_distribution<double> pos(0.2, 0.8);
    std::uniform_real_distribution<double> bump(-0.3, 0.3);
    int failures = 0;
    double worst = -1e300;
    for (int pair = 0; pair < 20; ++pair) {
        const double wl = state(rng);
        const double wr = state(rng);
        const double x0 = pos(rng);
        const double bl = state(rng);
        const double br = state(rng);
        auto clampd = [](double x) { return std::clamp(x, -1.2, 1.2); };
        const auto sa = spec(fmt("riemann:%.17g,%.17g,%.17g", wl, wr, x0),
                             fmt("equilibrium:%.17g", bl), fmt("equilibrium:%.17g", br));
        const auto sb = spec(fmt("riemann:%.17g,%.17g,%.17g", clampd(wl + bump(rng)),
                                 clampd(wr + bump(rng)), std::clamp(x0 + 0.5 * bump(rng), 0.1, 0.9)),
                             fmt("equilibrium:%.17g", clampd(bl + bump(rng))),
                             fmt("equilibrium:%.17g", clampd(br + bump(rng))));
        for (const double eps : {1e-1, 1e-3}) {
            auto ca = make_run("burgers", sa, 100, -1.6, 1.6, 32, 0.3);
            auto cb = make_run("burgers", sb, 100, -1.6, 1.6, 32, 0.3);
            ca.epsilon = eps;
            cb.epsilon = eps;
            // both runs must share dt, so both use the speed bound of the grid
            const auto ra = solve(ca);
            const auto rb = solve(cb);
            const auto led = contraction_ledger(ra.record, rb.record);
            const double margin = (led.lhs - led.rhs) / led.scale;
            worst = std::max(worst, margin);
            if (led.lhs - led.rhs > 1e-10 * led.scale) {
                ++failures;
            }
        }
    }
    return {failures == 0, fmt("40 ledgers (20 pairs x 2 eps), %d violations, max (lhs - rhs)/scale "
                               "%.3g vs 1e-10",
                               failures, worst)};
}

Outcome ac3()
{
    auto c = make_run("burgers", spec("riemann:1,0,0.5"), 200, -1.6, 1.6, 64, 0.4);
    c.cfl = 1.0;
    c.epsilon = 1e-2;
    SupportSpeedMonitor mon;
    std::vector<StepObserver> obs{mon.observer()};
    const auto run = solve(c, obs);
    const auto rep = mon.report();
    // the record also keeps max |g| per step
    const double budget = linf_budget(c);
    const double sup = *std::max_element(run.record.max_abs_g.begin(), run.record.max_abs_g.end());
    return {rep.passed() && sup <= budget,
            fmt("%zu steps, sup|g| %.6g <= %.6g, linf excess %.3g, v excess %.3g, x excess %.3g",
                run.record.n_steps, sup, budget, mon.max_linf_excess(), mon.max_v_excess(),
                mon.max_x_excess())};
}

const std::vector<double> kSweep{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};

std::string rows_text(const SweepResult& r)
{
    std::string s;
    for (const auto& row : r.rows) {
        s += fmt(" %.0e:%.3g", row.epsilon, row.l1_error);
    }
    return s;
}

Outcome ac4()
{
    Scenario sc;
    const auto c = make_run("linear:1", spec("pulse:0.25,0.5,0.3,0.15"), 400, -1.5, 1.5, 60, 0.4, &sc);
    SweepOptions o;
    o.tv_initial = profile_tv(sc.initial.macro, c.x_grid);
    o.jobs = 1;
    const auto r = hydrodynamic_limit_sweep(c, kSweep, exact_oracle(sc.exact), o);
    const double cap = 5.0 * c.x_grid.dx() * o.tv_initial;
    return {r.passed() && r.floor <= cap,
            fmt("floor %.3g (cap %.3g), errors%s", r.floor, cap, rows_text(r).c_str())};
}

Outcome ac5()
{
    bool ok = true;
    std::string detail;
    for (const char* init : {"riemann:1,0,0.3", "riemann:0,1,0.3"}) {
        Scenario sc;
        const auto c = make_run("burgers", spec(init), 400, -1.5, 1.5, 60, 0.25, &sc);
        SweepOptions o;
        o.tv_initial = 1.0;
        o.jobs = 1;
        const auto r = hydrodynamic_limit_sweep(c, kSweep, exact_oracle(sc.exact), o);
        const double cap = 3.0 * c.x_grid.dx() * 1.0;
        const double final_err = r.rows.back().final_error;
        const bool pass = r.passed() && r.rows.back().error.empty() && final_err <= cap;
        ok = ok && pass;
        detail += fmt("[%s floor %.3g,%s; final %.3g <= %.3g] ", init, r.floor, rows_text(r).c_str(),
                      final_err, cap);
    }
    return {ok, detail};
}

Outcome ac6()
{
    std::vector<double> dist;
    for (const double eps : kSweep) {
        auto c = make_run("burgers", spec("sine:0.5,0.25,1", "exact", "exact"), 400, -1.0, 1.0, 40,
                          0.3);
        // the distance behaves like T / (1 - exp(-dt/eps)) / steps; dt << eps keeps it linear
        c.dt_max = 2.5e-4;
        c.epsilon = eps;
        c.snapshot_every = 10;
        c.record_kinetic_snapshots = true;
        c.record_traces = false;
        const auto run = solve(c);
        const auto d = equilibrium_distance(run.record);
        dist.push_back(*std::max_element(d.begin(), d.end()));
    }
    const double slope = loglog_slope(kSweep, dist);
    std::string s;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        s += fmt(" %.0e:%.3g", kSweep[i], dist[i]);
    }
    return {slope >= 0.8 && slope <= 1.2, fmt("slope %.3f in [0.8, 1.2], sup distances%s", slope,
                                              s.c_str())};
}

Outcome ac7()
{
    bool ok = true;
    std::string detail;
    for (const char* init : {"riemann:1,0,0.3", "riemann:0,1,0.3"}) {
        Scenario sc;
        auto c = make_run("burgers", spec(init), 200, -1.5, 1.5, 60, 0.25, &sc);
        c.epsilon = 1e-3;
        c.snapshot_every = 1;
        const auto ks = kruzhkov_constants(sc.data_lo, sc.data_hi, c.v_grid);
        const auto psis = standard_test_functions(c.t_end);
        KineticEntropyMonitor mon(ks, psis);
        std::vector<StepObserver> obs{mon.observer()};
        const auto run = solve(c, obs);
        const auto kin = mon.report(run.record, 1.0, false);

        MacroEntropyInput in;
        in.x_grid = c.x_grid;
        in.v_grid = c.v_grid;
        in.flux = c.flux;
        in.times = run.record.times;
        in.w = run.record.w;
        in.g0 = c.boundary.left;
        in.w1 = sc.right_trace;
        const auto mac = macro_entropy_report(in, ks, psis, 2.0);
        const bool pass = kin.passed() && mac.passed() && kin.entries().size() == 23 * 5 &&
                          mac.entries().size() == 23 * 5;
        ok = ok && pass;
        detail += fmt("[%s kinetic %zu pairs %s; macro %s] ", init, kin.entries().size(),
                      worst_entry(kin).c_str(), worst_entry(mac).c_str());
    }
    return {ok, detail};
}

Outcome ac8()
{
    bool ok = true;
    std::string detail;
    for (const double eps : {1e-2, 1e-3}) {
        Scenario sc;
        auto c = make_run("burgers", spec("manufactured:0.75,0.25", "exact", "exact", "manufactured"),
                          200, -0.5, 1.5, 64, 0.3, &sc);
        c.epsilon = eps;
        const auto run = solve(c);
        auto rc = reference_config(sc, c);
        rc.output_times = {c.t_end};
        const auto ref = run_reference(rc);
        double d = 0.0;
        for (std::size_t i = 0; i < c.x_grid.size(); ++i) {
            d += std::abs(run.record.w.back()[i] - ref.w.back()[i]);
        }
        d *= c.x_grid.dx();
        const double tol = 5.0 * (c.x_grid.dx() + eps);

        // perturbed partner for the ledger with the growth factor
        auto c2 = c;
        const auto w0 = sc.initial.macro;
        c2.initial.macro = [w0](double x) { return w0(x) + 0.05 * std::exp(-100 * (x - 0.4) * (x - 0.4)); };
        c2.initial.w_hi += 0.05;
        const auto run2 = solve(c2);
        const auto led = contraction_ledger(run.record, run2.record);
        const auto rep = contraction_report(run.record, run2.record);
        const bool pass = d <= tol && rep.passed() && led.growth_factor > 1.0;
        ok = ok && pass;
        detail += fmt("[eps %.0e: L1 %.3g <= %.3g; ledger %.4g <= %.4g, growth %.4g] ", eps, d, tol,
                      led.lhs, led.rhs, led.growth_factor);
    }
    return {ok, detail};
}

Outcome ac9()
{
    auto c = make_run("burgers", spec("riemann:1,0,0.3"), 100, -1.5, 1.5, 60, 0.1);
    c.epsilon = 0.05;
    PicardOptions o;
    const auto p = picard_solve(c, o);

    std::vector<KineticField> traj;
    StepObserver ob = [&](const StepView& v) {
        if (traj.empty()) {
            traj.push_back(v.before);
        }
        traj.push_back(v.after.g);
    };
    std::vector<StepObserver> obs{ob};
    solve(c, obs);
    const double dist = trajectory_distance(p.trajectory, traj, p.record.dt, c.x_grid.dx(),
                                            c.v_grid.dv());

    bool decreasing = true;
    for (std::size_t i = 1; i < p.residuals.size(); ++i) {
        decreasing = decreasing && p.residuals[i] < p.residuals[i - 1];
    }
    const double r = 0.5;
    double worst_ratio = 0.0;
    for (std::size_t i = 2; i < p.ratios.size(); ++i) {
        worst_ratio = std::max(worst_ratio, p.ratios[i]);
    }
    const bool pass = decreasing && worst_ratio <= r && dist <= 2.0 * o.tol;
    return {pass, fmt("%zu iterations, strictly decreasing %s, max ratio after iteration 3 %.3f "
                      "<= %.2f, distance to splitting %.3g <= %.3g",
                      p.iterations, decreasing ? "yes" : "no", worst_ratio, r, dist, 2.0 * o.tol)};
}

Outcome ac10()
{
    bool ok = true;
    std::string detail;
    struct Case {
        const char* flux;
        ScenarioSpec spec;
    };
    const std::vector<Case> cases{
        {"burgers", spec("riemann:1,0,0.3", "equilibrium:1", "equilibrium:0")},
        {"burgers", spec("riemann:-0.5,0.8,0.4", "equilibrium:-0.2", "equilibrium:0.6")},
        {"linear:1", spec("riemann:1,0.2,0.3")},
        {"burgers", spec("sine:0.5,0.25,1", "exact", "exact")},
    };
    for (const auto& cs : cases) {
        auto c = make_run(cs.flux, cs.spec, 400, -1.5, 1.5, 60, 0.3);
        c.epsilon = 1e-2;
        BvLipschitzMonitor mon;
        std::vector<StepObserver> obs{mon.observer()};
        const auto run = solve(c, obs);
        const auto rep = mon.report(run.record);
        ok = ok && rep.passed();
        detail += fmt("[%s %s: bv %.3g, excess %.3g; lip %.3g <= %.3g] ", cs.flux,
                      cs.spec.initial.c_str(), mon.max_bv(), rep.at("bv/window_excess").value,
                      mon.max_lipschitz_ratio(run.record), mon.lipschitz_bound());
    }
    return {ok, detail};
}

} // namespace

int main(int argc, char** argv)
{
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all{
        {1, "moment identities", 1.0, ac1},
        {2, "discrete L1 contraction", 30.0, ac2},
        {3, "max principle and support", 20.0, ac3},
        {4, "hydrodynamic limit, linear flux", 120.0, ac4},
        {5, "hydrodynamic limit, Burgers Riemann data", 180.0, ac5},
        {6, "O(eps) equilibrium distance", 120.0, ac6},
        {7, "entropy inequalities", 60.0, ac7},
        {8, "source-term model", 120.0, ac8},
        {9, "fixed-point iteration", 60.0, ac9},
        {10, "BV and time-Lipschitz monitors", 30.0, ac10},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        only.insert(std::atoi(argv[i]));
    }

    int failed = 0;
    for (const auto& c : all) {
        if (!only.empty() && only.count(c.id) == 0) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.passed && in_time;
        failed += pass ? 0 : 1;
        std::printf("AC%d %s  %s (%.2f s of %.0f s%s): %s\n", c.id, pass ? "PASS" : "FAIL", c.name,
                    secs, c.budget_s, in_time ? "" : ", over budget", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%s\n", failed == 0 ? "ALL PASS" : fmt("%d criteria FAILED", failed).c_str());
    return failed == 0 ? 0 : 1;
}
