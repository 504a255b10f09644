#include "experiment.hpp"

#include "kinhydro/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace kinhydro::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kToolVersion = "1.0.0";
constexpr double kKineticTolConstant = 1.0;
constexpr double kMacroTolConstant = 2.0;
constexpr double kFloorConstant = 5.0;

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where)
{
    if (!j.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::none_of(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; })) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

template <class T>
void read(const json& j, const char* key, T& out)
{
    if (j.contains(key)) {
        out = j.at(key).get<T>();
    }
}

std::string fmt(const char* format, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, format, x);
    return buf;
}

std::string g17(double x)
{
    return fmt("%.17g", x);
}

std::string field_csv(const std::vector<double>& w, const SpatialGrid& grid)
{
    std::string out = "x,value\n";
    for (std::size_t i = 0; i < w.size(); ++i) {
        out += g17(grid.center(i)) + "," + g17(w[i]) + "\n";
    }
    return out;
}

std::string kinetic_csv(const KineticField& g, const SpatialGrid& xg, const VelocityGrid& vg)
{
    std::string out = "x,v,value\n";
    for (std::size_t i = 0; i < g.n_x(); ++i) {
        for (std::size_t j = 0; j < g.n_v(); ++j) {
            out += g17(xg.center(i)) + "," + g17(vg.center(j)) + "," + g17(g(i, j)) + "\n";
        }
    }
    return out;
}

std::string numbered(const char* stem, std::size_t n, const char* ext)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%04zu%s", stem, n, ext);
    return buf;
}

// Rows of a headed CSV as numbers.
std::vector<std::vector<double>> read_csv(const fs::path& path, std::size_t columns)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot read " + path.string());
    }
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            row.push_back(std::strtod(cell.c_str(), nullptr));
        }
        if (row.size() != columns) {
            throw Error("malformed row in " + path.string() + ": " + line);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

json read_json(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot read " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error("invalid JSON in " + path.string() + ": " + e.what());
    }
}

Oracle oracle_for(const Assembled& a)
{
    if (a.scenario.exact) {
        return exact_oracle(a.scenario.exact);
    }
    return reference_oracle(reference_config(a.scenario, a.run));
}

double initial_tv(const RunConfig& run)
{
    const auto g = initialize(run.initial, run.x_grid, run.v_grid);
    const auto w = density_field(g, run.v_grid);
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        tv += std::abs(w[i + 1] - w[i]);
    }
    return tv;
}

ordered_json manifest_json(const ExperimentConfig& cfg, const Assembled& a,
                           const TimeStepPlan& plan)
{
    const auto& run = a.run;
    ordered_json m;
    m["tool"] = {{"name", "kinhydro"}, {"version", kToolVersion}};
    m["name"] = cfg.name;
    m["config_hash"] = config_hash(cfg);
    m["config"] = to_json(cfg);
    m["grid"] = {{"n_x", run.x_grid.size()},
                 {"dx", run.x_grid.dx()},
                 {"v_min", run.v_grid.v_min()},
                 {"v_max", run.v_grid.v_max()},
                 {"n_v", run.v_grid.size()},
                 {"dv", run.v_grid.dv()},
                 {"zero_edge", run.v_grid.zero_edge()}};
    m["flux"] = run.flux.name();
    m["epsilon"] = run.epsilon;
    m["mode"] = run.mode == SolveMode::Picard ? "picard" : "splitting";
    m["has_source"] = run.source.has_value();
    m["scenario"] = {{"initial", a.scenario.initial.description},
                     {"left", run.boundary.left.description},
                     {"right", run.boundary.right.description},
                     {"source", run.source ? run.source->name : "none"},
                     {"data_lo", a.scenario.data_lo},
                     {"data_hi", a.scenario.data_hi}};
    ordered_json time;
    time["t_end"] = run.t_end;
    time["cfl"] = run.cfl;
    time["dt_max"] = run.dt_max ? json(*run.dt_max) : json(nullptr);
    time["sup_force"] = run.source ? run.source->sup_force : 0.0;
    time["a_inf"] = plan.a_inf;
    time["dt"] = plan.dt;
    time["n_steps"] = plan.n_steps;
    time["courant"] = plan.courant;
    time["rule"] = "dt = T / ceil(T / min(cfl dx / a_inf, cfl dv / sup_force, dt_max))";
    m["time"] = time;

    const auto ks = kruzhkov_constants(a.scenario.data_lo, a.scenario.data_hi, run.v_grid);
    ordered_json psis = ordered_json::array();
    for (const auto& p : standard_test_functions(run.t_end)) {
        psis.push_back({{"name", p.name()},
                        {"x_center", p.x_center()},
                        {"x_radius", p.x_radius()},
                        {"t_center", p.t_center()},
                        {"t_radius", p.t_radius()},
                        {"gradient_l1", p.gradient_l1()}});
    }
    ordered_json tol;
    tol["kinetic_entropy_constant"] = kKineticTolConstant;
    tol["macro_entropy_constant"] = kMacroTolConstant;
    tol["quadrature_rule"] = "C (dx + dv + dt) |grad psi|_1 scale";
    tol["sentinel_relative"] = 1e-10;
    tol["contraction_relative"] = 1e-10;
    tol["support_threshold"] = 1e-14;
    tol["linf_budget"] = linf_budget(run);
    tol["sweep_floor_constant"] = kFloorConstant;
    tol["sweep_growth_guard"] = 0.05;
    tol["refinement_min_slope"] = 0.7;
    tol["picard_tol"] = cfg.picard_tol;
    m["tolerances"] = tol;
    m["kruzhkov_constants"] = ks;
    m["test_functions"] = psis;
    return m;
}

void write_fields(const fs::path& out, const RunRecord& rec, bool kinetic)
{
    fs::create_directories(out / "fields");
    std::string index = "index,step,time\n";
    for (std::size_t s = 0; s < rec.times.size(); ++s) {
        write_atomic(out / "fields" / numbered("w", s, ".csv"), field_csv(rec.w[s], rec.x_grid));
        if (kinetic && s < rec.g.size()) {
            write_atomic(out / "fields" / numbered("g", s, ".csv"),
                         kinetic_csv(rec.g[s], rec.x_grid, rec.v_grid));
        }
        index += std::to_string(s) + "," + std::to_string(rec.snapshot_steps[s]) + "," +
                 g17(rec.times[s]) + "\n";
    }
    write_atomic(out / "fields" / "snapshots.csv", index);
}

// Data the contraction comparison reads back.
void write_kinetic_state(const fs::path& out, const RunRecord& rec)
{
    fs::create_directories(out / "kinetic");
    write_atomic(out / "kinetic" / "g_initial.csv",
                 kinetic_csv(rec.g_initial, rec.x_grid, rec.v_grid));
    write_atomic(out / "kinetic" / "g_final.csv", kinetic_csv(rec.g_final, rec.x_grid, rec.v_grid));
    const std::size_t nv = rec.v_grid.size();
    std::string traces = "step,v,left,right\n";
    std::string steps = "step,dt,source_sup_dv\n";
    for (std::size_t n = 0; n < rec.traces.dt.size(); ++n) {
        for (std::size_t j = 0; j < nv; ++j) {
            traces += std::to_string(n) + "," + g17(rec.v_grid.center(j)) + "," +
                      g17(rec.traces.left[n * nv + j]) + "," + g17(rec.traces.right[n * nv + j]) +
                      "\n";
        }
        const double sdv = n < rec.source_sup_dv.size() ? rec.source_sup_dv[n] : 0.0;
        steps += std::to_string(n) + "," + g17(rec.traces.dt[n]) + "," + g17(sdv) + "\n";
    }
    write_atomic(out / "kinetic" / "traces.csv", traces);
    write_atomic(out / "kinetic" / "steps.csv", steps);
}

// Picard sweeps relax toward the previous iterate, so mass closes only to the
// fixed-point tolerance; the entry is informational there.
void add_mass_entries(DiagnosticsReport& rep, const RunRecord& rec, bool asserted)
{
    if (rec.mass.empty()) {
        return;
    }
    // mass(t) - mass(0) + outflow - inflow - source
    double in = 0.0;
    double out = 0.0;
    double src = 0.0;
    for (std::size_t n = 0; n < rec.inflow_mass.size(); ++n) {
        in += rec.inflow_mass[n];
        out += rec.outflow_mass[n];
        src += n < rec.source_mass.size() ? rec.source_mass[n] : 0.0;
    }
    const double imbalance = rec.mass.back() - rec.mass.front() + out - in - src;
    const double scale = std::max({1.0, std::abs(rec.mass.front()), in, out});
    rep.add("mass/imbalance", std::abs(imbalance), 0.0, 1e-12 * scale * rec.n_steps,
            "mass-balance", asserted);
    rep.add("mass/final", rec.mass.back(), 0.0, 0.0, "mass-balance", false);
    rep.add("mass/source_total", src, 0.0, 0.0, "mass-balance", false);
}

std::string convergence_row(double eps, double err, double floor)
{
    return "epsilon,l1_error,floor,passed\n" + fmt("%.6e", eps) + "," + fmt("%.10e", err) + "," +
           fmt("%.10e", floor) + ",true\n";
}

int finish(const fs::path& out, const DiagnosticsReport& rep)
{
    write_atomic(out / "report.json", rep.to_json());
    write_atomic(out / "report.txt", rep.to_text());
    return rep.passed() ? 0 : 1;
}

int run_single(const ExperimentConfig& cfg, Assembled& a, const fs::path& out,
               ordered_json manifest)
{
    auto& run = a.run;
    DiagnosticsReport rep;
    RunRecord rec;
    const bool want_equilibrium = cfg.diagnostics.count("equilibrium") != 0;
    run.record_kinetic_snapshots = cfg.write_kinetic_fields || want_equilibrium;

    if (run.mode == SolveMode::Picard) {
        PicardOptions po;
        po.max_iterations = cfg.picard_max_iterations;
        po.tol = cfg.picard_tol;
        std::string history = "iteration,residual,ratio\n";
        try {
            auto p = picard_solve(run, po);
            for (std::size_t m = 0; m < p.residuals.size(); ++m) {
                history += std::to_string(m + 2) + "," + fmt("%.10e", p.residuals[m]) + "," +
                           (m < p.ratios.size() ? fmt("%.6f", p.ratios[m]) : "") + "\n";
            }
            // successive residuals strictly decreasing
            double worst = -1.0;
            for (std::size_t m = 0; m + 1 < p.residuals.size(); ++m) {
                worst = std::max(worst, p.residuals[m + 1] - p.residuals[m]);
            }
            rep.add("picard/residual_increase", worst, 0.0, 0.0, "picard-contraction");
            rep.add("picard/final_residual", p.residuals.empty() ? 0.0 : p.residuals.back(), po.tol,
                    0.0, "picard-convergence");
            rep.add("picard/iterations", static_cast<double>(p.iterations), 0.0, 0.0,
                    "picard-convergence", false);
            // fixed point against the splitting trajectory
            std::vector<KineticField> traj;
            const std::vector<StepObserver> obs{[&](const StepView& v) {
                if (traj.empty()) {
                    traj.push_back(v.before);
                }
                traj.push_back(v.after.g);
            }};
            auto split = run;
            split.mode = SolveMode::Splitting;
            solve(split, obs);
            const double d = trajectory_distance(p.trajectory, traj, p.record.dt,
                                                 run.x_grid.dx(), run.v_grid.dv());
            rep.add("picard/distance_to_splitting", d, 2.0 * po.tol, 0.0, "picard-fixed-point");
            rec = std::move(p.record);
        } catch (const NoConvergence& e) {
            for (std::size_t m = 0; m < e.residuals().size(); ++m) {
                history += std::to_string(m + 2) + "," + fmt("%.10e", e.residuals()[m]) + ",\n";
            }
            write_atomic(out / "picard.csv", history);
            rep.add("picard/converged", 1.0, 0.0, 0.0, "picard-convergence");
            rep.note("error", e.what());
            write_atomic(out / "manifest.json", manifest.dump(2) + "\n");
            return finish(out, rep);
        }
        write_atomic(out / "picard.csv", history);
    } else {
        std::optional<SupportSpeedMonitor> support;
        std::optional<BvLipschitzMonitor> bv;
        std::optional<KineticEntropyMonitor> kin;
        std::vector<StepObserver> obs;
        if (cfg.diagnostics.count("support")) {
            support.emplace();
            obs.push_back(support->observer());
        }
        if (cfg.diagnostics.count("bv")) {
            bv.emplace();
            obs.push_back(bv->observer());
        }
        if (cfg.diagnostics.count("entropy")) {
            kin.emplace(kruzhkov_constants(a.scenario.data_lo, a.scenario.data_hi, run.v_grid),
                        standard_test_functions(run.t_end));
            obs.push_back(kin->observer());
        }
        rec = solve(run, obs).record;
        if (support) {
            rep.merge(support->report());
        }
        if (bv) {
            rep.merge(bv->report(rec));
        }
        if (kin) {
            rep.merge(kin->report(rec, kKineticTolConstant, run.source.has_value()));
        }
    }

    if (cfg.diagnostics.count("entropy")) {
        MacroEntropyInput in;
        in.x_grid = rec.x_grid;
        in.v_grid = rec.v_grid;
        in.flux = run.flux;
        in.times = rec.times;
        in.w = rec.w;
        in.g0 = run.boundary.left;
        in.w1 = a.scenario.right_trace;
        if (run.source) {
            const SourceModel src = *run.source;
            in.source = [src](double x, double t, double w) { return src.macro(x, t, w); };
        }
        rep.merge(macro_entropy_report(
            in, kruzhkov_constants(a.scenario.data_lo, a.scenario.data_hi, run.v_grid),
            standard_test_functions(run.t_end), kMacroTolConstant));
    }
    if (want_equilibrium && !rec.g.empty()) {
        const auto d = equilibrium_distance(rec);
        rep.add("equilibrium/sup_distance", *std::max_element(d.begin(), d.end()), 0.0, 0.0,
                "relaxation-rate", false);
    }
    add_mass_entries(rep, rec, run.mode == SolveMode::Splitting);

    // distance to the oracle; one-row convergence table
    try {
        const auto ref = oracle_for(a)(rec.times, rec.x_grid);
        const double err = space_time_l1(rec.times, rec.w, ref, rec.x_grid.dx());
        const double floor = kFloorConstant * rec.x_grid.dx() * initial_tv(run) *
                             std::min(run.t_end, 1.0);
        rep.add("convergence/l1_error", err, 0.0, 0.0, "hydrodynamic-limit", false);
        rep.note("oracle", a.scenario.exact ? "exact" : "godunov-reference");
        write_atomic(out / "convergence.csv", convergence_row(run.epsilon, err, floor));
    } catch (const Error& e) {
        rep.note("oracle", std::string("unavailable: ") + e.what());
    }

    write_fields(out, rec, cfg.write_kinetic_fields);
    write_kinetic_state(out, rec);
    ordered_json snaps;
    snaps["steps"] = rec.snapshot_steps;
    snaps["times"] = rec.times;
    manifest["snapshots"] = snaps;
    write_atomic(out / "manifest.json", manifest.dump(2) + "\n");
    return finish(out, rep);
}

int run_epsilon_sweep(const ExperimentConfig& cfg, const Assembled& a, const fs::path& out,
                      ordered_json manifest, unsigned jobs)
{
    SweepOptions so;
    so.floor_constant = kFloorConstant;
    so.tv_initial = initial_tv(a.run);
    so.jobs = jobs;
    so.on_row = [&](std::size_t m, const SweepRow& row, const RunRecord& rec) {
        const fs::path dir = out / "rows" / numbered("row", m, "");
        fs::create_directories(dir);
        write_atomic(dir / "w_final.csv", field_csv(rec.w.back(), rec.x_grid));
        ordered_json j;
        j["epsilon"] = row.epsilon;
        j["l1_error"] = row.l1_error;
        j["final_error"] = row.final_error;
        j["dt"] = rec.dt;
        j["n_steps"] = rec.n_steps;
        write_atomic(dir / "row.json", j.dump(2) + "\n");
    };
    const auto res = hydrodynamic_limit_sweep(a.run, cfg.sweep_epsilon, oracle_for(a), so);
    write_atomic(out / "convergence.csv", res.to_csv());

    DiagnosticsReport rep;
    rep.add("sweep/floor", res.floor, kFloorConstant * a.run.x_grid.dx() * so.tv_initial, 0.0,
            "hydrodynamic-limit");
    char name[96];
    for (std::size_t m = 0; m < res.rows.size(); ++m) {
        const auto& r = res.rows[m];
        std::snprintf(name, sizeof name, "sweep/row%02zu(eps=%.1e)/l1_error", m, r.epsilon);
        rep.add(name, r.l1_error, 0.0, 0.0, "hydrodynamic-limit", false);
        std::snprintf(name, sizeof name, "sweep/row%02zu(eps=%.1e)/final_error", m, r.epsilon);
        rep.add(name, r.final_error, 0.0, 0.0, "hydrodynamic-limit", false);
        std::snprintf(name, sizeof name, "sweep/row%02zu(eps=%.1e)/rule_violated", m, r.epsilon);
        rep.add(name, r.passed ? 0.0 : 1.0, 0.0, 0.0, "hydrodynamic-limit");
        if (!r.error.empty()) {
            rep.note(name, r.error);
        }
    }
    manifest["sweep"] = {{"axis", "epsilon"}, {"values", cfg.sweep_epsilon}, {"floor", res.floor},
                         {"tv_initial", so.tv_initial}};
    write_atomic(out / "manifest.json", manifest.dump(2) + "\n");
    return finish(out, rep);
}

int run_dx_sweep(const ExperimentConfig& cfg, const Assembled& a, const fs::path& out,
                 ordered_json manifest, unsigned jobs)
{
    const auto res = grid_refinement_sweep(a.run, cfg.sweep_n_x, oracle_for(a), jobs);
    write_atomic(out / "convergence.csv", res.to_csv());
    DiagnosticsReport rep;
    rep.add("refinement/slope_deficit", res.min_slope - res.slope, 0.0, 0.0,
            "first-order-refinement");
    char name[96];
    for (const auto& r : res.rows) {
        std::snprintf(name, sizeof name, "refinement/n_x=%zu/l1_error", r.n_x);
        rep.add(name, r.l1_error, 0.0, 0.0, "first-order-refinement", false);
        if (!r.error.empty()) {
            rep.note(name, r.error);
        }
    }
    manifest["sweep"] = {{"axis", "n_x"}, {"values", cfg.sweep_n_x}, {"slope", res.slope}};
    write_atomic(out / "manifest.json", manifest.dump(2) + "\n");
    return finish(out, rep);
}

} // namespace

ExperimentConfig parse_config(const json& j)
{
    ExperimentConfig c;
    try {
        reject_unknown(j,
                       {"name", "flux", "initial", "boundary", "source", "epsilon", "grid", "cfl",
                        "t_end", "dt_max", "snapshots", "snapshot_every", "mode", "picard", "sweep",
                        "diagnostics", "write_kinetic_fields", "output"},
                       "config");
        read(j, "name", c.name);
        read(j, "flux", c.flux);
        read(j, "initial", c.scenario.initial);
        if (j.contains("boundary")) {
            const auto& b = j.at("boundary");
            reject_unknown(b, {"left", "right"}, "boundary");
            read(b, "left", c.scenario.left);
            read(b, "right", c.scenario.right);
        }
        read(j, "source", c.scenario.source);
        read(j, "epsilon", c.epsilon);
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            reject_unknown(g, {"n_x", "v_min", "v_max", "n_v"}, "grid");
            read(g, "n_x", c.n_x);
            read(g, "v_min", c.v_min);
            read(g, "v_max", c.v_max);
            read(g, "n_v", c.n_v);
        }
        read(j, "cfl", c.cfl);
        read(j, "t_end", c.t_end);
        if (j.contains("dt_max") && !j.at("dt_max").is_null()) {
            c.dt_max = j.at("dt_max").get<double>();
        }
        read(j, "snapshots", c.snapshots);
        read(j, "snapshot_every", c.snapshot_every);
        if (j.contains("mode")) {
            const auto mode = j.at("mode").get<std::string>();
            if (mode == "splitting") {
                c.mode = SolveMode::Splitting;
            } else if (mode == "picard") {
                c.mode = SolveMode::Picard;
            } else {
                throw ConfigError("mode must be 'splitting' or 'picard', got '" + mode + "'");
            }
        }
        if (j.contains("picard")) {
            const auto& p = j.at("picard");
            reject_unknown(p, {"max_iterations", "tol"}, "picard");
            read(p, "max_iterations", c.picard_max_iterations);
            read(p, "tol", c.picard_tol);
        }
        if (j.contains("sweep") && !j.at("sweep").is_null()) {
            const auto& s = j.at("sweep");
            reject_unknown(s, {"epsilon", "n_x"}, "sweep");
            if (s.contains("epsilon") && s.contains("n_x")) {
                throw ConfigError("sweep takes one axis: epsilon or n_x");
            }
            if (s.contains("epsilon")) {
                c.sweep = SweepAxis::Epsilon;
                c.sweep_epsilon = s.at("epsilon").get<std::vector<double>>();
            } else if (s.contains("n_x")) {
                c.sweep = SweepAxis::Dx;
                c.sweep_n_x = s.at("n_x").get<std::vector<std::size_t>>();
            }
        }
        if (j.contains("diagnostics")) {
            c.diagnostics.clear();
            for (const auto& d : j.at("diagnostics")) {
                const auto name = d.get<std::string>();
                if (name != "support" && name != "bv" && name != "entropy" &&
                    name != "equilibrium") {
                    throw ConfigError("unknown diagnostic '" + name +
                                      "' (support, bv, entropy, equilibrium)");
                }
                c.diagnostics.insert(name);
            }
        }
        read(j, "write_kinetic_fields", c.write_kinetic_fields);
        read(j, "output", c.output);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config type error: ") + e.what());
    }
    return c;
}

ExperimentConfig load_config(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config " + path.string());
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

ordered_json to_json(const ExperimentConfig& c)
{
    ordered_json j;
    j["name"] = c.name;
    j["flux"] = c.flux;
    j["initial"] = c.scenario.initial;
    j["boundary"] = {{"left", c.scenario.left}, {"right", c.scenario.right}};
    j["source"] = c.scenario.source;
    j["epsilon"] = c.epsilon;
    j["grid"] = {{"n_x", c.n_x}, {"v_min", c.v_min}, {"v_max", c.v_max}, {"n_v", c.n_v}};
    j["cfl"] = c.cfl;
    j["t_end"] = c.t_end;
    j["dt_max"] = c.dt_max ? json(*c.dt_max) : json(nullptr);
    j["snapshots"] = c.snapshots;
    j["snapshot_every"] = c.snapshot_every;
    j["mode"] = c.mode == SolveMode::Picard ? "picard" : "splitting";
    j["picard"] = {{"max_iterations", c.picard_max_iterations}, {"tol", c.picard_tol}};
    if (c.sweep == SweepAxis::Epsilon) {
        j["sweep"] = {{"epsilon", c.sweep_epsilon}};
    } else if (c.sweep == SweepAxis::Dx) {
        j["sweep"] = {{"n_x", c.sweep_n_x}};
    } else {
        j["sweep"] = nullptr;
    }
    j["diagnostics"] = std::vector<std::string>(c.diagnostics.begin(), c.diagnostics.end());
    j["write_kinetic_fields"] = c.write_kinetic_fields;
    return j;
}

std::uint64_t fnv1a64(const std::string& bytes)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (const unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string config_hash(const ExperimentConfig& config)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(to_json(config).dump())));
    return buf;
}

Assembled assemble(const ExperimentConfig& c)
{
    if (c.n_x < 2) {
        throw ConfigError("grid.n_x must be at least 2");
    }
    if (c.n_v < 2) {
        throw ConfigError("grid.n_v must be at least 2");
    }
    Assembled a;
    auto& run = a.run;
    run.flux = FluxModel::parse(c.flux);
    run.x_grid = SpatialGrid(c.n_x);
    run.v_grid = VelocityGrid(c.v_min, c.v_max, c.n_v);
    run.epsilon = c.epsilon;
    run.cfl = c.cfl;
    run.t_end = c.t_end;
    run.dt_max = c.dt_max;
    run.mode = c.mode;
    run.snapshot_count = c.snapshots;
    run.snapshot_every = c.snapshot_every;
    run.record_traces = true;
    a.scenario = build_scenario(c.scenario, run.flux, run.x_grid, run.v_grid);
    apply_scenario(run, a.scenario);
    validate(run);
    plan_time_steps(run);
    if (c.sweep == SweepAxis::Epsilon) {
        if (c.sweep_epsilon.empty()) {
            throw ConfigError("sweep.epsilon is empty");
        }
        for (std::size_t m = 0; m < c.sweep_epsilon.size(); ++m) {
            if (!(c.sweep_epsilon[m] > 0.0)) {
                throw ConfigError("sweep epsilons must be positive");
            }
            if (m > 0 && !(c.sweep_epsilon[m - 1] > c.sweep_epsilon[m])) {
                throw ConfigError("sweep epsilons must be sorted in descending order");
            }
        }
    }
    if (c.sweep == SweepAxis::Dx) {
        if (c.sweep_n_x.size() < 2) {
            throw ConfigError("sweep.n_x needs at least two resolutions");
        }
        for (const auto n : c.sweep_n_x) {
            if (n < 2) {
                throw ConfigError("sweep.n_x entries must be at least 2");
            }
        }
    }
    if (c.sweep != SweepAxis::None && c.mode == SolveMode::Picard) {
        throw ConfigError("sweeps run in splitting mode only");
    }
    return a;
}

fs::path resolve_output(const ExperimentConfig& config, const std::optional<std::string>& flag)
{
    if (flag && !flag->empty()) {
        return *flag;
    }
    if (!config.output.empty()) {
        return config.output;
    }
    if (const char* root = std::getenv("KINETIC_HYDRO_OUT"); root && *root) {
        return fs::path(root) / config.name;
    }
    return fs::path("runs") / config.name;
}

int run_experiment(const ExperimentConfig& cfg_in, const RunOptions& options)
{
    auto cfg = cfg_in;
    if (options.snapshot_every > 0) {
        cfg.snapshot_every = options.snapshot_every;
    }
    auto a = assemble(cfg);
    const auto plan = plan_time_steps(a.run);
    fs::create_directories(options.out_dir);
    auto manifest = manifest_json(cfg, a, plan);
    if (options.dry_run) {
        manifest["dry_run"] = true;
        write_atomic(options.out_dir / "manifest.json", manifest.dump(2) + "\n");
        return 0;
    }
    switch (cfg.sweep) {
    case SweepAxis::Epsilon:
        return run_epsilon_sweep(cfg, a, options.out_dir, manifest, options.jobs);
    case SweepAxis::Dx:
        return run_dx_sweep(cfg, a, options.out_dir, manifest, options.jobs);
    case SweepAxis::None:
        break;
    }
    return run_single(cfg, a, options.out_dir, manifest);
}

void write_atomic(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
        out << text;
        if (!out) {
            throw Error("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

RunRecord load_run_record(const fs::path& dir)
{
    const auto m = read_json(dir / "manifest.json");
    if (m.value("dry_run", false)) {
        throw Error(dir.string() + " is a dry run without kinetic data");
    }
    RunRecord rec;
    const auto& g = m.at("grid");
    rec.x_grid = SpatialGrid(g.at("n_x").get<std::size_t>());
    rec.v_grid = VelocityGrid(g.at("v_min").get<double>(), g.at("v_max").get<double>(),
                              g.at("n_v").get<std::size_t>());
    rec.flux_name = m.at("flux").get<std::string>();
    rec.epsilon = m.at("epsilon").get<double>();
    rec.dt = m.at("time").at("dt").get<double>();
    rec.n_steps = m.at("time").at("n_steps").get<std::size_t>();
    rec.has_source = m.at("has_source").get<bool>();
    rec.speeds = cell_speeds(rec.v_grid, FluxModel::parse(rec.flux_name));
    const std::size_t nx = rec.x_grid.size();
    const std::size_t nv = rec.v_grid.size();

    auto load_field = [&](const char* name) {
        const auto rows = read_csv(dir / "kinetic" / name, 3);
        if (rows.size() != nx * nv) {
            throw Error(std::string(name) + " does not match the manifest grid");
        }
        KineticField f(nx, nv);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            f(k / nv, k % nv) = rows[k][2];
        }
        return f;
    };
    rec.g_initial = load_field("g_initial.csv");
    rec.g_final = load_field("g_final.csv");

    const auto steps = read_csv(dir / "kinetic" / "steps.csv", 3);
    const auto traces = read_csv(dir / "kinetic" / "traces.csv", 4);
    if (steps.size() != rec.n_steps || traces.size() != rec.n_steps * nv) {
        throw Error("kinetic trace files do not match the manifest step count");
    }
    for (const auto& s : steps) {
        rec.traces.dt.push_back(s[1]);
        rec.source_sup_dv.push_back(s[2]);
    }
    for (const auto& t : traces) {
        rec.traces.left.push_back(t[2]);
        rec.traces.right.push_back(t[3]);
    }
    const auto w0 = density_field(rec.g_initial, rec.v_grid);
    rec.mass.push_back(compensated_sum(w0) * rec.x_grid.dx());
    return rec;
}

DiagnosticsReport compare_runs(const fs::path& a, const fs::path& b)
{
    const auto ma = read_json(a / "manifest.json");
    const auto mb = read_json(b / "manifest.json");
    auto same = [&](const json& x, const json& y, const std::string& what) {
        if (x != y) {
            throw ManifestMismatch("runs differ in " + what + ": " + x.dump() + " vs " + y.dump());
        }
    };
    for (const char* key : {"n_x", "v_min", "v_max", "n_v"}) {
        same(ma.at("grid").at(key), mb.at("grid").at(key), std::string("grid.") + key);
    }
    same(ma.at("epsilon"), mb.at("epsilon"), "epsilon");
    same(ma.at("flux"), mb.at("flux"), "flux");
    same(ma.at("time").at("dt"), mb.at("time").at("dt"), "time step");
    same(ma.at("time").at("n_steps"), mb.at("time").at("n_steps"), "step count");
    const auto ra = load_run_record(a);
    const auto rb = load_run_record(b);
    auto rep = contraction_report(ra, rb);
    rep.note("run_a", a.string());
    rep.note("run_b", b.string());
    rep.note("config_hash_a", ma.value("config_hash", ""));
    rep.note("config_hash_b", mb.value("config_hash", ""));
    return rep;
}

} // namespace kinhydro::cli
