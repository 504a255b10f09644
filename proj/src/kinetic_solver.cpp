#include "kinhydro/kinetic_solver.hpp"

#include "kinhydro/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kinhydro {

namespace {

constexpr double kCflSlack = 1e-12;
// below this the upwind tail is rounding-level, not escaped density
constexpr double kSupportThreshold = 1e-14;

std::string num(double x)
{
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

double max_abs(std::span<const double> values)
{
    double m = 0.0;
    for (const double x : values) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

// Neumaier sum of the whole field, scaled to a mass.
double field_mass(const KineticField& g, double dx, double dv)
{
    return compensated_sum(g.values()) * dx * dv;
}

} // namespace

SpatialGrid::SpatialGrid(std::size_t n_cells) : n_(n_cells), dx_(0.0)
{
    if (n_cells == 0) {
        throw ConfigError("spatial grid: n_x must be positive");
    }
    dx_ = 1.0 / static_cast<double>(n_cells);
}

std::vector<double> density_field(const KineticField& g, const VelocityGrid& grid)
{
    std::vector<double> w(g.n_x());
    for (std::size_t i = 0; i < g.n_x(); ++i) {
        w[i] = zeroth_moment(g.slice(i), grid);
    }
    return w;
}

double l1_distance(const KineticField& g, const KineticField& h, double dx, double dv)
{
    if (g.n_x() != h.n_x() || g.n_v() != h.n_v()) {
        throw GridMismatch("l1_distance: field shapes differ");
    }
    const auto a = g.values();
    const auto b = h.values();
    std::vector<double> diff(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        diff[k] = std::abs(a[k] - b[k]);
    }
    return compensated_sum(diff) * dx * dv;
}

BoundarySide zero_boundary()
{
    BoundarySide side;
    side.fill = [](double, const VelocityGrid&, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
    };
    return side;
}

BoundarySide equilibrium_boundary(std::function<double(double)> w_of_t, double w_lo, double w_hi,
                                  std::string description)
{
    BoundarySide side;
    side.fill = [w_of_t = std::move(w_of_t)](double t, const VelocityGrid& grid,
                                             std::span<double> out) {
        project_equilibrium_into(w_of_t(t), grid, out);
    };
    side.sup_norm = (w_lo == 0.0 && w_hi == 0.0) ? 0.0 : 1.0;
    side.v_lo = std::min(w_lo, 0.0);
    side.v_hi = std::max(w_hi, 0.0);
    side.w_lo = w_lo;
    side.w_hi = w_hi;
    side.description = std::move(description);
    return side;
}

BoundarySide constant_equilibrium_boundary(double w)
{
    return equilibrium_boundary([w](double) { return w; }, w, w, "equilibrium:" + num(w));
}

BoundarySide kinetic_boundary(std::function<double(double v, double t)> g, double sup_norm,
                              double v_lo, double v_hi, std::string description)
{
    BoundarySide side;
    side.fill = [g = std::move(g)](double t, const VelocityGrid& grid, std::span<double> out) {
        for (std::size_t j = 0; j < out.size(); ++j) {
            out[j] = g(grid.center(j), t);
        }
    };
    side.sup_norm = sup_norm;
    side.v_lo = v_lo;
    side.v_hi = v_hi;
    // |w| <= sup |g| * |support|
    side.w_lo = -sup_norm * (std::max(v_hi, 0.0) - std::min(v_lo, 0.0));
    side.w_hi = -side.w_lo;
    side.description = std::move(description);
    return side;
}

double boundary_moment(const BoundarySide& side, double t, const VelocityGrid& grid)
{
    std::vector<double> row(grid.size());
    side.fill(t, grid, row);
    return zeroth_moment(row, grid);
}

void check_source_vanishes_at_zero(const SourceModel& source, double t_end)
{
    for (int a = 0; a <= 20; ++a) {
        for (int b = 0; b <= 10; ++b) {
            const double x = a / 20.0;
            const double t = t_end * b / 10.0;
            const double s = source.force(x, t, 0.0);
            if (s != 0.0) {
                throw ConfigError("source '" + source.name + "': S(x, t, 0) = " + num(s) +
                                  " at x = " + num(x) + ", t = " + num(t) +
                                  "; the force must vanish at v = 0");
            }
        }
    }
}

KineticField initialize(const InitialData& data, const SpatialGrid& x_grid,
                        const VelocityGrid& v_grid)
{
    KineticField g(x_grid.size(), v_grid.size());
    if (data.table) {
        if (data.table->n_x() != x_grid.size() || data.table->n_v() != v_grid.size()) {
            throw GridMismatch("initial table shape does not match the grids");
        }
        return *data.table;
    }
    if (data.kinetic) {
        for (std::size_t i = 0; i < x_grid.size(); ++i) {
            for (std::size_t j = 0; j < v_grid.size(); ++j) {
                g(i, j) = data.kinetic(x_grid.center(i), v_grid.center(j));
            }
        }
        return g;
    }
    if (data.macro) {
        for (std::size_t i = 0; i < x_grid.size(); ++i) {
            project_equilibrium_into(data.macro(x_grid.center(i)), v_grid, g.slice(i));
        }
    }
    return g;
}

void validate(const RunConfig& config)
{
    if (config.relax && !(config.epsilon > 0.0 && std::isfinite(config.epsilon))) {
        throw ConfigError("epsilon must be positive and finite (use relax = false for pure transport)");
    }
    if (!(config.cfl > 0.0 && config.cfl <= 1.0)) {
        throw ConfigError("cfl must lie in (0, 1]");
    }
    if (!(config.t_end > 0.0 && std::isfinite(config.t_end))) {
        throw ConfigError("t_end must be positive");
    }
    if (config.dt_max && !(*config.dt_max > 0.0)) {
        throw ConfigError("dt_max must be positive");
    }
    const auto& vg = config.v_grid;
    auto require_cover = [&](double lo, double hi, const std::string& what) {
        if (lo < vg.v_min() || hi > vg.v_max()) {
            throw ConfigError("velocity grid [" + num(vg.v_min()) + ", " + num(vg.v_max()) +
                              "] does not cover " + what + " [" + num(lo) + ", " + num(hi) +
                              "]");
        }
    };
    const auto& init = config.initial;
    if (init.macro) {
        require_cover(init.w_lo, init.w_hi, "the range of the initial density");
    } else {
        require_cover(init.v_lo, init.v_hi, "the velocity support of the initial data");
        require_cover(init.w_lo, init.w_hi, "the range of the initial density");
    }
    for (const auto* side : {&config.boundary.left, &config.boundary.right}) {
        if (!side->fill) {
            throw ConfigError("boundary data missing");
        }
        require_cover(side->v_lo, side->v_hi, "the velocity support of boundary data '" +
                                                   side->description + "'");
        require_cover(side->w_lo, side->w_hi, "the density range of boundary data '" +
                                                   side->description + "'");
    }
    if (config.source) {
        if (config.mode == SolveMode::Picard) {
            throw ConfigError("picard mode does not support a source term");
        }
        check_source_vanishes_at_zero(*config.source, config.t_end);
    }
}

TimeStepPlan plan_time_steps(const RunConfig& config)
{
    const auto speeds = cell_speeds(config.v_grid, config.flux);
    TimeStepPlan plan;
    plan.a_inf = max_abs(speeds);
    const double dx = config.x_grid.dx();
    double dt = std::numeric_limits<double>::infinity();
    if (plan.a_inf > 0.0) {
        dt = config.cfl * dx / plan.a_inf;
    }
    if (config.source && config.source->sup_force > 0.0) {
        dt = std::min(dt, config.cfl * config.v_grid.dv() / config.source->sup_force);
    }
    if (config.dt_max) {
        dt = std::min(dt, *config.dt_max);
    }
    if (!std::isfinite(dt)) {
        throw ConfigError("no time-step constraint: all speeds vanish, set dt_max");
    }
    const double ratio = config.t_end / dt;
    plan.n_steps = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
    plan.n_steps = std::max<std::size_t>(plan.n_steps, 1);
    plan.dt = config.t_end / static_cast<double>(plan.n_steps);
    plan.courant = plan.a_inf * plan.dt / dx;
    return plan;
}

double linf_budget(const RunConfig& config)
{
    double sup = 1.0;
    if (!config.initial.macro) {
        sup = std::max(sup, config.initial.sup_norm);
    }
    sup = std::max({sup, config.boundary.left.sup_norm, config.boundary.right.sup_norm});
    return sup;
}

void relax_towards(KineticField& g, std::span<const double> w_target, double dt, double epsilon,
                   const VelocityGrid& v_grid)
{
    const double decay = std::exp(-dt / epsilon);
    const double gain = 1.0 - decay;
    std::vector<double> chi(v_grid.size());
    for (std::size_t i = 0; i < g.n_x(); ++i) {
        project_equilibrium_into(w_target[i], v_grid, chi);
        auto row = g.slice(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            row[j] = decay * row[j] + gain * chi[j];
        }
    }
}

void relax_step(KineticState& state, double dt, double epsilon, const VelocityGrid& v_grid)
{
    if (state.g.n_v() != v_grid.size()) {
        throw LengthMismatch("relax_step: field does not match the velocity grid");
    }
    const auto w = density_field(state.g, v_grid);
    relax_towards(state.g, w, dt, epsilon, v_grid);
}

WallTrace transport_step(KineticState& state, double dt, const BoundaryData& boundary,
                         const SpatialGrid& x_grid, const VelocityGrid& v_grid,
                         std::span<const double> speeds)
{
    auto& g = state.g;
    const std::size_t nx = g.n_x();
    const std::size_t nv = g.n_v();
    if (nx != x_grid.size() || nv != v_grid.size() || speeds.size() != nv) {
        throw LengthMismatch("transport_step: field does not match the grids");
    }
    const double dx = x_grid.dx();
    const double dv = v_grid.dv();

    std::vector<double> cl(nv);
    std::vector<double> cr(nv);
    std::vector<double> c0(nv);
    for (std::size_t j = 0; j < nv; ++j) {
        const double nu = speeds[j] * dt / dx;
        if (std::abs(nu) > 1.0 + kCflSlack) {
            throw CflViolation("transport_step: Courant number " + num(std::abs(nu)) +
                               " exceeds 1 in velocity cell " + std::to_string(j));
        }
        cl[j] = std::max(nu, 0.0);
        cr[j] = std::max(-nu, 0.0);
        c0[j] = 1.0 - cl[j] - cr[j];
    }

    const double t_mid = state.time + 0.5 * dt;
    WallTrace trace{std::vector<double>(nv), std::vector<double>(nv)};
    std::vector<double> ghost_left(nv);
    std::vector<double> ghost_right(nv);
    boundary.left.fill(t_mid, v_grid, ghost_left);
    boundary.right.fill(t_mid, v_grid, ghost_right);

    for (std::size_t j = 0; j < nv; ++j) {
        const double w = std::abs(speeds[j]) * dt * dv;
        if (speeds[j] > 0.0) {
            trace.left[j] = ghost_left[j];
            trace.right[j] = g(nx - 1, j);
            state.inflow_0 += w * ghost_left[j];
            state.outflow_1 += w * g(nx - 1, j);
        } else if (speeds[j] < 0.0) {
            trace.left[j] = g(0, j);
            trace.right[j] = ghost_right[j];
            state.outflow_0 += w * g(0, j);
            state.inflow_1 += w * ghost_right[j];
        }
    }

    // Sweep in x keeping the old value of the previous row.
    std::vector<double> prev(ghost_left);
    std::vector<double> saved(nv);
    for (std::size_t i = 0; i < nx; ++i) {
        auto row = g.slice(i);
        std::copy(row.begin(), row.end(), saved.begin());
        const double* next = i + 1 < nx ? g.slice(i + 1).data() : ghost_right.data();
        for (std::size_t j = 0; j < nv; ++j) {
            if (cl[j] == 1.0) {
                row[j] = prev[j];
            } else if (cr[j] == 1.0) {
                row[j] = next[j];
            } else {
                row[j] = c0[j] * saved[j] + cl[j] * prev[j] + cr[j] * next[j];
            }
        }
        prev.swap(saved);
    }
    return trace;
}

ForceStats force_step(KineticState& state, double dt, const SourceModel& source,
                      const SpatialGrid& x_grid, const VelocityGrid& v_grid)
{
    auto& g = state.g;
    const std::size_t nx = g.n_x();
    const std::size_t nv = g.n_v();
    if (nx != x_grid.size() || nv != v_grid.size()) {
        throw LengthMismatch("force_step: field does not match the grids");
    }
    const double dv = v_grid.dv();
    const double t_mid = state.time + 0.5 * dt;
    const std::size_t j0 = v_grid.zero_edge();

    ForceStats stats;
    std::vector<double> edge_force(nv + 1);
    std::vector<double> old(nv);
    std::vector<double> delta(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        const double x = x_grid.center(i);
        for (std::size_t e = 0; e <= nv; ++e) {
            edge_force[e] = e == j0 ? 0.0 : source.force(x, t_mid, v_grid.edge(e));
        }
        auto row = g.slice(i);
        std::copy(row.begin(), row.end(), old.begin());
        for (std::size_t j = 0; j < nv; ++j) {
            const double cl = std::max(edge_force[j], 0.0) * dt / dv;
            const double cr = std::max(-edge_force[j + 1], 0.0) * dt / dv;
            if (cl + cr > 1.0 + kCflSlack) {
                throw VelocityCflViolation("force_step: velocity Courant number " + num(cl + cr) +
                                           " exceeds 1 at x = " + num(x));
            }
            const double below = j > 0 ? old[j - 1] : 0.0;
            const double above = j + 1 < nv ? old[j + 1] : 0.0;
            row[j] = (1.0 - cl - cr) * old[j] + cl * below + cr * above;
            stats.discrete_sup_dv =
                std::max(stats.discrete_sup_dv, std::abs(edge_force[j + 1] - edge_force[j]) / dv);
        }
        if (std::abs(row[0]) > kSupportThreshold || std::abs(row[nv - 1]) > kSupportThreshold) {
            throw SupportEscape("force_step: density reached the edge of the velocity grid at x = " +
                                num(x));
        }
        delta[i] = compensated_sum(row) - compensated_sum(old);
    }
    stats.mass_change = compensated_sum(delta) * x_grid.dx() * dv;
    return stats;
}

void step(KineticState& state, double dt, const RunConfig& config)
{
    if (dt == 0.0) {
        return;
    }
    if (config.relax) {
        relax_step(state, dt, config.epsilon, config.v_grid);
    }
    if (config.source) {
        force_step(state, dt, *config.source, config.x_grid, config.v_grid);
    }
    const auto speeds = cell_speeds(config.v_grid, config.flux);
    transport_step(state, dt, config.boundary, config.x_grid, config.v_grid, speeds);
    state.time += dt;
}

namespace {

std::size_t snapshot_stride(const RunConfig& config, std::size_t n_steps)
{
    if (config.snapshot_every > 0) {
        return config.snapshot_every;
    }
    const std::size_t count = std::max<std::size_t>(config.snapshot_count, 1);
    return std::max<std::size_t>(1, (n_steps + count - 1) / count);
}

void take_snapshot(RunRecord& record, const RunConfig& config, const KineticState& state,
                   std::size_t n)
{
    record.snapshot_steps.push_back(n);
    record.times.push_back(state.time);
    record.w.push_back(density_field(state.g, config.v_grid));
    if (config.record_kinetic_snapshots) {
        record.g.push_back(state.g);
    }
}

// Scans for non-finite entries and returns max |g|.
double check_finite(const KineticField& g, std::size_t n)
{
    double m = 0.0;
    for (const double x : g.values()) {
        if (!std::isfinite(x)) {
            throw NumericalBlowup("non-finite density at step " + std::to_string(n), n);
        }
        m = std::max(m, std::abs(x));
    }
    return m;
}

RunRecord start_record(const RunConfig& config, const TimeStepPlan& plan,
                       const std::vector<double>& speeds)
{
    RunRecord record;
    record.x_grid = config.x_grid;
    record.v_grid = config.v_grid;
    record.flux_name = config.flux.name();
    record.epsilon = config.epsilon;
    record.dt = plan.dt;
    record.n_steps = plan.n_steps;
    record.a_inf = plan.a_inf;
    record.linf_budget = linf_budget(config);
    record.has_source = config.source.has_value();
    record.speeds = speeds;
    return record;
}

} // namespace

SolveResult solve(const RunConfig& config, std::span<const StepObserver> observers)
{
    validate(config);
    const auto plan = plan_time_steps(config);
    const auto speeds = cell_speeds(config.v_grid, config.flux);
    const double dx = config.x_grid.dx();
    const double dv = config.v_grid.dv();
    const std::size_t nv = config.v_grid.size();

    SolveResult result;
    auto& state = result.state;
    auto& record = result.record;
    record = start_record(config, plan, speeds);

    state.g = initialize(config.initial, config.x_grid, config.v_grid);
    record.g_initial = state.g;
    record.max_abs_g.push_back(check_finite(state.g, 0));
    record.mass.push_back(field_mass(state.g, dx, dv));
    take_snapshot(record, config, state, 0);

    const std::size_t stride = snapshot_stride(config, plan.n_steps);
    const bool observe = !observers.empty();
    if (config.record_traces) {
        record.traces.dt.reserve(plan.n_steps);
        record.traces.left.reserve(plan.n_steps * nv);
        record.traces.right.reserve(plan.n_steps * nv);
    }

    KineticField before;
    KineticField after_relax;
    KineticField after_force;
    for (std::size_t n = 0; n < plan.n_steps; ++n) {
        const double dt = plan.dt;
        state.time = static_cast<double>(n) * dt;
        if (observe) {
            before = state.g;
        }
        if (config.relax) {
            relax_step(state, dt, config.epsilon, config.v_grid);
        }
        if (observe) {
            after_relax = state.g;
        }
        ForceStats force;
        if (config.source) {
            force = force_step(state, dt, *config.source, config.x_grid, config.v_grid);
        }
        if (observe) {
            after_force = state.g;
        }
        const double in0 = state.inflow_0 + state.inflow_1;
        const double out0 = state.outflow_0 + state.outflow_1;
        const auto trace =
            transport_step(state, dt, config.boundary, config.x_grid, config.v_grid, speeds);
        state.time = n + 1 == plan.n_steps ? config.t_end : static_cast<double>(n + 1) * dt;

        record.max_abs_g.push_back(check_finite(state.g, n + 1));
        record.mass.push_back(field_mass(state.g, dx, dv));
        record.inflow_mass.push_back(state.inflow_0 + state.inflow_1 - in0);
        record.outflow_mass.push_back(state.outflow_0 + state.outflow_1 - out0);
        record.source_mass.push_back(force.mass_change);
        record.source_sup_dv.push_back(force.discrete_sup_dv);
        if (config.record_traces) {
            record.traces.dt.push_back(dt);
            record.traces.left.insert(record.traces.left.end(), trace.left.begin(),
                                      trace.left.end());
            record.traces.right.insert(record.traces.right.end(), trace.right.begin(),
                                       trace.right.end());
        }
        if ((n + 1) % stride == 0 || n + 1 == plan.n_steps) {
            take_snapshot(record, config, state, n + 1);
        }
        if (observe) {
            const StepView view{n,           static_cast<double>(n) * dt,
                                dt,          before,
                                after_relax, after_force,
                                state,       trace,
                                config,      speeds,
                                force.discrete_sup_dv};
            for (const auto& obs : observers) {
                obs(view);
            }
        }
    }
    record.g_final = state.g;
    return result;
}

double trajectory_distance(const std::vector<KineticField>& a, const std::vector<KineticField>& b,
                           double dt, double dx, double dv)
{
    if (a.size() != b.size()) {
        throw GridMismatch("trajectory_distance: trajectories have different lengths");
    }
    std::vector<double> per_step;
    for (std::size_t k = 1; k < a.size(); ++k) {
        per_step.push_back(dt * l1_distance(a[k], b[k], dx, dv));
    }
    return compensated_sum(per_step);
}

PicardResult picard_solve(const RunConfig& config, const PicardOptions& options)
{
    if (config.source) {
        throw ConfigError("picard mode does not support a source term");
    }
    if (!config.relax) {
        throw ConfigError("picard mode requires relaxation");
    }
    validate(config);
    const auto plan = plan_time_steps(config);
    const auto speeds = cell_speeds(config.v_grid, config.flux);
    const double dx = config.x_grid.dx();
    const double dv = config.v_grid.dv();
    const std::size_t nx = config.x_grid.size();
    const KineticField g0 = initialize(config.initial, config.x_grid, config.v_grid);

    std::vector<std::vector<double>> frozen;
    if (options.initial_guess) {
        frozen = *options.initial_guess;
        if (frozen.size() < plan.n_steps) {
            throw ConfigError("picard initial guess covers " + std::to_string(frozen.size()) +
                              " steps, need " + std::to_string(plan.n_steps));
        }
        frozen.resize(plan.n_steps);
        for (const auto& w : frozen) {
            if (w.size() != nx) {
                throw GridMismatch("picard initial guess does not match the spatial grid");
            }
        }
    } else {
        frozen.assign(plan.n_steps, density_field(g0, config.v_grid));
    }

    // One sweep with frozen targets; fills the bookkeeping when asked.
    auto march = [&](const std::vector<std::vector<double>>& targets, RunRecord* rec) {
        std::vector<KineticField> traj;
        traj.reserve(plan.n_steps + 1);
        KineticState state;
        state.g = g0;
        traj.push_back(state.g);
        const std::size_t stride = snapshot_stride(config, plan.n_steps);
        for (std::size_t n = 0; n < plan.n_steps; ++n) {
            state.time = static_cast<double>(n) * plan.dt;
            relax_towards(state.g, targets[n], plan.dt, config.epsilon, config.v_grid);
            const double in0 = state.inflow_0 + state.inflow_1;
            const double out0 = state.outflow_0 + state.outflow_1;
            const auto trace = transport_step(state, plan.dt, config.boundary, config.x_grid,
                                              config.v_grid, speeds);
            state.time = n + 1 == plan.n_steps ? config.t_end
                                               : static_cast<double>(n + 1) * plan.dt;
            const double m = check_finite(state.g, n + 1);
            traj.push_back(state.g);
            if (rec) {
                rec->max_abs_g.push_back(m);
                rec->mass.push_back(field_mass(state.g, dx, dv));
                rec->inflow_mass.push_back(state.inflow_0 + state.inflow_1 - in0);
                rec->outflow_mass.push_back(state.outflow_0 + state.outflow_1 - out0);
                rec->source_mass.push_back(0.0);
                rec->source_sup_dv.push_back(0.0);
                if (config.record_traces) {
                    rec->traces.dt.push_back(plan.dt);
                    rec->traces.left.insert(rec->traces.left.end(), trace.left.begin(),
                                            trace.left.end());
                    rec->traces.right.insert(rec->traces.right.end(), trace.right.begin(),
                                             trace.right.end());
                }
                if ((n + 1) % stride == 0 || n + 1 == plan.n_steps) {
                    take_snapshot(*rec, config, state, n + 1);
                }
            }
        }
        return traj;
    };

    PicardResult result;
    std::vector<KineticField> previous;
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        auto traj = march(frozen, nullptr);
        result.iterations = it;
        if (!previous.empty()) {
            const double r = trajectory_distance(traj, previous, plan.dt, dx, dv);
            if (!result.residuals.empty()) {
                const double last = result.residuals.back();
                result.ratios.push_back(last > 0.0 ? r / last : 0.0);
            }
            result.residuals.push_back(r);
            if (r <= options.tol) {
                result.trajectory = std::move(traj);
                break;
            }
        }
        for (std::size_t n = 0; n < plan.n_steps; ++n) {
            frozen[n] = density_field(traj[n], config.v_grid);
        }
        previous = std::move(traj);
    }
    if (result.trajectory.empty()) {
        throw NoConvergence("picard_solve: no convergence after " +
                                std::to_string(options.max_iterations) + " iterations",
                            result.residuals);
    }

    // replay the converged sweep for the record; the march is deterministic
    auto& record = result.record;
    record = start_record(config, plan, speeds);
    record.g_initial = g0;
    record.max_abs_g.push_back(max_abs(g0.values()));
    record.mass.push_back(field_mass(g0, dx, dv));
    {
        KineticState initial;
        initial.g = g0;
        take_snapshot(record, config, initial, 0);
    }
    march(frozen, &record);
    record.g_final = result.trajectory.back();
    return result;
}

} // namespace kinhydro
