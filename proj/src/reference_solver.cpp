#include "kinhydro/reference_solver.hpp"

#include "kinhydro/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kinhydro {

std::vector<double> sample_profile(const Profile& w0, const SpatialGrid& grid)
{
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        w[i] = w0(grid.center(i));
    }
    return w;
}

void godunov_step(MacroState& state, double dt, const SpatialGrid& grid, const FluxModel& flux,
                  const MacroBoundary& boundary)
{
    const std::size_t n = state.w.size();
    if (n != grid.size()) {
        throw LengthMismatch("godunov_step: state does not match the grid");
    }
    const double t_mid = state.time + 0.5 * dt;
    const double ghost_l = boundary.w0_trace(t_mid);
    const double ghost_r = boundary.w1_trace(t_mid);
    const double dx = grid.dx();

    double a_max = std::max(std::abs(flux.speed(ghost_l)), std::abs(flux.speed(ghost_r)));
    for (const double w : state.w) {
        a_max = std::max(a_max, std::abs(flux.speed(w)));
    }
    if (a_max * dt > dx * (1.0 + 1e-12)) {
        throw CflViolation("godunov_step: max |a(w)| dt / dx = " + std::to_string(a_max * dt / dx) +
                           " exceeds 1");
    }

    std::vector<double> f(n + 1);
    f[0] = godunov_flux(flux, ghost_l, state.w[0]);
    for (std::size_t i = 1; i < n; ++i) {
        f[i] = godunov_flux(flux, state.w[i - 1], state.w[i]);
    }
    f[n] = godunov_flux(flux, state.w[n - 1], ghost_r);
    const double r = dt / dx;
    for (std::size_t i = 0; i < n; ++i) {
        state.w[i] -= r * (f[i + 1] - f[i]);
    }
    state.time += dt;
}

void source_split_step(MacroState& state, double dt, const SpatialGrid& grid,
                       const FluxModel& flux, const MacroBoundary& boundary,
                       const MacroSource& source)
{
    const double t_mid = state.time + 0.5 * dt;
    godunov_step(state, dt, grid, flux, boundary);
    if (!source) {
        return;
    }
    for (std::size_t i = 0; i < state.w.size(); ++i) {
        state.w[i] += dt * source(grid.center(i), t_mid, state.w[i]);
    }
}

ReferenceRun run_reference(const ReferenceConfig& config)
{
    if (!config.w0 || !config.boundary.w0_trace || !config.boundary.w1_trace) {
        throw ConfigError("reference run needs initial data and both boundary traces");
    }
    if (!(config.cfl > 0.0 && config.cfl <= 1.0) || !(config.t_end > 0.0)) {
        throw ConfigError("reference run: need 0 < cfl <= 1 and t_end > 0");
    }
    double dt = config.speed_bound > 0.0 ? config.cfl * config.grid.dx() / config.speed_bound
                                         : config.t_end;
    if (config.dt_max) {
        dt = std::min(dt, *config.dt_max);
    }

    std::vector<double> targets = config.output_times;
    if (targets.empty()) {
        targets = {0.0, config.t_end};
    }
    std::sort(targets.begin(), targets.end());

    ReferenceRun run;
    MacroState state{sample_profile(config.w0, config.grid), 0.0};
    for (const double target : targets) {
        const double span = target - state.time;
        if (span > 0.0) {
            const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt - 1e-9)));
            const double h = span / static_cast<double>(n);
            const double t0 = state.time;
            for (std::size_t k = 0; k < n; ++k) {
                source_split_step(state, h, config.grid, config.flux, config.boundary,
                                  config.source);
                state.time = t0 + static_cast<double>(k + 1) * h;
            }
            state.time = target;
            run.n_steps += n;
        }
        run.times.push_back(target);
        run.w.push_back(state.w);
    }
    return run;
}

} // namespace kinhydro
