#pragma once

#include "kinhydro/flux_models.hpp"
#include "kinhydro/kinetic_solver.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace kinhydro {

struct MacroState {
    std::vector<double> w;
    double time = 0.0;
};

/// Ghost values at the walls. The Riemann problem at each wall decides
/// whether the datum enters.
struct MacroBoundary {
    std::function<double(double t)> w0_trace;
    std::function<double(double t)> w1_trace;
};

using MacroSource = std::function<double(double x, double t, double w)>;

/// Godunov update with boundary ghosts sampled at t + dt/2. Throws
/// CflViolation when max |a(w)| dt > dx over the interface states.
void godunov_step(MacroState& state, double dt, const SpatialGrid& grid, const FluxModel& flux,
                  const MacroBoundary& boundary);

/// godunov_step followed by w <- w + dt S(x, t + dt/2, w).
void source_split_step(MacroState& state, double dt, const SpatialGrid& grid,
                       const FluxModel& flux, const MacroBoundary& boundary,
                       const MacroSource& source);

struct ReferenceConfig {
    SpatialGrid grid{100};
    FluxModel flux = FluxModel::burgers();
    Profile w0;
    MacroBoundary boundary;
    MacroSource source;
    double t_end = 0.25;
    double cfl = 0.9;
    /// Bound on |a(w)| over the expected solution range; sets the step.
    double speed_bound = 1.0;
    std::optional<double> dt_max;
    /// Times at which w is recorded (sorted, within [0, t_end]); the march
    /// lands on each of them exactly. Empty records t = 0 and t_end only.
    std::vector<double> output_times;
};

struct ReferenceRun {
    std::vector<double> times;
    std::vector<std::vector<double>> w;
    std::size_t n_steps = 0;
};

ReferenceRun run_reference(const ReferenceConfig& config);

/// Cell values of a profile at the grid centres.
std::vector<double> sample_profile(const Profile& w0, const SpatialGrid& grid);

} // namespace kinhydro
