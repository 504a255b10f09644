#pragma once

#include "kinhydro/kinetic_solver.hpp"
#include "kinhydro/reference_solver.hpp"

#include <functional>
#include <optional>
#include <string>

namespace kinhydro {

/// Preset strings describing a problem.
///
/// initial:  constant:c | riemann:wl,wr,x0 | pulse:base,amp,center,width |
///           sine:mean,amp,k | manufactured:mean,amp | csv:path
/// boundary: zero | equilibrium:c | match | exact | csv:path
/// source:   none | damping:r | manufactured
struct ScenarioSpec {
    std::string initial = "riemann:1,0,0.5";
    std::string left = "match";
    std::string right = "match";
    std::string source = "none";
};

/// A fully assembled problem plus whatever closed-form solution is known.
struct Scenario {
    InitialData initial;
    BoundaryData boundary;
    std::optional<SourceModel> source;
    /// Exact macroscopic solution w(x, t); empty when none is known.
    std::function<double(double x, double t)> exact;
    /// Macroscopic boundary values: zeroth moments of the kinetic data.
    std::function<double(double t)> left_trace;
    std::function<double(double t)> right_trace;
    /// Essential range of the macroscopic data.
    double data_lo = 0.0;
    double data_hi = 0.0;
    std::string description;
};

/// Throws ConfigError on unknown or malformed presets.
Scenario build_scenario(const ScenarioSpec& spec, const FluxModel& flux, const SpatialGrid& x_grid,
                        const VelocityGrid& v_grid);

/// Copies a scenario's data into a run configuration.
void apply_scenario(RunConfig& config, const Scenario& scenario);

/// Godunov reference for the same problem: macroscopic initial profile, the
/// boundary moments as ghost data, the source as S(x, t, w). Throws
/// ConfigError when the initial data are kinetic only.
ReferenceConfig reference_config(const Scenario& scenario, const RunConfig& config);

/// Parses "a,b,c" into exactly `count` numbers.
std::vector<double> parse_numbers(const std::string& text, std::size_t count,
                                  const std::string& what);

} // namespace kinhydro
