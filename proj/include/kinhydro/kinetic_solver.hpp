#pragma once

#include "kinhydro/equilibrium.hpp"
#include "kinhydro/flux_models.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kinhydro {

/// Uniform cell-centred grid on the slab (0, 1).
class SpatialGrid {
public:
    explicit SpatialGrid(std::size_t n_cells);

    std::size_t size() const { return n_; }
    double dx() const { return dx_; }
    double center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dx_; }
    double edge(std::size_t i) const { return static_cast<double>(i) * dx_; }

    bool operator==(const SpatialGrid& o) const { return n_ == o.n_; }

private:
    std::size_t n_;
    double dx_;
};

/// Density over (x-cell, v-cell), stored x-major so each velocity slice is contiguous.
class KineticField {
public:
    KineticField() = default;
    KineticField(std::size_t n_x, std::size_t n_v, double value = 0.0)
        : n_x_(n_x), n_v_(n_v), data_(n_x * n_v, value) {}

    std::size_t n_x() const { return n_x_; }
    std::size_t n_v() const { return n_v_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_v_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_v_ + j]; }

    std::span<double> slice(std::size_t i) { return {data_.data() + i * n_v_, n_v_}; }
    std::span<const double> slice(std::size_t i) const { return {data_.data() + i * n_v_, n_v_}; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    bool operator==(const KineticField&) const = default;

private:
    std::size_t n_x_ = 0;
    std::size_t n_v_ = 0;
    std::vector<double> data_;
};

/// Zeroth moment w(x_i) = sum_j g(i, j) dv for every x-cell.
std::vector<double> density_field(const KineticField& g, const VelocityGrid& grid);

/// sum |g - G| dx dv.
double l1_distance(const KineticField& g, const KineticField& h, double dx, double dv);

struct KineticState {
    KineticField g;
    double time = 0.0;
    /// Time-integrated signed fluxes int |a| g dv dt through each wall,
    /// split by outgoing and incoming velocities.
    double outflow_0 = 0.0;
    double outflow_1 = 0.0;
    double inflow_0 = 0.0;
    double inflow_1 = 0.0;
};

/// Kinetic data prescribed on one wall. `fill` writes per-velocity-cell values
/// at time t; the solver reads only the incoming cells (a > 0 at x = 0,
/// a < 0 at x = 1).
struct BoundarySide {
    std::function<void(double t, const VelocityGrid&, std::span<double>)> fill;
    double sup_norm = 0.0;
    double v_lo = 0.0;
    double v_hi = 0.0;
    /// Range of the zeroth moment over time; used for grid-coverage checks.
    double w_lo = 0.0;
    double w_hi = 0.0;
    std::string description = "zero";
};

struct BoundaryData {
    BoundarySide left;
    BoundarySide right;
};

BoundarySide zero_boundary();
/// chi_{w(t)} projected on the grid.
BoundarySide equilibrium_boundary(std::function<double(double)> w_of_t, double w_lo, double w_hi,
                                  std::string description);
BoundarySide constant_equilibrium_boundary(double w);
/// Pointwise g(v, t) sampled at cell centres.
BoundarySide kinetic_boundary(std::function<double(double v, double t)> g, double sup_norm,
                              double v_lo, double v_hi, std::string description);

/// Zeroth moment of the boundary data at time t.
double boundary_moment(const BoundarySide& side, double t, const VelocityGrid& grid);

/// Velocity-space force S(x, t, v) with S(x, t, 0) = 0.
struct SourceModel {
    std::function<double(double x, double t, double v)> force;
    std::function<double(double x, double t, double v)> force_dv;
    /// Declared sup norms of S and dS/dv over the run box.
    double sup_force = 0.0;
    double sup_force_dv = 0.0;
    std::string name;

    /// Source term of the macroscopic law, S(x, t, w).
    double macro(double x, double t, double w) const { return force(x, t, w); }
};

/// Samples S(x, t, 0) on a lattice; throws ConfigError if it is not zero.
void check_source_vanishes_at_zero(const SourceModel& source, double t_end);

/// Initial data: a macroscopic profile projected onto chi_{w0}, or a kinetic
/// density (pointwise function or table).
struct InitialData {
    std::function<double(double)> macro;
    std::function<double(double x, double v)> kinetic;
    std::optional<KineticField> table;
    double w_lo = 0.0;
    double w_hi = 0.0;
    double sup_norm = 1.0;
    double v_lo = 0.0;
    double v_hi = 0.0;
    std::string description;
};

KineticField initialize(const InitialData& data, const SpatialGrid& x_grid,
                        const VelocityGrid& v_grid);

enum class SolveMode { Splitting, Picard };

struct RunConfig {
    double epsilon = 1e-2;
    double cfl = 0.9;
    double t_end = 0.25;
    std::optional<double> dt_max;
    SpatialGrid x_grid{100};
    VelocityGrid v_grid{-1.0, 1.0, 20};
    FluxModel flux = FluxModel::burgers();
    BoundaryData boundary{zero_boundary(), zero_boundary()};
    InitialData initial;
    std::optional<SourceModel> source;
    SolveMode mode = SolveMode::Splitting;
    /// false emulates epsilon = infinity (pure transport).
    bool relax = true;
    /// Snapshot cadence: every `snapshot_every` steps if > 0, otherwise about
    /// `snapshot_count` evenly spaced snapshots.
    std::size_t snapshot_count = 32;
    std::size_t snapshot_every = 0;
    bool record_kinetic_snapshots = false;
    bool record_traces = true;
};

struct TimeStepPlan {
    double dt = 0.0;
    std::size_t n_steps = 0;
    /// max |a| over the velocity grid.
    double a_inf = 0.0;
    /// Largest Courant number a dt / dx actually used.
    double courant = 0.0;
};

/// Throws ConfigError naming the violated invariant.
void validate(const RunConfig& config);

/// Fixed step satisfying max|a| dt <= cfl dx (and |S| dt <= cfl dv with a
/// source), shortened so that t_end is hit exactly.
TimeStepPlan plan_time_steps(const RunConfig& config);

/// max(|g0|_inf, |boundary|_inf, 1).
double linf_budget(const RunConfig& config);

/// Values crossing each wall during one transport step: incoming data on
/// inflow rows, the wall cell value on outflow rows, 0 for zero-speed rows.
struct WallTrace {
    std::vector<double> left;
    std::vector<double> right;
};

struct ForceStats {
    /// max over cells of |S(v_{j+1/2}) - S(v_{j-1/2})| / dv.
    double discrete_sup_dv = 0.0;
    /// Change of int int g dx dv produced by the step.
    double mass_change = 0.0;
};

/// g <- chi_w + exp(-dt/eps)(g - chi_w) in every x-cell. Leaves w unchanged.
void relax_step(KineticState& state, double dt, double epsilon, const VelocityGrid& v_grid);

/// Relaxation towards a prescribed w (frozen target of the fixed-point iteration).
void relax_towards(KineticField& g, std::span<const double> w_target, double dt, double epsilon,
                   const VelocityGrid& v_grid);

/// First-order upwind free streaming of every velocity row at its cell speed,
/// with inflow data sampled at t + dt/2. Throws CflViolation when a Courant
/// number exceeds one.
WallTrace transport_step(KineticState& state, double dt, const BoundaryData& boundary,
                         const SpatialGrid& x_grid, const VelocityGrid& v_grid,
                         std::span<const double> speeds);

/// Upwind discretisation of dg/dt + S dg/dv = 0 with S sampled on velocity
/// cell edges at t + dt/2 and zero inflow at the velocity-grid ends.
ForceStats force_step(KineticState& state, double dt, const SourceModel& source,
                      const SpatialGrid& x_grid, const VelocityGrid& v_grid);

/// relax -> force -> transport, then time += dt.
void step(KineticState& state, double dt, const RunConfig& config);

/// Per-step histories of the wall traces, shared layout [step][v-cell].
struct TraceHistory {
    std::vector<double> dt;
    std::vector<double> left;
    std::vector<double> right;
};

/// Everything recorded during a run.
struct RunRecord {
    SpatialGrid x_grid{1};
    VelocityGrid v_grid{-1.0, 1.0, 2};
    std::string flux_name;
    double epsilon = 0.0;
    double dt = 0.0;
    std::size_t n_steps = 0;
    double a_inf = 0.0;
    double linf_budget = 1.0;
    bool has_source = false;
    std::vector<double> speeds;

    std::vector<std::size_t> snapshot_steps;
    std::vector<double> times;
    std::vector<std::vector<double>> w;
    std::vector<KineticField> g;

    KineticField g_initial;
    KineticField g_final;
    TraceHistory traces;

    /// Indexed by step, entry 0 is the initial state.
    std::vector<double> max_abs_g;
    std::vector<double> mass;
    /// Indexed by step (n_steps entries).
    std::vector<double> inflow_mass;
    std::vector<double> outflow_mass;
    std::vector<double> source_mass;
    std::vector<double> source_sup_dv;
};

/// Read-only view handed to observers after each step.
struct StepView {
    std::size_t step;
    double t;
    double dt;
    const KineticField& before;
    const KineticField& after_relax;
    const KineticField& after_force;
    const KineticState& after;
    const WallTrace& trace;
    const RunConfig& config;
    std::span<const double> speeds;
    double source_sup_dv;
};

using StepObserver = std::function<void(const StepView&)>;

struct SolveResult {
    KineticState state;
    RunRecord record;
};

/// Marches from t = 0 to t_end with a fixed step. Throws NumericalBlowup on a
/// non-finite density, and propagates the step errors.
SolveResult solve(const RunConfig& config, std::span<const StepObserver> observers = {});

struct PicardOptions {
    std::size_t max_iterations = 50;
    double tol = 1e-10;
    /// Frozen density history w[step][x-cell] for the first iterate; defaults
    /// to the initial moment held constant in time.
    std::optional<std::vector<std::vector<double>>> initial_guess;
};

struct PicardResult {
    /// Space-time L1 distance between successive iterates (from iterate 2 on).
    std::vector<double> residuals;
    std::vector<double> ratios;
    std::size_t iterations = 0;
    /// g at the end of every step of the final iterate (entry 0 = initial data).
    std::vector<KineticField> trajectory;
    RunRecord record;
};

/// Fixed-point iteration: each iterate solves the linear transport-relaxation
/// problem with the equilibrium target frozen at the previous iterate's
/// density. Throws NoConvergence carrying the residual history.
PicardResult picard_solve(const RunConfig& config, const PicardOptions& options);

/// Space-time distance sum_k dt sum |g_k - h_k| dx dv over steps 1..N.
double trajectory_distance(const std::vector<KineticField>& a, const std::vector<KineticField>& b,
                           double dt, double dx, double dv);

} // namespace kinhydro
