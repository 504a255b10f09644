#pragma once

#include "kinhydro/kinetic_solver.hpp"
#include "kinhydro/reference_solver.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kinhydro {

// ---------------------------------------------------------------------------
// Reports

struct ReportEntry {
    double value = 0.0;
    double bound = 0.0;
    double tolerance = 0.0;
    bool passed = true;
    /// Which estimate the entry checks, e.g. "l1-contraction".
    std::string provenance;
    /// Informational entries never fail the report.
    bool asserted = true;
};

/// Named entries; `passed` is value <= bound + tolerance for asserted entries.
class DiagnosticsReport {
public:
    void add(const std::string& name, double value, double bound, double tolerance,
             const std::string& provenance, bool asserted = true);
    void note(const std::string& key, const std::string& value) { metadata_[key] = value; }
    void merge(const DiagnosticsReport& other, const std::string& prefix = "");

    bool passed() const;
    const std::map<std::string, ReportEntry>& entries() const { return entries_; }
    const ReportEntry& at(const std::string& name) const;
    bool contains(const std::string& name) const { return entries_.count(name) != 0; }
    const std::map<std::string, std::string>& metadata() const { return metadata_; }

    std::string to_json() const;
    std::string to_text() const;

private:
    std::map<std::string, ReportEntry> entries_;
    std::map<std::string, std::string> metadata_;
};

// ---------------------------------------------------------------------------
// Test functions

/// psi(x, t) = X(x) T(t) with X, T built from the C^1 bump (1 - s^2)^2.
/// Interior members vanish near both walls; the wall variants are centred on
/// x = 0 or x = 1 so psi is positive on that wall.
class TestFunction {
public:
    enum class Placement { Interior, TouchLeft, TouchRight };

    TestFunction(Placement placement, double x_center, double x_radius, double t_center,
                 double t_radius);

    double operator()(double x, double t) const;
    double d_dt(double x, double t) const;
    double d_dx(double x, double t) const;
    /// int int |d_t psi| + |d_x psi| dx dt over (0,1) x R.
    double gradient_l1() const;

    Placement placement() const { return placement_; }
    const std::string& name() const { return name_; }
    double x_center() const { return xc_; }
    double x_radius() const { return xr_; }
    double t_center() const { return tc_; }
    double t_radius() const { return tr_; }

private:
    Placement placement_;
    double xc_;
    double xr_;
    double tc_;
    double tr_;
    std::string name_;
};

/// Five members for a horizon T: three interior, one per wall. Time support
/// is strictly inside (0, T).
std::vector<TestFunction> standard_test_functions(double t_end);

/// Kruzhkov constants: 21 points over the data range widened by 10% per side,
/// followed by two sentinels outside the velocity grid.
std::vector<double> kruzhkov_constants(double lo, double hi, const VelocityGrid& grid);

/// C (dx + dv + dt) |grad psi|_1 scale.
double quadrature_tolerance(double c, double dx, double dv, double dt, const TestFunction& psi,
                            double scale);

// ---------------------------------------------------------------------------
// Contraction

struct ContractionLedger {
    double lhs = 0.0;
    double rhs = 0.0;
    double volume_now = 0.0;
    double volume_initial = 0.0;
    double outflow_difference = 0.0;
    double inflow_difference = 0.0;
    /// exp(sum dt max |dS/dv|); 1 without a source.
    double growth_factor = 1.0;
    double scale = 1.0;
};

/// L1 distance at t_end plus outgoing trace differences against the initial
/// distance plus incoming data differences. With a source only the volume
/// terms enter and the right side carries the growth factor; the outgoing
/// traces are still reported. Throws GridMismatch unless the runs share grids,
/// dt, epsilon and flux.
ContractionLedger contraction_ledger(const RunRecord& a, const RunRecord& b);

/// Ledger as a report entry with tolerance 1e-10 scale.
DiagnosticsReport contraction_report(const RunRecord& a, const RunRecord& b);

// ---------------------------------------------------------------------------
// Kinetic entropy

struct KineticEntropyTerms {
    double time = 0.0;
    double flux = 0.0;
    double inflow = 0.0;
    double outflow = 0.0;
    /// sum dt psi g dS/dv sign(g - chi_k); zero without a source.
    double source = 0.0;

    /// Residual including the outgoing boundary term; <= 0 for the scheme.
    double full() const { return time + flux + inflow + outflow - source; }
    /// Residual with inflow boundary terms only.
    double inflow_form() const { return time + flux + inflow - source; }
    double scale() const;
};

/// Observer accumulating the discrete kinetic entropy residual for every
/// (k, psi) pair during a run. Uses the same upwind fluxes as the transport,
/// so the full residual is nonpositive up to rounding.
class KineticEntropyMonitor {
public:
    KineticEntropyMonitor(std::vector<double> ks, std::vector<TestFunction> psis);

    StepObserver observer();

    const std::vector<double>& ks() const { return ks_; }
    const std::vector<TestFunction>& psis() const { return psis_; }
    const KineticEntropyTerms& terms(std::size_t k_index, std::size_t psi_index) const;

    /// Entries for every pair: interior k against tol_q, sentinels against
    /// 1e-10 scale, with C the tolerance constant.
    DiagnosticsReport report(const RunRecord& record, double c_tol, bool source_present) const;

private:
    void observe(const StepView& view);

    std::vector<double> ks_;
    std::vector<TestFunction> psis_;
    std::vector<KineticEntropyTerms> terms_;
};

/// Convenience wrapper: runs the config and returns the residual terms.
KineticEntropyTerms kinetic_entropy_residual(const RunConfig& config, double k,
                                             const TestFunction& psi);

// ---------------------------------------------------------------------------
// Macroscopic entropy

struct MacroEntropyInput {
    SpatialGrid x_grid{1};
    VelocityGrid v_grid{-1.0, 1.0, 2};
    FluxModel flux = FluxModel::burgers();
    std::vector<double> times;
    std::vector<std::vector<double>> w;
    /// Kinetic data on x = 0.
    BoundarySide g0;
    /// Macroscopic datum on x = 1.
    std::function<double(double t)> w1;
    /// S(x, t, w); empty without a source.
    MacroSource source;
};

struct MacroEntropyTerms {
    double interior = 0.0;
    double gamma1 = 0.0;
    double gamma0 = 0.0;
    double source = 0.0;
    double residual() const { return interior + gamma1 + gamma0 - source; }
    double scale() const;
};

/// Kruzhkov form with the x = 1 macroscopic term and the x = 0 kinetic term,
/// midpoint in x, trapezoid in time over the snapshots.
MacroEntropyTerms macro_entropy_residual(const MacroEntropyInput& input, double k,
                                         const TestFunction& psi);

/// Entries for every (k, psi) pair against C (dx + dv + dt) |grad psi|_1
/// scale, dt the widest snapshot gap. Informational when a source is present.
DiagnosticsReport macro_entropy_report(const MacroEntropyInput& input, const std::vector<double>& ks,
                                       const std::vector<TestFunction>& psis, double c_tol);

/// Incoming part of the equilibrium flux, int min(a(v) n, 0) chi_u(v) dv.
double incoming_flux_part(double u, double normal, const FluxModel& flux);

// ---------------------------------------------------------------------------
// Monitors

struct Window {
    double a = 0.2;
    double b = 0.8;
};

/// Observer for the interior BV bound and the time-Lipschitz bound.
class BvLipschitzMonitor {
public:
    /// Throws WindowTouchesBoundary unless 0 < a < b < 1.
    explicit BvLipschitzMonitor(Window window = {});

    StepObserver observer();
    /// Combines the per-step data with the recorded density snapshots.
    DiagnosticsReport report(const RunRecord& record) const;

    double max_bv() const { return max_bv_; }
    double max_lipschitz_ratio(const RunRecord& record) const;
    double lipschitz_bound() const;

private:
    void observe(const StepView& view);

    Window window_;
    bool started_ = false;
    bool source_ = false;
    double budget_ = 0.0;
    double max_excess_ = -1e300;
    double max_bv_ = 0.0;
    double max_kinetic_bv_ = 0.0;
    double a_inf_support_ = 0.0;
    double source_correction_ = 0.0;
    double scale_ = 1.0;
    std::vector<double> ghost_left_;
    std::vector<double> ghost_right_;
};

/// Total variation of w over cells whose centres lie in [a, b].
double window_bv(std::span<const double> w, const SpatialGrid& grid, Window window);

/// Observer for the L-infinity bound, the velocity support and the spatial
/// propagation speed.
class SupportSpeedMonitor {
public:
    explicit SupportSpeedMonitor(double threshold = 1e-14);

    StepObserver observer();
    DiagnosticsReport report() const;

    double max_linf_excess() const { return linf_excess_; }
    double max_v_excess() const { return v_excess_; }
    double max_x_excess() const { return x_excess_; }

private:
    void observe(const StepView& view);
    void start(const StepView& view);

    double threshold_;
    bool started_ = false;
    double linf_budget_ = 1.0;
    double linf_excess_ = -1e300;
    double v_excess_ = -1e300;
    double x_excess_ = -1e300;
    double v_allowed_lo_ = 0.0;
    double v_allowed_hi_ = 0.0;
    double x_lo_ = 0.0;
    double x_hi_ = 0.0;
    bool empty_ = true;
    double speed_ = 0.0;
    double sup_force_ = 0.0;
};

/// Per-snapshot sum |g - chi_w| dx dv over cells in the window. Needs kinetic
/// snapshots in the record.
std::vector<double> equilibrium_distance(const RunRecord& record, Window window = {0.0, 1.0});

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Hydrodynamic limit

/// Produces reference density fields at the requested times on the grid.
using Oracle = std::function<std::vector<std::vector<double>>(const std::vector<double>& times,
                                                              const SpatialGrid& grid)>;

/// Samples a closed-form solution at cell centres.
Oracle exact_oracle(std::function<double(double x, double t)> exact);
/// Runs the Godunov reference (grid and output times taken from the call).
Oracle reference_oracle(ReferenceConfig config);

/// Space-time L1 distance, trapezoid in time over matching snapshots.
double space_time_l1(const std::vector<double>& times, const std::vector<std::vector<double>>& a,
                     const std::vector<std::vector<double>>& b, double dx);

struct SweepRow {
    double epsilon = 0.0;
    double l1_error = 0.0;
    /// L1 distance at t_end.
    double final_error = 0.0;
    double floor = 0.0;
    bool passed = true;
    std::string error;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double floor = 0.0;
    bool passed() const;
    std::string to_csv() const;
};

struct SweepOptions {
    /// floor = floor_constant dx TV(w0) min(T, 1)
    double floor_constant = 5.0;
    double tv_initial = 0.0;
    unsigned jobs = 0;
    /// Called from the worker once a row has run (not for failed rows).
    std::function<void(std::size_t index, const SweepRow& row, const RunRecord& record)> on_row;
};

/// Runs the kinetic solver for each epsilon (descending) on a bounded pool
/// and compares moments against the oracle. Row i+1 passes when it is
/// strictly below row i while row i is above the floor, and otherwise when it
/// does not exceed row i by more than max(5%, floor). Solver errors are
/// recorded in the row and the sweep continues.
SweepResult hydrodynamic_limit_sweep(const RunConfig& base, const std::vector<double>& epsilons,
                                     const Oracle& oracle, const SweepOptions& options);

struct RefinementRow {
    std::size_t n_x = 0;
    double dx = 0.0;
    double l1_error = 0.0;
    std::string error;
};

struct RefinementResult {
    std::vector<RefinementRow> rows;
    /// Least-squares slope of log error against log dx.
    double slope = 0.0;
    double min_slope = 0.7;
    bool passed() const;
    std::string to_csv() const;
};

/// Fixed epsilon, one run per spatial resolution; the error against the
/// oracle should fall at least like dx^min_slope.
RefinementResult grid_refinement_sweep(const RunConfig& base, const std::vector<std::size_t>& n_x,
                                       const Oracle& oracle, unsigned jobs,
                                       double min_slope = 0.7);

/// Total variation of the cell samples of a profile.
double profile_tv(const Profile& w0, const SpatialGrid& grid);

/// Runs jobs on at most `workers` threads; results keep submission order.
void run_bounded(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& job);

} // namespace kinhydro
