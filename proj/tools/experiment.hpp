#pragma once

#include "kinhydro/diagnostics.hpp"
#include "kinhydro/scenarios.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace kinhydro::cli {

enum class SweepAxis { None, Epsilon, Dx };

/// Everything a run needs, read from a JSON file. Unknown keys are errors so
/// typos do not silently fall back to defaults.
struct ExperimentConfig {
    std::string name = "run";
    std::string flux = "burgers";
    ScenarioSpec scenario;
    double epsilon = 1e-2;
    std::size_t n_x = 200;
    double v_min = -1.5;
    double v_max = 1.5;
    std::size_t n_v = 60;
    double cfl = 0.9;
    double t_end = 0.25;
    std::optional<double> dt_max;
    std::size_t snapshots = 32;
    std::size_t snapshot_every = 0;
    SolveMode mode = SolveMode::Splitting;
    std::size_t picard_max_iterations = 50;
    double picard_tol = 1e-10;
    SweepAxis sweep = SweepAxis::None;
    std::vector<double> sweep_epsilon;
    std::vector<std::size_t> sweep_n_x;
    /// Subset of {support, bv, entropy, equilibrium}.
    std::set<std::string> diagnostics{"support", "bv", "entropy", "equilibrium"};
    bool write_kinetic_fields = false;
    std::string output;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical form; the output directory is left out so it does not change
/// the hash.
nlohmann::ordered_json to_json(const ExperimentConfig& config);

std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash(const ExperimentConfig& config);

/// Solver configuration plus the scenario it was built from.
struct Assembled {
    RunConfig run;
    Scenario scenario;
};

/// Builds and validates. Throws ConfigError naming the violated invariant.
Assembled assemble(const ExperimentConfig& config);

struct RunOptions {
    std::filesystem::path out_dir;
    bool dry_run = false;
    unsigned jobs = 0;
    /// Overrides the config when nonzero.
    std::size_t snapshot_every = 0;
};

/// Executes a single run or a sweep and writes the artifacts. Returns 0 when
/// every asserted diagnostic passes, 1 otherwise. Config problems throw.
int run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// Output directory: explicit flag, then the config, then the environment
/// root joined with the run name, then runs/<name>.
std::filesystem::path resolve_output(const ExperimentConfig& config,
                                     const std::optional<std::string>& flag);

/// Contraction ledger between two run directories. Throws ManifestMismatch
/// when grids, epsilon, flux or time stepping differ.
DiagnosticsReport compare_runs(const std::filesystem::path& a, const std::filesystem::path& b);

/// Rebuilds the parts of a run record the contraction ledger needs.
RunRecord load_run_record(const std::filesystem::path& dir);

/// Writes through a temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& text);

} // namespace kinhydro::cli
