// kinhydro: run, sweep, compare and validate kinetic relaxation experiments.
//
// Exit codes: 0 all asserted diagnostics pass, 1 a diagnostic failed (the
// report is still written), 2 the configuration or inputs were rejected.

#include "experiment.hpp"

#include "kinhydro/errors.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace kinhydro;
using namespace kinhydro::cli;

struct RunArgs {
    std::string config_flag;
    std::string config_positional;
    std::string out;
    unsigned jobs = 0;
    bool dry_run = false;
    std::size_t snapshot_every = 0;
};

void add_run_options(CLI::App* cmd, RunArgs& args)
{
    cmd->add_option("config_path", args.config_positional, "Experiment config (JSON)");
    cmd->add_option("--config", args.config_flag, "Experiment config (JSON)");
    cmd->add_option("--out", args.out,
                    "Output directory (default: config 'output', then $KINETIC_HYDRO_OUT/<name>, "
                    "then runs/<name>)");
    cmd->add_option("--jobs", args.jobs, "Worker threads for sweeps (0 = all cores)");
    cmd->add_flag("--dry-run", args.dry_run, "Validate and write manifest.json only");
    cmd->add_option("--snapshot-every", args.snapshot_every,
                    "Record a density snapshot every N steps");
}

std::string config_path(const RunArgs& args)
{
    if (!args.config_flag.empty() && !args.config_positional.empty() &&
        args.config_flag != args.config_positional) {
        throw ConfigError("two different config paths given");
    }
    const auto& p = args.config_flag.empty() ? args.config_positional : args.config_flag;
    if (p.empty()) {
        throw ConfigError("no config given (positional or --config)");
    }
    return p;
}

int do_run(const RunArgs& args, bool require_sweep)
{
    const auto cfg = load_config(config_path(args));
    if (require_sweep && cfg.sweep == SweepAxis::None) {
        throw ConfigError("sweep needs a config with a 'sweep' axis (epsilon or n_x)");
    }
    RunOptions opt;
    opt.out_dir = resolve_output(cfg, args.out.empty() ? std::nullopt
                                                       : std::optional<std::string>(args.out));
    opt.dry_run = args.dry_run;
    opt.jobs = args.jobs;
    opt.snapshot_every = args.snapshot_every;
    const int code = run_experiment(cfg, opt);
    std::printf("%s: %s (%s)\n", cfg.name.c_str(),
                args.dry_run ? "manifest written" : (code == 0 ? "PASS" : "FAIL"),
                opt.out_dir.string().c_str());
    if (!args.dry_run) {
        std::printf("report: %s\n", (opt.out_dir / "report.txt").string().c_str());
    }
    return code;
}

int do_validate(const RunArgs& args)
{
    auto cfg = load_config(config_path(args));
    if (args.snapshot_every > 0) {
        cfg.snapshot_every = args.snapshot_every;
    }
    const auto a = assemble(cfg);
    const auto plan = plan_time_steps(a.run);
    std::printf("%s: valid\n", cfg.name.c_str());
    std::printf("  hash     %s\n", config_hash(cfg).c_str());
    std::printf("  grid     n_x=%zu dx=%.6g  v=[%.6g, %.6g] n_v=%zu dv=%.6g\n",
                a.run.x_grid.size(), a.run.x_grid.dx(), a.run.v_grid.v_min(),
                a.run.v_grid.v_max(), a.run.v_grid.size(), a.run.v_grid.dv());
    std::printf("  time     dt=%.6g steps=%zu a_inf=%.6g courant=%.6g\n", plan.dt, plan.n_steps,
                plan.a_inf, plan.courant);
    std::printf("  scenario %s | %s | %s\n", a.scenario.initial.description.c_str(),
                a.run.boundary.left.description.c_str(), a.run.boundary.right.description.c_str());
    return 0;
}

int do_compare(const std::string& a, const std::string& b, const std::string& out)
{
    const auto rep = compare_runs(a, b);
    std::cout << rep.to_text();
    if (!out.empty()) {
        write_atomic(std::filesystem::path(out) / "compare_report.json", rep.to_json());
    }
    return rep.passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Kinetic relaxation solver for scalar conservation laws on (0, 1)"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Single run or sweep; writes fields and reports");
    add_run_options(run, run_args);

    RunArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "Run a config that declares a sweep axis");
    add_run_options(sweep, sweep_args);

    RunArgs validate_args;
    auto* validate = app.add_subcommand("validate", "Check a config without running it");
    validate->add_option("config_path", validate_args.config_positional, "Experiment config (JSON)");
    validate->add_option("--config", validate_args.config_flag, "Experiment config (JSON)");
    validate->add_option("--snapshot-every", validate_args.snapshot_every,
                         "Record a density snapshot every N steps");

    std::string dir_a;
    std::string dir_b;
    std::string compare_out;
    auto* compare = app.add_subcommand("compare", "L1 contraction ledger between two runs");
    compare->add_option("run_a", dir_a, "First run directory")->required();
    compare->add_option("run_b", dir_b, "Second run directory")->required();
    compare->add_option("--out", compare_out, "Directory for compare_report.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run) {
            return do_run(run_args, false);
        }
        if (*sweep) {
            return do_run(sweep_args, true);
        }
        if (*validate) {
            return do_validate(validate_args);
        }
        if (*compare) {
            return do_compare(dir_a, dir_b, compare_out);
        }
    } catch (const kinhydro::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const kinhydro::ManifestMismatch& e) {
        std::fprintf(stderr, "manifest mismatch: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
