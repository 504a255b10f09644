#include "kinhydro/diagnostics.hpp"

#include "kinhydro/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace kinhydro {

void run_bounded(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& job)
{
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                job(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_lock);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

Oracle exact_oracle(std::function<double(double x, double t)> exact)
{
    return [exact = std::move(exact)](const std::vector<double>& times, const SpatialGrid& grid) {
        std::vector<std::vector<double>> out;
        for (const double t : times) {
            std::vector<double> w(grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i) {
                w[i] = exact(grid.center(i), t);
            }
            out.push_back(std::move(w));
        }
        return out;
    };
}

Oracle reference_oracle(ReferenceConfig config)
{
    return [config = std::move(config)](const std::vector<double>& times,
                                        const SpatialGrid& grid) {
        auto c = config;
        c.grid = grid;
        c.output_times = times;
        return run_reference(c).w;
    };
}

double space_time_l1(const std::vector<double>& times, const std::vector<std::vector<double>>& a,
                     const std::vector<std::vector<double>>& b, double dx)
{
    if (a.size() != times.size() || b.size() != times.size()) {
        throw LengthMismatch("space_time_l1: snapshot counts differ");
    }
    std::vector<double> per(times.size());
    for (std::size_t s = 0; s < times.size(); ++s) {
        if (a[s].size() != b[s].size()) {
            throw LengthMismatch("space_time_l1: field sizes differ");
        }
        double d = 0.0;
        for (std::size_t i = 0; i < a[s].size(); ++i) {
            d += std::abs(a[s][i] - b[s][i]);
        }
        per[s] = d * dx;
    }
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < times.size(); ++s) {
        total += 0.5 * (times[s + 1] - times[s]) * (per[s] + per[s + 1]);
    }
    return total;
}

double profile_tv(const Profile& w0, const SpatialGrid& grid)
{
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        tv += std::abs(w0(grid.center(i + 1)) - w0(grid.center(i)));
    }
    return tv;
}

bool SweepResult::passed() const
{
    return !rows.empty() &&
           std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.passed; });
}

std::string SweepResult::to_csv() const
{
    std::ostringstream os;
    os << "epsilon,l1_error,floor,passed\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6e,%.10e,%.10e,%s\n", r.epsilon, r.l1_error, r.floor,
                      r.passed ? "true" : "false");
        os << buf;
    }
    return os.str();
}

SweepResult hydrodynamic_limit_sweep(const RunConfig& base, const std::vector<double>& epsilons,
                                     const Oracle& oracle, const SweepOptions& options)
{
    if (epsilons.empty()) {
        throw ConfigError("sweep needs at least one epsilon");
    }
    for (std::size_t m = 0; m + 1 < epsilons.size(); ++m) {
        if (!(epsilons[m] > epsilons[m + 1])) {
            throw ConfigError("sweep epsilons must be sorted in descending order");
        }
    }
    SweepResult result;
    // space-time norm: the per-time floor dx TV integrated over the horizon
    result.floor = options.floor_constant * base.x_grid.dx() * options.tv_initial *
                   std::min(base.t_end, 1.0);
    result.rows.resize(epsilons.size());

    run_bounded(epsilons.size(), options.jobs, [&](std::size_t m) {
        auto& row = result.rows[m];
        row.epsilon = epsilons[m];
        row.floor = result.floor;
        try {
            auto config = base;
            config.epsilon = epsilons[m];
            const auto run = solve(config);
            const auto& rec = run.record;
            const auto ref = oracle(rec.times, rec.x_grid);
            row.l1_error = space_time_l1(rec.times, rec.w, ref, rec.x_grid.dx());
            double d = 0.0;
            for (std::size_t i = 0; i < rec.w.back().size(); ++i) {
                d += std::abs(rec.w.back()[i] - ref.back()[i]);
            }
            row.final_error = d * rec.x_grid.dx();
            if (options.on_row) {
                options.on_row(m, row, rec);
            }
        } catch (const std::exception& e) {
            row.error = e.what();
            row.l1_error = std::nan("");
        }
    });

    for (std::size_t m = 0; m < result.rows.size(); ++m) {
        auto& row = result.rows[m];
        if (!row.error.empty()) {
            row.passed = false;
            continue;
        }
        if (m == 0) {
            row.passed = true;
            continue;
        }
        const auto& prev = result.rows[m - 1];
        if (!prev.error.empty()) {
            row.passed = false;
        } else if (prev.l1_error > result.floor) {
            row.passed = row.l1_error < prev.l1_error;
        } else {
            row.passed = row.l1_error <=
                         prev.l1_error + std::max(0.05 * prev.l1_error, result.floor);
        }
    }
    return result;
}

bool RefinementResult::passed() const
{
    if (rows.size() < 2) {
        return false;
    }
    for (const auto& r : rows) {
        if (!r.error.empty() || !(r.l1_error > 0.0)) {
            return false;
        }
    }
    return slope >= min_slope;
}

std::string RefinementResult::to_csv() const
{
    std::ostringstream os;
    os << "n_x,dx,l1_error,slope,passed\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.10e,%.10e,%.6f,%s\n", r.n_x, r.dx, r.l1_error, slope,
                      passed() ? "true" : "false");
        os << buf;
    }
    return os.str();
}

RefinementResult grid_refinement_sweep(const RunConfig& base, const std::vector<std::size_t>& n_x,
                                       const Oracle& oracle, unsigned jobs, double min_slope)
{
    if (n_x.size() < 2) {
        throw ConfigError("grid refinement needs at least two resolutions");
    }
    RefinementResult result;
    result.min_slope = min_slope;
    result.rows.resize(n_x.size());
    run_bounded(n_x.size(), jobs, [&](std::size_t m) {
        auto& row = result.rows[m];
        row.n_x = n_x[m];
        try {
            auto config = base;
            config.x_grid = SpatialGrid(n_x[m]);
            row.dx = config.x_grid.dx();
            const auto run = solve(config);
            const auto& rec = run.record;
            row.l1_error = space_time_l1(rec.times, rec.w, oracle(rec.times, rec.x_grid),
                                         rec.x_grid.dx());
        } catch (const std::exception& e) {
            row.error = e.what();
            row.l1_error = std::nan("");
        }
    });
    std::vector<double> dx;
    std::vector<double> err;
    for (const auto& r : result.rows) {
        if (r.error.empty() && r.l1_error > 0.0) {
            dx.push_back(r.dx);
            err.push_back(r.l1_error);
        }
    }
    result.slope = dx.size() >= 2 ? loglog_slope(dx, err) : std::nan("");
    return result;
}

} // namespace kinhydro
