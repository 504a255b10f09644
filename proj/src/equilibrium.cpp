#include "kinhydro/equilibrium.hpp"

#include "kinhydro/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kinhydro {

VelocityGrid::VelocityGrid(double v_min, double v_max, std::size_t n_cells)
    : n_(n_cells), j0_(0), dv_(0.0)
{
    if (n_cells == 0 || !(v_min < 0.0) || !(v_max > 0.0) || !std::isfinite(v_min) ||
        !std::isfinite(v_max)) {
        throw ConfigError("velocity grid: require v_min < 0 < v_max and n_v > 0");
    }
    dv_ = (v_max - v_min) / static_cast<double>(n_cells);
    const double zero_index = -v_min / dv_;
    const double rounded = std::round(zero_index);
    if (std::abs(zero_index - rounded) > 1e-9 * std::max(1.0, zero_index) || rounded < 1.0 ||
        rounded > static_cast<double>(n_cells) - 1.0) {
        throw ConfigError("velocity grid: v = 0 must lie on an interior cell edge "
                          "(-v_min/dv = " + std::to_string(zero_index) + ")");
    }
    j0_ = static_cast<std::size_t>(rounded);
}

int chi_pointwise(double u, double v)
{
    if (v > 0.0 && v <= u) {
        return 1;
    }
    if (v < 0.0 && v >= u) {
        return -1;
    }
    return 0;
}

namespace {

// Fills cells starting at the zero edge and moving away from it in the
// direction of sign(u). Assumes `out` has already been zeroed.
void fill_sharp(double u, const VelocityGrid& grid, std::span<double> out)
{
    const double mag = std::abs(u);
    const double sign = u > 0.0 ? 1.0 : -1.0;
    const double dv = grid.dv();
    const std::size_t j0 = grid.zero_edge();
    const std::size_t available = u > 0.0 ? grid.size() - j0 : j0;

    double full = std::floor(mag / dv);
    double frac = (mag - full * dv) / dv;
    if (frac >= 1.0) {
        full += 1.0;
        frac -= 1.0;
    } else if (frac < 0.0) {
        full -= 1.0;
        frac += 1.0;
    }
    frac = std::clamp(frac, 0.0, 1.0);
    auto n_full = static_cast<std::size_t>(std::max(full, 0.0));
    if (n_full > available || (n_full == available && frac > 0.0)) {
        throw OutOfRange("project_equilibrium: u = " + std::to_string(u) +
                         " exceeds the velocity grid");
    }
    for (std::size_t m = 0; m < n_full; ++m) {
        const std::size_t j = u > 0.0 ? j0 + m : j0 - 1 - m;
        out[j] = sign;
    }
    if (frac > 0.0) {
        const std::size_t j = u > 0.0 ? j0 + n_full : j0 - 1 - n_full;
        out[j] = sign * frac;
    }
}

} // namespace

void project_equilibrium_into(double u, const VelocityGrid& grid, std::span<double> out)
{
    if (out.size() != grid.size()) {
        throw LengthMismatch("project_equilibrium: slice length does not match the grid");
    }
    if (!grid.covers(u) || !std::isfinite(u)) {
        throw OutOfRange("project_equilibrium: u = " + std::to_string(u) +
                         " outside velocity grid [" + std::to_string(grid.v_min()) + ", " +
                         std::to_string(grid.v_max()) + "]");
    }
    std::fill(out.begin(), out.end(), 0.0);
    if (u != 0.0) {
        fill_sharp(u, grid, out);
    }
}

EquilibriumSlice project_equilibrium(double u, const VelocityGrid& grid)
{
    EquilibriumSlice slice{std::vector<double>(grid.size(), 0.0), grid};
    project_equilibrium_into(u, grid, slice.values);
    return slice;
}

void project_equilibrium_clamped(double k, const VelocityGrid& grid, std::span<double> out)
{
    project_equilibrium_into(std::clamp(k, grid.v_min(), grid.v_max()), grid, out);
}

double compensated_sum(std::span<const double> values)
{
    double sum = 0.0;
    double comp = 0.0;
    for (const double x : values) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

double zeroth_moment(std::span<const double> g, const VelocityGrid& grid)
{
    if (g.size() != grid.size()) {
        throw LengthMismatch("zeroth_moment: slice length does not match the grid");
    }
    return compensated_sum(g) * grid.dv();
}

double flux_moment(std::span<const double> g, const VelocityGrid& grid, const FluxModel& flux)
{
    if (g.size() != grid.size()) {
        throw LengthMismatch("flux_moment: slice length does not match the grid");
    }
    std::vector<double> terms(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
        terms[j] = g[j] * (flux.flux(grid.edge(j + 1)) - flux.flux(grid.edge(j)));
    }
    return compensated_sum(terms);
}

std::vector<double> cell_speeds(const VelocityGrid& grid, const FluxModel& flux)
{
    std::vector<double> speeds(grid.size());
    if (flux.kind() == FluxModel::Kind::Linear) {
        // exact, so that unit Courant numbers stay exact
        std::fill(speeds.begin(), speeds.end(), flux.linear_speed());
        return speeds;
    }
    for (std::size_t j = 0; j < grid.size(); ++j) {
        speeds[j] = (flux.flux(grid.edge(j + 1)) - flux.flux(grid.edge(j))) / grid.dv();
    }
    return speeds;
}

} // namespace kinhydro
