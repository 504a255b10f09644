#pragma once

#include "kinhydro/flux_models.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace kinhydro {

/// Uniform cell-centred velocity grid on [v_min, v_max] with v = 0 on a cell edge.
///
/// Edges are computed as integer multiples of dv measured from the zero edge,
/// so 0 is represented exactly and the equilibrium of either sign starts on a
/// cell boundary.
class VelocityGrid {
public:
    /// Throws ConfigError unless v_min < 0 < v_max and -v_min/dv is an integer.
    VelocityGrid(double v_min, double v_max, std::size_t n_cells);

    double v_min() const { return edge(0); }
    double v_max() const { return edge(n_); }
    double dv() const { return dv_; }
    std::size_t size() const { return n_; }
    /// Index of the edge located at v = 0; cells below it carry v < 0.
    std::size_t zero_edge() const { return j0_; }

    double edge(std::size_t j) const
    {
        return (static_cast<double>(j) - static_cast<double>(j0_)) * dv_;
    }
    double center(std::size_t j) const
    {
        return (static_cast<double>(j) - static_cast<double>(j0_) + 0.5) * dv_;
    }
    bool covers(double u) const { return u >= v_min() && u <= v_max(); }

    bool operator==(const VelocityGrid& o) const
    {
        return n_ == o.n_ && j0_ == o.j0_ && dv_ == o.dv_;
    }

private:
    std::size_t n_;
    std::size_t j0_;
    double dv_;
};

/// Sharp-cell projection of the signature function chi_u onto a velocity grid.
struct EquilibriumSlice {
    std::vector<double> values;
    VelocityGrid grid;
};

/// chi_u(v): +1 for 0 < v <= u, -1 for u <= v < 0, 0 otherwise.
int chi_pointwise(double u, double v);

/// Projects chi_u so that sum(values) * dv == u up to rounding. Full cells
/// between 0 and u get +-1 and the cell containing u gets the remaining
/// fraction. Throws OutOfRange when u lies outside the grid.
EquilibriumSlice project_equilibrium(double u, const VelocityGrid& grid);

/// Allocation-free form of project_equilibrium; `out` is overwritten.
void project_equilibrium_into(double u, const VelocityGrid& grid, std::span<double> out);

/// Projection of chi_k with k clipped to [v_min, v_max]. Used for Kruzhkov
/// constants, which may lie outside the grid.
void project_equilibrium_clamped(double k, const VelocityGrid& grid, std::span<double> out);

/// sum_j g[j] dv, with compensated summation.
double zeroth_moment(std::span<const double> g, const VelocityGrid& grid);

/// sum_j g[j] (A(edge_{j+1}) - A(edge_j)): exact integral of a(v) against a
/// piecewise-constant g.
double flux_moment(std::span<const double> g, const VelocityGrid& grid, const FluxModel& flux);

/// Per-cell averaged transport speeds (A(edge_{j+1}) - A(edge_j)) / dv.
std::vector<double> cell_speeds(const VelocityGrid& grid, const FluxModel& flux);

/// Neumaier-compensated sum in index order.
double compensated_sum(std::span<const double> values);

} // namespace kinhydro
