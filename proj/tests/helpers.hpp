#pragma once

#include "kinhydro/diagnostics.hpp"
#include "kinhydro/scenarios.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace testing {

using namespace kinhydro;

inline RunConfig make_config(const std::string& flux, const std::string& initial, std::size_t nx,
                             double v_min, double v_max, std::size_t nv, double t_end,
                             const std::string& left = "match", const std::string& right = "match",
                             const std::string& source = "none")
{
    RunConfig c;
    c.flux = FluxModel::parse(flux);
    c.x_grid = SpatialGrid(nx);
    c.v_grid = VelocityGrid(v_min, v_max, nv);
    c.t_end = t_end;
    ScenarioSpec sp;
    sp.initial = initial;
    sp.left = left;
    sp.right = right;
    sp.source = source;
    apply_scenario(c, build_scenario(sp, c.flux, c.x_grid, c.v_grid));
    return c;
}

inline Scenario make_scenario(const RunConfig& c, const std::string& initial,
                              const std::string& left = "match",
                              const std::string& right = "match",
                              const std::string& source = "none")
{
    ScenarioSpec sp;
    sp.initial = initial;
    sp.left = left;
    sp.right = right;
    sp.source = source;
    return build_scenario(sp, c.flux, c.x_grid, c.v_grid);
}

inline double l1(const std::vector<double>& a, const std::vector<double>& b, double dx)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::abs(a[i] - b[i]);
    }
    return s * dx;
}

inline double ulp_of(double x)
{
    return std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
}

} // namespace testing
