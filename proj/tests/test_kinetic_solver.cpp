#include "helpers.hpp"

#include "kinhydro/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace kinhydro;
using testing::make_config;

namespace {

KineticState equilibrium_state(const std::vector<double>& w, const VelocityGrid& vg)
{
    KineticState s;
    s.g = KineticField(w.size(), vg.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        project_equilibrium_into(w[i], vg, s.g.slice(i));
    }
    return s;
}

} // namespace

TEST_CASE("relaxation closed form")
{
    const VelocityGrid vg(-1.0, 1.0, 20);
    KineticState s;
    s.g = KineticField(3, vg.size());
    // far from equilibrium, w = 0.3 in every cell
    for (std::size_t i = 0; i < 3; ++i) {
        s.g(i, 2) = 0.3 / vg.dv();
    }
    const auto w_before = density_field(s.g, vg);
    auto tiny = s;
    relax_step(tiny, 1e-14, 1.0, vg);
    CHECK(tiny.g(0, 2) == doctest::Approx(s.g(0, 2)));

    relax_step(s, 20.0, 1.0, vg);
    const auto chi = project_equilibrium(0.3, vg);
    for (std::size_t j = 0; j < vg.size(); ++j) {
        const double far = j == 2 ? 0.3 / vg.dv() : 0.0;
        CHECK(std::abs(s.g(1, j) - chi.values[j]) <= std::exp(-20.0) * (std::abs(far) + 1.0));
    }
    const auto w_after = density_field(s.g, vg);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(w_after[i] - w_before[i]) <= 8 * testing::ulp_of(w_before[i]));
    }
}

TEST_CASE("transport at Courant number one is an exact shift")
{
    const VelocityGrid vg(-1.0, 1.0, 4);
    const SpatialGrid xg(10);
    const std::vector<double> speeds(vg.size(), 1.0);
    KineticState s;
    s.g = KineticField(xg.size(), vg.size());
    for (std::size_t i = 0; i < xg.size(); ++i) {
        for (std::size_t j = 0; j < vg.size(); ++j) {
            s.g(i, j) = static_cast<double>(i * 10 + j);
        }
    }
    const auto old = s.g;
    transport_step(s, xg.dx(), BoundaryData{zero_boundary(), zero_boundary()}, xg, vg, speeds);
    for (std::size_t i = 1; i < xg.size(); ++i) {
        for (std::size_t j = 0; j < vg.size(); ++j) {
            CHECK(s.g(i, j) == old(i - 1, j));
        }
    }
    for (std::size_t j = 0; j < vg.size(); ++j) {
        CHECK(s.g(0, j) == 0.0);
    }
}

TEST_CASE("zero-speed rows do not move")
{
    const VelocityGrid vg(-1.0, 1.0, 2);
    const SpatialGrid xg(5);
    const std::vector<double> speeds{0.0, 0.0};
    KineticState s;
    s.g = KineticField(xg.size(), vg.size(), 0.25);
    s.g(2, 1) = 3.0;
    const auto old = s.g;
    transport_step(s, 0.1, BoundaryData{constant_equilibrium_boundary(0.5),
                                        constant_equilibrium_boundary(-0.5)},
                   xg, vg, speeds);
    CHECK(s.g == old);
}

TEST_CASE("transport rejects Courant numbers above one")
{
    const VelocityGrid vg(-1.0, 1.0, 2);
    const SpatialGrid xg(10);
    const std::vector<double> speeds{-1.0, 1.0};
    KineticState s;
    s.g = KineticField(xg.size(), vg.size());
    CHECK_THROWS_AS(transport_step(s, 1.01 * xg.dx(), BoundaryData{zero_boundary(), zero_boundary()},
                                   xg, vg, speeds),
                    CflViolation);
}

TEST_CASE("constant inflow penetrates to depth a t")
{
    // linear flux a = 1, g0 = 1 on incoming velocities, zero interior
    auto c = make_config("linear:1", "constant:0", 100, -1.0, 1.0, 10, 0.4);
    c.boundary.left = kinetic_boundary([](double v, double) { return v > 0.0 ? 1.0 : 0.0; }, 1.0,
                                       0.0, 1.0, "ones");
    c.boundary.right = zero_boundary();
    c.relax = false;
    c.cfl = 0.5;
    const auto run = solve(c);
    const auto& g = run.state.g;
    const std::size_t j = c.v_grid.size() - 1;
    const double depth = 1.0 * c.t_end;
    for (std::size_t i = 0; i < c.x_grid.size(); ++i) {
        const double x = c.x_grid.center(i);
        // upwind smearing is a few cells wide at this Courant number
        if (x < depth - 15 * c.x_grid.dx()) {
            CHECK(g(i, j) > 0.99);
        }
        if (x > depth + 15 * c.x_grid.dx()) {
            CHECK(g(i, j) < 0.01);
        }
    }
    // the half-value point sits within a cell of a t
    std::size_t half = 0;
    while (half < c.x_grid.size() && g(half, j) > 0.5) {
        ++half;
    }
    CHECK(std::abs(c.x_grid.edge(half) - depth) <= c.x_grid.dx());
}

TEST_CASE("force step")
{
    const VelocityGrid vg(-1.0, 1.0, 20);
    const SpatialGrid xg(2);
    SUBCASE("zero force is the identity")
    {
        SourceModel s{[](double, double, double) { return 0.0; },
                      [](double, double, double) { return 0.0; }, 0.0, 0.0, "zero"};
        auto st = equilibrium_state({0.4, -0.3}, vg);
        const auto old = st.g;
        force_step(st, 0.01, s, xg, vg);
        CHECK(st.g == old);
    }
    SUBCASE("constant force shifts a full cell by S dt / dv")
    {
        // S = 0.5 away from the zero edge; the solver pins S = 0 there
        SourceModel s{[](double, double, double) { return 0.5; },
                      [](double, double, double) { return 0.0; }, 0.5, 0.0, "const"};
        KineticState st;
        st.g = KineticField(xg.size(), vg.size());
        const std::size_t j = vg.zero_edge() + 3;
        st.g(0, j) = 1.0;
        const double dt = 0.04;
        const double frac = 0.5 * dt / vg.dv();
        const auto stats = force_step(st, dt, s, xg, vg);
        CHECK(st.g(0, j) == doctest::Approx(1.0 - frac));
        CHECK(st.g(0, j + 1) == doctest::Approx(frac));
        CHECK(zeroth_moment(st.g.slice(0), vg) == doctest::Approx(vg.dv()).epsilon(1e-15));
        CHECK(stats.mass_change == doctest::Approx(0.0).epsilon(1e-17));
    }
    SUBCASE("velocity CFL")
    {
        SourceModel s{[](double, double, double v) { return 10.0 * v; },
                      [](double, double, double) { return 10.0; }, 10.0, 10.0, "big"};
        auto st = equilibrium_state({0.4, 0.2}, vg);
        CHECK_THROWS_AS(force_step(st, 0.05, s, xg, vg), VelocityCflViolation);
    }
    SUBCASE("escape through the top of the grid")
    {
        SourceModel s{[](double, double, double v) { return v > 0 ? 1.0 : 0.0; },
                      [](double, double, double) { return 0.0; }, 1.0, 0.0, "push"};
        auto st = equilibrium_state({0.95, 0.1}, vg);
        CHECK_THROWS_AS(force_step(st, 0.05, s, xg, vg), SupportEscape);
    }
}

namespace {

// First velocity moment rate of a pulse under repeated force steps.
double first_moment_rate(const SourceModel& s, const VelocityGrid& vg, double centre, double dt,
                         int n, double* m0_out, double* m1_out)
{
    const SpatialGrid xg(1);
    KineticState st;
    st.g = KineticField(1, vg.size());
    for (std::size_t j = 0; j < vg.size(); ++j) {
        const double v = vg.center(j) - centre;
        st.g(0, j) = std::exp(-v * v / 0.02);
    }
    auto moment = [&](int p) {
        double m = 0.0;
        for (std::size_t j = 0; j < vg.size(); ++j) {
            m += std::pow(vg.center(j), p) * st.g(0, j) * vg.dv();
        }
        return m;
    };
    *m0_out = moment(0);
    *m1_out = moment(1);
    for (int k = 0; k < n; ++k) {
        force_step(st, dt, s, xg, vg);
        st.time += dt;
    }
    return (moment(1) - *m1_out) / (n * dt);
}

} // namespace

TEST_CASE("force step first-moment balance")
{
    const VelocityGrid vg(-2.0, 2.0, 400);
    const double dt = 0.01;
    const int n = 10;
    double m0 = 0.0;
    double m1 = 0.0;
    SUBCASE("S constant in v on the support: rate is int S g dv")
    {
        const double s0 = 0.3;
        SourceModel s{[=](double, double, double v) { return v > 0.0 ? s0 : 0.0; },
                      [](double, double, double) { return 0.0; }, s0, 0.0, "const"};
        const double rate = first_moment_rate(s, vg, 0.8, dt, n, &m0, &m1);
        CHECK(std::abs(rate - s0 * m0) <= 0.02 * std::abs(s0 * m0) + 2 * (dt + vg.dv()));
    }
    SUBCASE("S linear in v: g is constant along v' = S, so int v g grows at 2 s0")
    {
        // d/dt int v g = int g d(vS)/dv = int S g + int v g dS/dv
        const double s0 = 0.3;
        SourceModel s{[=](double, double, double v) { return s0 * v; },
                      [=](double, double, double) { return s0; }, 0.6, s0, "linear"};
        const double rate = first_moment_rate(s, vg, 0.5, dt, n, &m0, &m1);
        CHECK(std::abs(rate - 2.0 * s0 * m1) <= 0.05 * std::abs(2.0 * s0 * m1) + 2 * (dt + vg.dv()));
    }
}

TEST_CASE("step with dt = 0 is the identity")
{
    auto c = make_config("burgers", "riemann:1,0,0.5", 20, -1.5, 1.5, 30, 0.1);
    KineticState s;
    s.g = initialize(c.initial, c.x_grid, c.v_grid);
    const auto old = s.g;
    step(s, 0.0, c);
    CHECK(s.g == old);
}

TEST_CASE("time-step plan hits t_end and respects the CFL")
{
    auto c = make_config("burgers", "riemann:1,0,0.5", 100, -1.5, 1.5, 30, 0.25);
    const auto p = plan_time_steps(c);
    CHECK(p.dt * static_cast<double>(p.n_steps) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(p.a_inf * p.dt <= c.cfl * c.x_grid.dx() * (1 + 1e-12));
    c.dt_max = 1e-3;
    CHECK(plan_time_steps(c).dt <= 1e-3);
    auto z = make_config("linear:0", "constant:0.5", 10, -1.0, 1.0, 10, 0.2);
    CHECK_THROWS_AS(plan_time_steps(z), ConfigError);
}

TEST_CASE("validation names the violated invariant")
{
    auto c = make_config("burgers", "riemann:1,0,0.5", 20, -1.5, 1.5, 30, 0.1);
    CHECK_NOTHROW(validate(c));
    auto bad = c;
    bad.epsilon = 0.0;
    CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("epsilon"), ConfigError);
    bad = c;
    bad.cfl = 1.2;
    CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("cfl"), ConfigError);
    bad = c;
    bad.boundary.left = constant_equilibrium_boundary(1.8);
    CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("does not cover"), ConfigError);
    bad = c;
    bad.v_grid = VelocityGrid(-0.5, 0.5, 10);
    CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("does not cover"), ConfigError);
}

TEST_CASE("zero data stay zero")
{
    auto c = make_config("burgers", "constant:0", 40, -1.0, 1.0, 20, 0.3, "zero", "zero");
    const auto run = solve(c);
    for (const double x : run.state.g.values()) {
        CHECK(x == 0.0);
    }
}

TEST_CASE("constant equilibrium with matching walls is a fixed point")
{
    auto c = make_config("burgers", "constant:0.6", 50, -1.0, 1.0, 40, 0.3);
    const auto run = solve(c);
    const auto chi = project_equilibrium(0.6, c.v_grid);
    for (std::size_t i = 0; i < c.x_grid.size(); ++i) {
        for (std::size_t j = 0; j < c.v_grid.size(); ++j) {
            CHECK(run.state.g(i, j) == doctest::Approx(chi.values[j]).epsilon(1e-13));
        }
    }
}

TEST_CASE("mass balance closes every step without a source")
{
    auto c = make_config("burgers", "riemann:0.2,0.9,0.4", 80, -1.5, 1.5, 60, 0.3,
                         "equilibrium:0.5", "equilibrium:-0.4");
    const auto run = solve(c);
    const auto& r = run.record;
    for (std::size_t n = 0; n < r.n_steps; ++n) {
        const double lhs = r.mass[n + 1] - r.mass[n];
        const double rhs = r.inflow_mass[n] - r.outflow_mass[n];
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(r.mass[n])));
    }
}

TEST_CASE("huge epsilon with a linear flux is pure transport")
{
    auto c = make_config("linear:1", "pulse:0,1,0.3,0.1", 400, -1.0, 1.0, 20, 0.3, "zero", "zero");
    c.epsilon = 1e12;
    const auto run = solve(c);
    const auto& w = run.record.w.back();
    double err = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double s = (c.x_grid.center(i) - 0.6) / 0.1;
        const double exact = std::abs(s) < 1 ? (1 - s * s) * (1 - s * s) : 0.0;
        err += std::abs(w[i] - exact) * c.x_grid.dx();
    }
    // first-order smearing of a unit-height pulse
    CHECK(err <= 10 * c.x_grid.dx());
    CHECK(err > 0.0);
}

TEST_CASE("Burgers shock at small epsilon sits at x0 + t/2")
{
    auto c = make_config("burgers", "riemann:1,0,0.3", 400, -1.5, 1.5, 60, 0.25);
    c.epsilon = 1e-4;
    const auto run = solve(c);
    const auto sol = solve_riemann(c.flux, 1.0, 0.0);
    double err = 0.0;
    for (std::size_t i = 0; i < c.x_grid.size(); ++i) {
        err += std::abs(run.record.w.back()[i] - sol.at(c.x_grid.center(i), 0.25, 0.3)) *
               c.x_grid.dx();
    }
    CHECK(err <= 3 * (c.x_grid.dx() + c.epsilon));
}

TEST_CASE("non-finite data stop the run")
{
    auto c = make_config("burgers", "constant:0.5", 10, -1.0, 1.0, 10, 0.1);
    c.initial.macro = [](double x) { return x < 0.5 ? 0.5 : std::nan(""); };
    CHECK_THROWS(solve(c));
}

TEST_CASE("Picard iteration converges to the splitting solution")
{
    auto c = make_config("burgers", "riemann:1,0,0.3", 60, -1.5, 1.5, 30, 0.08);
    c.epsilon = 0.05;
    PicardOptions o;
    o.tol = 1e-11;
    const auto p = picard_solve(c, o);
    REQUIRE(p.residuals.size() >= 3);
    for (std::size_t m = 0; m + 1 < p.residuals.size(); ++m) {
        CHECK(p.residuals[m + 1] < p.residuals[m]);
    }
    for (std::size_t m = 2; m < p.ratios.size(); ++m) {
        CHECK(p.ratios[m] < 1.0);
    }
    const auto s = solve(c);
    CHECK(l1_distance(p.record.g_final, s.record.g_final, c.x_grid.dx(), c.v_grid.dv()) < 1e-9);

    SUBCASE("starting at the fixed point moves by at most tol")
    {
        std::vector<std::vector<double>> guess;
        std::vector<StepObserver> obs{[&](const StepView& v) {
            guess.push_back(density_field(v.before, c.v_grid));
        }};
        solve(c, obs);
        PicardOptions o2 = o;
        o2.initial_guess = guess;
        const auto q = picard_solve(c, o2);
        REQUIRE(!q.residuals.empty());
        CHECK(q.residuals.front() <= o.tol);
    }
    SUBCASE("different first iterates reach the same solution")
    {
        PicardOptions o3 = o;
        o3.initial_guess = std::vector<std::vector<double>>(p.record.n_steps,
                                                            std::vector<double>(60, 0.5));
        const auto q = picard_solve(c, o3);
        CHECK(trajectory_distance(p.trajectory, q.trajectory, p.record.dt, c.x_grid.dx(),
                                  c.v_grid.dv()) <= 2 * o.tol);
    }
    SUBCASE("too few iterations")
    {
        PicardOptions o4;
        o4.max_iterations = 2;
        CHECK_THROWS_AS(picard_solve(c, o4), NoConvergence);
    }
}

TEST_CASE("Picard rejects a source")
{
    auto c = make_config("burgers", "manufactured:0.75,0.25", 20, -0.5, 1.5, 32, 0.1, "exact",
                         "exact", "manufactured");
    c.mode = SolveMode::Picard;
    CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("observers see every step in order")
{
    auto c = make_config("burgers", "riemann:1,0,0.5", 20, -1.5, 1.5, 30, 0.1);
    std::vector<std::size_t> seen;
    std::vector<StepObserver> obs{[&](const StepView& v) { seen.push_back(v.step); }};
    const auto r = solve(c, obs);
    REQUIRE(seen.size() == r.record.n_steps);
    for (std::size_t n = 0; n < seen.size(); ++n) {
        CHECK(seen[n] == n);
    }
    CHECK(r.record.times.back() == c.t_end);
    CHECK(r.record.times.front() == 0.0);
}
