#include "helpers.hpp"

#include "kinhydro/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace kinhydro;

namespace {

ReferenceConfig riemann_config(double wl, double wr, double x0, std::size_t nx, double t_end)
{
    ReferenceConfig c;
    c.grid = SpatialGrid(nx);
    c.flux = FluxModel::burgers();
    c.w0 = [=](double x) { return x < x0 ? wl : wr; };
    c.boundary.w0_trace = [=](double) { return wl; };
    c.boundary.w1_trace = [=](double) { return wr; };
    c.t_end = t_end;
    c.speed_bound = std::max(std::abs(wl), std::abs(wr));
    return c;
}

} // namespace

TEST_CASE("Godunov shock sits within a cell of x0 + t/2")
{
    const auto c = riemann_config(1.0, 0.0, 0.3, 200, 0.4);
    const auto run = run_reference(c);
    const auto& w = run.w.back();
    std::size_t i = 0;
    while (i < w.size() && w[i] > 0.5) {
        ++i;
    }
    CHECK(std::abs(c.grid.edge(i) - (0.3 + 0.5 * 0.4)) <= c.grid.dx());
}

TEST_CASE("Godunov step rejects a Courant number above one")
{
    const SpatialGrid g(10);
    MacroState s{std::vector<double>(10, 1.0), 0.0};
    MacroBoundary b{[](double) { return 1.0; }, [](double) { return 1.0; }};
    CHECK_THROWS_AS(godunov_step(s, 1.1 * g.dx(), g, FluxModel::burgers(), b), CflViolation);
    CHECK_NOTHROW(godunov_step(s, g.dx(), g, FluxModel::burgers(), b));
}

TEST_CASE("constant state with matching ghosts is unchanged")
{
    auto c = riemann_config(0.4, 0.4, 0.5, 50, 0.3);
    const auto run = run_reference(c);
    for (const double x : run.w.back()) {
        CHECK(x == doctest::Approx(0.4).epsilon(1e-15));
    }
}

TEST_CASE("supersonic outflow ignores the right datum")
{
    std::vector<std::vector<double>> finals;
    for (const double ghost : {0.0, 0.5, -0.5}) {
        auto c = riemann_config(0.8, 0.8, 0.5, 40, 0.3);
        c.w0 = [](double x) { return 0.8 + 0.1 * std::sin(6 * x); };
        c.speed_bound = 0.9;
        c.boundary.w1_trace = [=](double) { return ghost; };
        finals.push_back(run_reference(c).w.back());
    }
    CHECK(finals[0] == finals[1]);
    CHECK(finals[0] == finals[2]);
}

TEST_CASE("source split: damping with zero flux decays like exp(-t)")
{
    ReferenceConfig c;
    c.grid = SpatialGrid(8);
    c.flux = FluxModel::linear(0.0);
    c.w0 = [](double) { return 0.7; };
    c.boundary.w0_trace = [](double) { return 0.0; };
    c.boundary.w1_trace = [](double) { return 0.0; };
    c.source = [](double, double, double w) { return -w; };
    c.t_end = 1.0;
    c.speed_bound = 0.0;
    for (const double h : {1e-2, 5e-3}) {
        c.dt_max = h;
        const auto run = run_reference(c);
        // forward Euler on w' = -w: error about t e^{-t} h / 2
        for (const double x : run.w.back()) {
            CHECK(std::abs(x - 0.7 * std::exp(-1.0)) <= 0.7 * h);
        }
    }
}

TEST_CASE("manufactured source solution converges at first order")
{
    std::vector<double> errs;
    for (const std::size_t nx : {100, 200}) {
        auto rc = testing::make_config("burgers", "manufactured:0.75,0.25", nx, -0.5, 1.5, 64, 0.3,
                                       "exact", "exact", "manufactured");
        const auto sc = testing::make_scenario(rc, "manufactured:0.75,0.25", "exact", "exact",
                                               "manufactured");
        auto ref = reference_config(sc, rc);
        ref.output_times = {0.3};
        const auto run = run_reference(ref);
        double e = 0.0;
        for (std::size_t i = 0; i < nx; ++i) {
            e += std::abs(run.w.back()[i] - sc.exact(rc.x_grid.center(i), 0.3)) * rc.x_grid.dx();
        }
        CHECK(e <= 2.0 * rc.x_grid.dx());
        errs.push_back(e);
    }
    CHECK(errs[1] < 0.7 * errs[0]);
}

TEST_CASE("each Godunov step contracts L1 with shared ghosts")
{
    const SpatialGrid g(60);
    MacroBoundary b{[](double) { return 0.3; }, [](double) { return -0.2; }};
    MacroState u{sample_profile([](double x) { return std::sin(7 * x); }, g), 0.0};
    MacroState v{sample_profile([](double x) { return x < 0.4 ? 0.9 : -0.6; }, g), 0.0};
    const double dt = 0.9 * g.dx();
    double prev = testing::l1(u.w, v.w, g.dx());
    for (int n = 0; n < 80; ++n) {
        godunov_step(u, dt, g, FluxModel::burgers(), b);
        godunov_step(v, dt, g, FluxModel::burgers(), b);
        u.time += dt;
        v.time += dt;
        const double now = testing::l1(u.w, v.w, g.dx());
        CHECK(now <= prev + 1e-14);
        prev = now;
    }
}

TEST_CASE("output times are hit exactly")
{
    auto c = riemann_config(1.0, 0.0, 0.3, 50, 0.25);
    c.output_times = {0.0, 0.1, 0.17, 0.25};
    const auto run = run_reference(c);
    REQUIRE(run.times.size() == 4);
    CHECK(run.times == c.output_times);
    CHECK(run.w.size() == 4);
    CHECK(run.w.front() == sample_profile(c.w0, c.grid));
}

TEST_CASE("reference run needs its inputs")
{
    ReferenceConfig c;
    CHECK_THROWS_AS(run_reference(c), ConfigError);
}
