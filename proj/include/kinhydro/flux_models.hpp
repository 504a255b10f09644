#pragma once

#include <functional>
#include <optional>
#include <string>

namespace kinhydro {

/// Macroscopic flux A together with its exact derivative a = A'.
///
/// Only closed-form models are provided so that a is exact everywhere. The
/// solver itself places no convexity requirement on A; convexity matters only
/// for the exact Riemann oracle and the Godunov reference flux.
class FluxModel {
public:
    enum class Kind { Burgers, Linear, Cubic };

    static FluxModel burgers();
    static FluxModel linear(double c);
    static FluxModel cubic();

    /// Parses `burgers`, `linear:c` or `cubic`.
    static FluxModel parse(const std::string& spec);

    double flux(double u) const;       // A(u)
    double speed(double u) const;      // a(u) = A'(u)
    double speed_slope(double u) const; // a'(u) = A''(u)

    /// Inverse of a on [lo, hi], where a is nondecreasing.
    double inverse_speed(double xi, double lo, double hi) const;

    /// True when A is convex on [lo, hi].
    bool convex_on(double lo, double hi) const;
    /// True when A'' != 0 almost everywhere.
    bool nonlinear() const { return kind_ != Kind::Linear; }

    /// Stationary point of A (a(u*) = 0), if any.
    std::optional<double> sonic_point() const;

    Kind kind() const { return kind_; }
    double linear_speed() const { return c_; }
    const std::string& name() const { return name_; }

private:
    FluxModel(Kind kind, double c, std::string name)
        : kind_(kind), c_(c), name_(std::move(name)) {}

    Kind kind_;
    double c_;
    std::string name_;
};

/// Exact self-similar solution of a convex Riemann problem.
class RiemannSolution {
public:
    enum class Wave { Constant, Shock, Rarefaction };

    double left_state() const { return w_l_; }
    double right_state() const { return w_r_; }
    Wave wave() const { return wave_; }
    /// Shock speed (Shock) or left fan edge a(w_l) (Rarefaction).
    double left_speed() const { return s_lo_; }
    /// Shock speed (Shock) or right fan edge a(w_r) (Rarefaction).
    double right_speed() const { return s_hi_; }

    /// Density as a function of xi = (x - x0)/t.
    double operator()(double xi) const;
    /// Density at (x, t) for a discontinuity initially at x0.
    double at(double x, double t, double x0) const;

private:
    friend RiemannSolution solve_riemann(const FluxModel&, double, double);
    RiemannSolution(FluxModel flux, double w_l, double w_r, Wave wave, double s_lo, double s_hi)
        : flux_(std::move(flux)), w_l_(w_l), w_r_(w_r), wave_(wave), s_lo_(s_lo), s_hi_(s_hi) {}

    FluxModel flux_;
    double w_l_;
    double w_r_;
    Wave wave_;
    double s_lo_;
    double s_hi_;
};

/// Throws NonConvexFlux unless A is convex between the two states.
RiemannSolution solve_riemann(const FluxModel& flux, double w_l, double w_r);

/// Exact Riemann flux at an interface; monotone and consistent.
double godunov_flux(const FluxModel& flux, double w_l, double w_r);

using Profile = std::function<double(double)>;

/// Smooth solution w(x,t) = w0(x - a(w)t), valid before characteristics
/// cross. The root is bracketed in [lo, hi], the range of w0.
double characteristic_solution(const FluxModel& flux, const Profile& w0, double x, double t,
                               double lo, double hi);

/// Linear advection on (0,1) with inflow data: characteristics traced back to
/// t = 0 or to the inflow boundary.
double linear_advection_solution(double c, const Profile& w0, const Profile& w_left,
                                 const Profile& w_right, double x, double t);

} // namespace kinhydro
