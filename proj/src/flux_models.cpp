#include "kinhydro/flux_models.hpp"

#include "kinhydro/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kinhydro {

FluxModel FluxModel::burgers() { return {Kind::Burgers, 0.0, "burgers"}; }

FluxModel FluxModel::linear(double c)
{
    std::ostringstream os;
    os.precision(17);
    os << "linear:" << c;
    return {Kind::Linear, c, os.str()};
}

FluxModel FluxModel::cubic() { return {Kind::Cubic, 0.0, "cubic"}; }

FluxModel FluxModel::parse(const std::string& spec)
{
    if (spec == "burgers") {
        return burgers();
    }
    if (spec == "cubic") {
        return cubic();
    }
    if (spec.rfind("linear:", 0) == 0) {
        const std::string arg = spec.substr(7);
        std::size_t used = 0;
        double c = 0.0;
        try {
            c = std::stod(arg, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != arg.size() || !std::isfinite(c)) {
            throw ConfigError("flux: cannot parse speed in '" + spec + "'");
        }
        return linear(c);
    }
    throw ConfigError("flux: unknown model '" + spec + "' (expected burgers | linear:c | cubic)");
}

double FluxModel::flux(double u) const
{
    switch (kind_) {
    case Kind::Burgers:
        return 0.5 * u * u;
    case Kind::Linear:
        return c_ * u;
    case Kind::Cubic:
        return u * u * u / 3.0;
    }
    return 0.0;
}

double FluxModel::speed(double u) const
{
    switch (kind_) {
    case Kind::Burgers:
        return u;
    case Kind::Linear:
        return c_;
    case Kind::Cubic:
        return u * u;
    }
    return 0.0;
}

double FluxModel::speed_slope(double u) const
{
    switch (kind_) {
    case Kind::Burgers:
        return 1.0;
    case Kind::Linear:
        return 0.0;
    case Kind::Cubic:
        return 2.0 * u;
    }
    return 0.0;
}

double FluxModel::inverse_speed(double xi, double lo, double hi) const
{
    if (kind_ == Kind::Burgers) {
        return std::clamp(xi, lo, hi);
    }
    if (xi <= speed(lo)) {
        return lo;
    }
    if (xi >= speed(hi)) {
        return hi;
    }
    // a is nondecreasing on [lo, hi] by the convexity precondition
    double a = lo;
    double b = hi;
    for (int it = 0; it < 200 && b - a > 0.0; ++it) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) {
            break;
        }
        if (speed(m) < xi) {
            a = m;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

bool FluxModel::convex_on(double lo, double hi) const
{
    switch (kind_) {
    case Kind::Burgers:
    case Kind::Linear:
        return true;
    case Kind::Cubic:
        return std::min(lo, hi) >= 0.0;
    }
    return false;
}

std::optional<double> FluxModel::sonic_point() const
{
    switch (kind_) {
    case Kind::Burgers:
    case Kind::Cubic:
        return 0.0;
    case Kind::Linear:
        return std::nullopt;
    }
    return std::nullopt;
}

double RiemannSolution::operator()(double xi) const
{
    switch (wave_) {
    case Wave::Constant:
        return w_l_;
    case Wave::Shock:
        return xi < s_lo_ ? w_l_ : w_r_;
    case Wave::Rarefaction:
        if (xi <= s_lo_) {
            return w_l_;
        }
        if (xi >= s_hi_) {
            return w_r_;
        }
        return flux_.inverse_speed(xi, w_l_, w_r_);
    }
    return w_l_;
}

double RiemannSolution::at(double x, double t, double x0) const
{
    if (t <= 0.0) {
        return x < x0 ? w_l_ : w_r_;
    }
    return (*this)((x - x0) / t);
}

RiemannSolution solve_riemann(const FluxModel& flux, double w_l, double w_r)
{
    if (!flux.convex_on(std::min(w_l, w_r), std::max(w_l, w_r))) {
        throw NonConvexFlux("solve_riemann: flux '" + flux.name() +
                            "' is not convex between the Riemann states");
    }
    using Wave = RiemannSolution::Wave;
    if (w_l == w_r) {
        return {flux, w_l, w_r, Wave::Constant, 0.0, 0.0};
    }
    const double a_l = flux.speed(w_l);
    const double a_r = flux.speed(w_r);
    if (w_l > w_r || a_l == a_r) {
        // compressive data, or a linearly degenerate contact
        const double s = (flux.flux(w_l) - flux.flux(w_r)) / (w_l - w_r);
        return {flux, w_l, w_r, Wave::Shock, s, s};
    }
    return {flux, w_l, w_r, Wave::Rarefaction, a_l, a_r};
}

double godunov_flux(const FluxModel& flux, double w_l, double w_r)
{
    const double lo = std::min(w_l, w_r);
    const double hi = std::max(w_l, w_r);
    if (!flux.convex_on(lo, hi)) {
        throw NonConvexFlux("godunov_flux: flux '" + flux.name() +
                            "' is not convex between the interface states");
    }
    const double f_l = flux.flux(w_l);
    const double f_r = flux.flux(w_r);
    if (w_l <= w_r) {
        double f = std::min(f_l, f_r);
        if (const auto s = flux.sonic_point(); s && *s > lo && *s < hi) {
            f = std::min(f, flux.flux(*s));
        }
        return f;
    }
    return std::max(f_l, f_r);
}

double characteristic_solution(const FluxModel& flux, const Profile& w0, double x, double t,
                               double lo, double hi)
{
    if (t == 0.0) {
        return w0(x);
    }
    // phi(w) = w - w0(x - a(w) t) is increasing in w before characteristics cross
    auto phi = [&](double w) { return w - w0(x - flux.speed(w) * t); };
    double a = lo;
    double b = hi;
    double fa = phi(a);
    if (fa >= 0.0) {
        return a;
    }
    if (phi(b) <= 0.0) {
        return b;
    }
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) {
            break;
        }
        const double fm = phi(m);
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

double linear_advection_solution(double c, const Profile& w0, const Profile& w_left,
                                 const Profile& w_right, double x, double t)
{
    const double foot = x - c * t;
    if (foot >= 0.0 && foot <= 1.0) {
        return w0(foot);
    }
    if (c > 0.0) {
        return w_left(t - x / c);
    }
    return w_right(t - (x - 1.0) / c);
}

} // namespace kinhydro
