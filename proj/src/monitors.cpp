#include "kinhydro/diagnostics.hpp"

#include "kinhydro/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kinhydro {

namespace {

struct CellRange {
    std::size_t lo = 0;
    std::size_t hi = 0; // exclusive
    bool empty() const { return lo >= hi; }
};

CellRange window_cells(const SpatialGrid& grid, Window window)
{
    CellRange r{grid.size(), 0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.center(i);
        if (x >= window.a && x <= window.b) {
            r.lo = std::min(r.lo, i);
            r.hi = i + 1;
        }
    }
    return r;
}

// sum_j dv sum over pairs (i, i+1) with lo <= i < hi - 1 of |g_{i+1} - g_i|
double kinetic_tv(const KineticField& g, std::size_t lo, std::size_t hi, double dv)
{
    double tv = 0.0;
    for (std::size_t i = lo; i + 1 < hi; ++i) {
        const auto a = g.slice(i);
        const auto b = g.slice(i + 1);
        for (std::size_t j = 0; j < a.size(); ++j) {
            tv += std::abs(b[j] - a[j]);
        }
    }
    return tv * dv;
}

} // namespace

// ---------------------------------------------------------------------------
// Contraction

ContractionLedger contraction_ledger(const RunRecord& a, const RunRecord& b)
{
    if (!(a.x_grid == b.x_grid) || !(a.v_grid == b.v_grid) || a.dt != b.dt ||
        a.n_steps != b.n_steps || a.epsilon != b.epsilon || a.flux_name != b.flux_name) {
        throw GridMismatch("contraction_ledger: runs differ in grids, dt, epsilon or flux");
    }
    const std::size_t nv = a.v_grid.size();
    if (a.traces.dt.size() != a.n_steps || b.traces.dt.size() != b.n_steps) {
        throw GridMismatch("contraction_ledger: both runs must record boundary traces");
    }
    const double dx = a.x_grid.dx();
    const double dv = a.v_grid.dv();

    ContractionLedger led;
    led.volume_now = l1_distance(a.g_final, b.g_final, dx, dv);
    led.volume_initial = l1_distance(a.g_initial, b.g_initial, dx, dv);
    std::vector<double> out_terms;
    std::vector<double> in_terms;
    double exponent = 0.0;
    for (std::size_t n = 0; n < a.n_steps; ++n) {
        const double dt = a.traces.dt[n];
        for (std::size_t j = 0; j < nv; ++j) {
            const double s = a.speeds[j];
            const double w = std::abs(s) * dt * dv;
            const double dl = std::abs(a.traces.left[n * nv + j] - b.traces.left[n * nv + j]);
            const double dr = std::abs(a.traces.right[n * nv + j] - b.traces.right[n * nv + j]);
            if (s > 0.0) {
                in_terms.push_back(w * dl);
                out_terms.push_back(w * dr);
            } else if (s < 0.0) {
                out_terms.push_back(w * dl);
                in_terms.push_back(w * dr);
            }
        }
        if (a.has_source || b.has_source) {
            exponent += dt * std::max(a.source_sup_dv[n], b.source_sup_dv[n]);
        }
    }
    led.outflow_difference = compensated_sum(out_terms);
    led.inflow_difference = compensated_sum(in_terms);
    led.growth_factor = std::exp(exponent);
    if (a.has_source || b.has_source) {
        led.lhs = led.volume_now;
        led.rhs = led.growth_factor * (led.volume_initial + led.inflow_difference);
    } else {
        led.lhs = led.volume_now + led.outflow_difference;
        led.rhs = led.volume_initial + led.inflow_difference;
    }
    const double mass = std::max(a.mass.empty() ? 0.0 : std::abs(a.mass.front()),
                                 b.mass.empty() ? 0.0 : std::abs(b.mass.front()));
    led.scale = std::max({1.0, led.lhs, led.rhs, mass});
    return led;
}

DiagnosticsReport contraction_report(const RunRecord& a, const RunRecord& b)
{
    const auto led = contraction_ledger(a, b);
    DiagnosticsReport rep;
    rep.add("contraction/lhs_minus_rhs", led.lhs - led.rhs, 0.0, 1e-10 * led.scale,
            "l1-contraction");
    rep.add("contraction/lhs", led.lhs, 0.0, 0.0, "l1-contraction", false);
    rep.add("contraction/rhs", led.rhs, 0.0, 0.0, "l1-contraction", false);
    rep.add("contraction/outflow_difference", led.outflow_difference, 0.0, 0.0, "l1-contraction",
            false);
    rep.add("contraction/inflow_difference", led.inflow_difference, 0.0, 0.0, "l1-contraction",
            false);
    rep.add("contraction/growth_factor", led.growth_factor, 0.0, 0.0, "l1-contraction", false);
    return rep;
}

// ---------------------------------------------------------------------------
// BV and time-Lipschitz

double window_bv(std::span<const double> w, const SpatialGrid& grid, Window window)
{
    const auto r = window_cells(grid, window);
    double tv = 0.0;
    for (std::size_t i = r.lo; i + 1 < r.hi; ++i) {
        tv += std::abs(w[i + 1] - w[i]);
    }
    return tv;
}

BvLipschitzMonitor::BvLipschitzMonitor(Window window) : window_(window)
{
    if (!(window.a > 0.0 && window.a < window.b && window.b < 1.0)) {
        throw WindowTouchesBoundary("window must satisfy 0 < a < b < 1");
    }
}

StepObserver BvLipschitzMonitor::observer()
{
    return [this](const StepView& view) { observe(view); };
}

void BvLipschitzMonitor::observe(const StepView& view)
{
    const auto& cfg = view.config;
    const auto& vg = cfg.v_grid;
    const auto& xg = cfg.x_grid;
    const std::size_t nx = xg.size();
    const std::size_t nv = vg.size();
    const double dv = vg.dv();
    const double t_mid = view.t + 0.5 * view.dt;

    std::vector<double> gl(nv);
    std::vector<double> gr(nv);
    cfg.boundary.left.fill(t_mid, vg, gl);
    cfg.boundary.right.fill(t_mid, vg, gr);

    // full kinetic TV of a field with both ghost rows attached
    auto full_tv = [&](const KineticField& g) {
        double tv = kinetic_tv(g, 0, nx, dv);
        double ends = 0.0;
        for (std::size_t j = 0; j < nv; ++j) {
            ends += std::abs(g(0, j) - gl[j]) + std::abs(gr[j] - g(nx - 1, j));
        }
        return tv + ends * dv;
    };

    if (!started_) {
        started_ = true;
        source_ = cfg.source.has_value();
        budget_ = full_tv(view.before);
        scale_ = std::max(1.0, budget_);
    } else {
        double change = 0.0;
        for (std::size_t j = 0; j < nv; ++j) {
            change += std::abs(gl[j] - ghost_left_[j]) + std::abs(gr[j] - ghost_right_[j]);
        }
        budget_ += change * dv;
    }
    ghost_left_ = gl;
    ghost_right_ = gr;

    const auto cells = window_cells(xg, window_);
    const std::size_t lo = cells.lo > 0 ? cells.lo - 1 : 0;
    const std::size_t hi = std::min(nx, cells.hi + 1);
    for (const KineticField* g : {&view.before, &view.after.g}) {
        const auto w = density_field(*g, vg);
        const double bv = window_bv(w, xg, window_);
        max_bv_ = std::max(max_bv_, bv);
        max_excess_ = std::max(max_excess_, bv - budget_);
        max_kinetic_bv_ = std::max(max_kinetic_bv_, kinetic_tv(*g, lo, hi, dv));
        for (std::size_t j = 0; j < nv; ++j) {
            bool nonzero = false;
            for (std::size_t i = 0; i < nx && !nonzero; ++i) {
                nonzero = (*g)(i, j) != 0.0;
            }
            if (nonzero) {
                a_inf_support_ = std::max(a_inf_support_, std::abs(view.speeds[j]));
            }
        }
    }
    if (source_) {
        double col = 0.0;
        for (std::size_t i = 0; i < nx; ++i) {
            double s = 0.0;
            for (const double x : view.after_relax.slice(i)) {
                s += std::abs(x);
            }
            col = std::max(col, s * dv);
        }
        source_correction_ = std::max(source_correction_,
                                      view.source_sup_dv * col * (window_.b - window_.a));
    }
}

double BvLipschitzMonitor::lipschitz_bound() const
{
    return a_inf_support_ * max_kinetic_bv_ + source_correction_;
}

double BvLipschitzMonitor::max_lipschitz_ratio(const RunRecord& record) const
{
    const auto cells = window_cells(record.x_grid, window_);
    const double dx = record.x_grid.dx();
    double ratio = 0.0;
    for (std::size_t s = 0; s < record.w.size(); ++s) {
        for (std::size_t r = s + 1; r < record.w.size(); ++r) {
            const double span = record.times[r] - record.times[s];
            if (span <= 0.0) {
                continue;
            }
            double d = 0.0;
            for (std::size_t i = cells.lo; i < cells.hi; ++i) {
                d += std::abs(record.w[r][i] - record.w[s][i]);
            }
            ratio = std::max(ratio, d * dx / span);
        }
    }
    return ratio;
}

DiagnosticsReport BvLipschitzMonitor::report(const RunRecord& record) const
{
    DiagnosticsReport rep;
    rep.add("bv/window_excess", max_excess_, 0.0, 1e-12 * scale_, "bv-local-bound", !source_);
    rep.add("bv/max_window_bv", max_bv_, 0.0, 0.0, "bv-local-bound", false);
    const double bound = lipschitz_bound();
    rep.add("lipschitz/max_ratio", max_lipschitz_ratio(record), bound,
            1e-12 * std::max(1.0, bound), "time-lipschitz");
    rep.add("lipschitz/a_inf_support", a_inf_support_, 0.0, 0.0, "time-lipschitz", false);
    rep.add("lipschitz/kinetic_bv", max_kinetic_bv_, 0.0, 0.0, "time-lipschitz", false);
    return rep;
}

// ---------------------------------------------------------------------------
// L-infinity, support and propagation speed

SupportSpeedMonitor::SupportSpeedMonitor(double threshold) : threshold_(threshold) {}

StepObserver SupportSpeedMonitor::observer()
{
    return [this](const StepView& view) { observe(view); };
}

void SupportSpeedMonitor::start(const StepView& view)
{
    started_ = true;
    const auto& cfg = view.config;
    const auto& vg = cfg.v_grid;
    const auto& xg = cfg.x_grid;
    linf_budget_ = linf_budget(cfg);

    const auto& in = cfg.initial;
    const auto& l = cfg.boundary.left;
    const auto& r = cfg.boundary.right;
    const double w_inf = std::max({std::abs(in.w_lo), std::abs(in.w_hi), std::abs(l.w_lo),
                                   std::abs(l.w_hi), std::abs(r.w_lo), std::abs(r.w_hi)});
    double lo = std::min({in.v_lo, in.w_lo, 0.0, -w_inf});
    double hi = std::max({in.v_hi, in.w_hi, 0.0, w_inf});
    if (l.sup_norm > 0.0) {
        lo = std::min(lo, l.v_lo);
        hi = std::max(hi, l.v_hi);
    }
    if (r.sup_norm > 0.0) {
        lo = std::min(lo, r.v_lo);
        hi = std::max(hi, r.v_hi);
    }
    v_allowed_lo_ = lo - vg.dv();
    v_allowed_hi_ = hi + vg.dv();

    x_lo_ = std::numeric_limits<double>::infinity();
    x_hi_ = -x_lo_;
    for (std::size_t i = 0; i < xg.size(); ++i) {
        for (const double g : view.before.slice(i)) {
            if (std::abs(g) > threshold_) {
                x_lo_ = std::min(x_lo_, xg.edge(i));
                x_hi_ = std::max(x_hi_, xg.edge(i + 1));
                break;
            }
        }
    }
    if (l.sup_norm > 0.0) {
        x_lo_ = 0.0;
        x_hi_ = std::max(x_hi_, 0.0);
    }
    if (r.sup_norm > 0.0) {
        x_hi_ = 1.0;
        x_lo_ = std::min(x_lo_, 1.0);
    }
    empty_ = !(x_lo_ <= x_hi_);
    double a_inf = 0.0;
    for (const double s : view.speeds) {
        a_inf = std::max(a_inf, std::abs(s));
    }
    // upwind moves information at most one cell per step
    speed_ = std::max(a_inf, xg.dx() / view.dt);
    sup_force_ = cfg.source ? cfg.source->sup_force : 0.0;
    linf_excess_ = -linf_budget_;
    v_excess_ = -1.0;
    x_excess_ = -1.0;
}

void SupportSpeedMonitor::observe(const StepView& view)
{
    if (!started_) {
        start(view);
    }
    const auto& cfg = view.config;
    const auto& vg = cfg.v_grid;
    const auto& xg = cfg.x_grid;
    const auto& g = view.after.g;
    const double t = view.t + view.dt;

    double sup = 0.0;
    std::size_t j_lo = vg.size();
    std::size_t j_hi = 0;
    std::size_t i_lo = xg.size();
    std::size_t i_hi = 0;
    for (std::size_t i = 0; i < xg.size(); ++i) {
        const auto row = g.slice(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double a = std::abs(row[j]);
            sup = std::max(sup, a);
            if (a > threshold_) {
                j_lo = std::min(j_lo, j);
                j_hi = std::max(j_hi, j + 1);
                i_lo = std::min(i_lo, i);
                i_hi = std::max(i_hi, i + 1);
            }
        }
    }
    linf_excess_ = std::max(linf_excess_, sup - linf_budget_);
    if (j_lo >= j_hi) {
        return;
    }
    const double drift =
        sup_force_ > 0.0 ? sup_force_ * t + static_cast<double>(view.step + 1) * vg.dv() : 0.0;
    v_excess_ = std::max({v_excess_, (v_allowed_lo_ - drift) - vg.edge(j_lo),
                          vg.edge(j_hi) - (v_allowed_hi_ + drift)});
    if (empty_) {
        x_excess_ = std::max(x_excess_, 1.0);
        return;
    }
    const double allowed_lo = x_lo_ - speed_ * t - xg.dx();
    const double allowed_hi = x_hi_ + speed_ * t + xg.dx();
    // 1e-12 absorbs rounding in the product speed * t
    x_excess_ = std::max({x_excess_, allowed_lo - xg.edge(i_lo) - 1e-12,
                          xg.edge(i_hi) - allowed_hi - 1e-12});
}

DiagnosticsReport SupportSpeedMonitor::report() const
{
    DiagnosticsReport rep;
    rep.add("linf/max_excess", linf_excess_, 0.0, 0.0, "max-principle");
    rep.add("support/v_excess", v_excess_, 0.0, 0.0, "compact-velocity-support");
    rep.add("speed/x_excess", x_excess_, 0.0, 0.0, "finite-speed");
    return rep;
}

// ---------------------------------------------------------------------------
// Equilibrium distance

std::vector<double> equilibrium_distance(const RunRecord& record, Window window)
{
    const auto& vg = record.v_grid;
    const auto& xg = record.x_grid;
    CellRange cells{0, xg.size()};
    if (window.a > 0.0 || window.b < 1.0) {
        cells = window_cells(xg, window);
    }
    std::vector<double> out;
    std::vector<double> chi(vg.size());
    for (const auto& g : record.g) {
        double d = 0.0;
        for (std::size_t i = cells.lo; i < cells.hi; ++i) {
            const auto row = g.slice(i);
            project_equilibrium_into(zeroth_moment(row, vg), vg, chi);
            for (std::size_t j = 0; j < row.size(); ++j) {
                d += std::abs(row[j] - chi[j]);
            }
        }
        out.push_back(d * xg.dx() * vg.dv());
    }
    return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw LengthMismatch("loglog_slope: need two or more matching points");
    }
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t m = 0; m < x.size(); ++m) {
        sx += std::log(x[m]);
        sy += std::log(y[m]);
    }
    const double n = static_cast<double>(x.size());
    const double mx = sx / n;
    const double my = sy / n;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t m = 0; m < x.size(); ++m) {
        const double dx = std::log(x[m]) - mx;
        num += dx * (std::log(y[m]) - my);
        den += dx * dx;
    }
    return num / den;
}

} // namespace kinhydro
