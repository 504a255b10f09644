#include "kinhydro/diagnostics.hpp"

#include "kinhydro/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace kinhydro {

namespace {

double bump(double s)
{
    if (std::abs(s) >= 1.0) {
        return 0.0;
    }
    const double b = 1.0 - s * s;
    return b * b;
}

double bump_slope(double s)
{
    if (std::abs(s) >= 1.0) {
        return 0.0;
    }
    return -4.0 * s * (1.0 - s * s);
}

double sign(double x)
{
    return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
}

std::vector<double> trapezoid_weights(const std::vector<double>& t)
{
    std::vector<double> w(t.size(), 0.0);
    for (std::size_t s = 0; s + 1 < t.size(); ++s) {
        const double h = t[s + 1] - t[s];
        w[s] += 0.5 * h;
        w[s + 1] += 0.5 * h;
    }
    return w;
}

// int_a^b max(a(v), 0) dv, composite Simpson
double simpson_positive_part(const FluxModel& flux, double a, double b)
{
    const int n = 2000;
    const double h = (b - a) / n;
    auto f = [&](double v) { return std::max(flux.speed(v), 0.0); };
    double s = f(a) + f(b);
    for (int m = 1; m < n; ++m) {
        s += (m % 2 == 1 ? 4.0 : 2.0) * f(a + m * h);
    }
    return s * h / 3.0;
}

} // namespace

TestFunction::TestFunction(Placement placement, double x_center, double x_radius, double t_center,
                           double t_radius)
    : placement_(placement), xc_(x_center), xr_(x_radius), tc_(t_center), tr_(t_radius)
{
    if (!(x_radius > 0.0) || !(t_radius > 0.0)) {
        throw ConfigError("test function radii must be positive");
    }
    char buf[64];
    switch (placement) {
    case Placement::Interior:
        std::snprintf(buf, sizeof buf, "interior@%.2f", x_center);
        break;
    case Placement::TouchLeft:
        std::snprintf(buf, sizeof buf, "left");
        break;
    case Placement::TouchRight:
        std::snprintf(buf, sizeof buf, "right");
        break;
    }
    name_ = buf;
}

double TestFunction::operator()(double x, double t) const
{
    return bump((x - xc_) / xr_) * bump((t - tc_) / tr_);
}

double TestFunction::d_dt(double x, double t) const
{
    return bump((x - xc_) / xr_) * bump_slope((t - tc_) / tr_) / tr_;
}

double TestFunction::d_dx(double x, double t) const
{
    return bump_slope((x - xc_) / xr_) / xr_ * bump((t - tc_) / tr_);
}

double TestFunction::gradient_l1() const
{
    // int b = 16/15, int |b'| = 2 over (-1, 1); half of each on one side
    const double frac = placement_ == Placement::Interior ? 1.0 : 0.5;
    const double x_mass = frac * 16.0 / 15.0 * xr_;
    const double x_var = frac * 2.0;
    const double t_mass = 16.0 / 15.0 * tr_;
    const double t_var = 2.0;
    return x_mass * t_var + x_var * t_mass;
}

std::vector<TestFunction> standard_test_functions(double t_end)
{
    using P = TestFunction::Placement;
    const double tc = 0.5 * t_end;
    const double tr = 0.45 * t_end;
    return {
        TestFunction(P::Interior, 0.3, 0.15, tc, tr),
        TestFunction(P::Interior, 0.5, 0.2, tc, tr),
        TestFunction(P::Interior, 0.7, 0.15, tc, tr),
        TestFunction(P::TouchLeft, 0.0, 0.3, tc, tr),
        TestFunction(P::TouchRight, 1.0, 0.3, tc, tr),
    };
}

std::vector<double> kruzhkov_constants(double lo, double hi, const VelocityGrid& grid)
{
    const double span = std::max(hi - lo, 0.1);
    const double a = lo - 0.1 * span;
    const double b = hi + 0.1 * span;
    std::vector<double> ks;
    for (int m = 0; m <= 20; ++m) {
        ks.push_back(a + (b - a) * m / 20.0);
    }
    ks.push_back(grid.v_min() - 0.5);
    ks.push_back(grid.v_max() + 0.5);
    return ks;
}

double quadrature_tolerance(double c, double dx, double dv, double dt, const TestFunction& psi,
                            double scale)
{
    return c * (dx + dv + dt) * psi.gradient_l1() * scale;
}

double KineticEntropyTerms::scale() const
{
    return std::max(1.0, std::abs(time) + std::abs(flux) + std::abs(inflow) + std::abs(outflow) +
                             std::abs(source));
}

KineticEntropyMonitor::KineticEntropyMonitor(std::vector<double> ks,
                                             std::vector<TestFunction> psis)
    : ks_(std::move(ks)), psis_(std::move(psis)), terms_(ks_.size() * psis_.size())
{
}

StepObserver KineticEntropyMonitor::observer()
{
    return [this](const StepView& view) { observe(view); };
}

const KineticEntropyTerms& KineticEntropyMonitor::terms(std::size_t k_index,
                                                        std::size_t psi_index) const
{
    return terms_.at(k_index * psis_.size() + psi_index);
}

void KineticEntropyMonitor::observe(const StepView& view)
{
    const auto& cfg = view.config;
    const auto& vg = cfg.v_grid;
    const auto& xg = cfg.x_grid;
    const std::size_t nx = xg.size();
    const std::size_t nv = vg.size();
    const double dx = xg.dx();
    const double dv = vg.dv();
    const double dt = view.dt;
    const double t0 = view.t;
    const double t1 = view.t + dt;
    const double cell = dx * dv;

    std::vector<double> nu(nv);
    for (std::size_t j = 0; j < nv; ++j) {
        nu[j] = view.speeds[j] * dt / dx;
    }

    // dS/dv on cells, after relaxation
    std::vector<double> dsdv;
    if (cfg.source) {
        dsdv.assign(nx * nv, 0.0);
        const double t_mid = t0 + 0.5 * dt;
        std::vector<double> edge(nv + 1);
        for (std::size_t i = 0; i < nx; ++i) {
            for (std::size_t e = 0; e <= nv; ++e) {
                edge[e] = e == vg.zero_edge() ? 0.0
                                              : cfg.source->force(xg.center(i), t_mid, vg.edge(e));
            }
            for (std::size_t j = 0; j < nv; ++j) {
                dsdv[i * nv + j] = (edge[j + 1] - edge[j]) / dv;
            }
        }
    }

    std::vector<std::vector<double>> psi0(psis_.size(), std::vector<double>(nx));
    std::vector<std::vector<double>> psi1(psis_.size(), std::vector<double>(nx));
    std::vector<std::vector<double>> psim(psis_.size(), std::vector<double>(nx));
    for (std::size_t p = 0; p < psis_.size(); ++p) {
        for (std::size_t i = 0; i < nx; ++i) {
            psi0[p][i] = psis_[p](xg.center(i), t0);
            psi1[p][i] = psis_[p](xg.center(i), t1);
            psim[p][i] = psis_[p](xg.center(i), t0 + 0.5 * dt);
        }
    }

    std::vector<double> chi(nv);
    std::vector<double> h_before(nx);
    std::vector<double> pos(nx);
    std::vector<double> neg(nx);
    std::vector<double> src(nx);
    for (std::size_t kk = 0; kk < ks_.size(); ++kk) {
        project_equilibrium_clamped(ks_[kk], vg, chi);
        double in_left = 0.0;
        double in_right = 0.0;
        for (std::size_t j = 0; j < nv; ++j) {
            if (nu[j] > 0.0) {
                in_left += nu[j] * std::abs(view.trace.left[j] - chi[j]);
            } else if (nu[j] < 0.0) {
                in_right += -nu[j] * std::abs(view.trace.right[j] - chi[j]);
            }
        }
        for (std::size_t i = 0; i < nx; ++i) {
            const auto b = view.before.slice(i);
            const auto f = view.after_force.slice(i);
            double hb = 0.0;
            double p = 0.0;
            double m = 0.0;
            for (std::size_t j = 0; j < nv; ++j) {
                hb += std::abs(b[j] - chi[j]);
                const double hf = std::abs(f[j] - chi[j]);
                if (nu[j] > 0.0) {
                    p += nu[j] * hf;
                } else if (nu[j] < 0.0) {
                    m -= nu[j] * hf;
                }
            }
            h_before[i] = hb;
            pos[i] = p;
            neg[i] = m;
            if (cfg.source) {
                const auto r = view.after_relax.slice(i);
                double s = 0.0;
                for (std::size_t j = 0; j < nv; ++j) {
                    s += r[j] * dsdv[i * nv + j] * sign(r[j] - chi[j]);
                }
                src[i] = s;
            }
        }
        for (std::size_t p = 0; p < psis_.size(); ++p) {
            const auto& a = psi0[p];
            const auto& c = psi1[p];
            double time = 0.0;
            double flux = 0.0;
            for (std::size_t i = 0; i < nx; ++i) {
                time -= (c[i] - a[i]) * h_before[i];
            }
            for (std::size_t i = 0; i + 1 < nx; ++i) {
                const double dpsi = c[i + 1] - c[i];
                flux += -dpsi * pos[i] + dpsi * neg[i + 1];
            }
            auto& t = terms_[kk * psis_.size() + p];
            t.time += time * cell;
            t.flux += flux * cell;
            t.inflow -= (c[0] * in_left + c[nx - 1] * in_right) * cell;
            t.outflow += (c[nx - 1] * pos[nx - 1] + c[0] * neg[0]) * cell;
            if (cfg.source) {
                double s = 0.0;
                for (std::size_t i = 0; i < nx; ++i) {
                    s += psim[p][i] * src[i];
                }
                t.source += dt * s * cell;
            }
        }
    }
}

DiagnosticsReport KineticEntropyMonitor::report(const RunRecord& record, double c_tol,
                                                bool source_present) const
{
    DiagnosticsReport rep;
    const auto& vg = record.v_grid;
    const double scale = std::max(1.0, record.linf_budget);
    char name[128];
    for (std::size_t kk = 0; kk < ks_.size(); ++kk) {
        const bool sentinel = ks_[kk] < vg.v_min() || ks_[kk] > vg.v_max();
        for (std::size_t p = 0; p < psis_.size(); ++p) {
            const auto& t = terms(kk, p);
            std::snprintf(name, sizeof name, "kinetic_entropy/k%02zu(%+.4f)/%s", kk, ks_[kk],
                          psis_[p].name().c_str());
            if (sentinel && !source_present) {
                rep.add(name, std::abs(t.full()), 0.0, 1e-10 * t.scale(),
                        "kinetic-entropy-telescoping");
            } else {
                const double tol = quadrature_tolerance(c_tol, record.x_grid.dx(), vg.dv(),
                                                        record.dt, psis_[p], scale);
                rep.add(name, t.full(), 0.0, tol, "kinetic-entropy-inequality", !source_present);
            }
        }
    }
    return rep;
}

KineticEntropyTerms kinetic_entropy_residual(const RunConfig& config, double k,
                                             const TestFunction& psi)
{
    KineticEntropyMonitor monitor({k}, {psi});
    const std::vector<StepObserver> obs{monitor.observer()};
    solve(config, obs);
    return monitor.terms(0, 0);
}

double incoming_flux_part(double u, double normal, const FluxModel& flux)
{
    // composite Simpson on [0, u]; the integrand has at most one kink
    const int n = 2000;
    const double h = u / n;
    auto f = [&](double v) { return std::min(flux.speed(v) * normal, 0.0); };
    double s = f(0.0) + f(u);
    for (int m = 1; m < n; ++m) {
        s += (m % 2 == 1 ? 4.0 : 2.0) * f(m * h);
    }
    return s * h / 3.0;
}

double MacroEntropyTerms::scale() const
{
    return std::max(1.0, std::abs(interior) + std::abs(gamma1) + std::abs(gamma0) +
                             std::abs(source));
}

MacroEntropyTerms macro_entropy_residual(const MacroEntropyInput& in, double k,
                                         const TestFunction& psi)
{
    const std::size_t ns = in.times.size();
    if (in.w.size() != ns) {
        throw LengthMismatch("macro_entropy_residual: times and fields differ in length");
    }
    const auto& xg = in.x_grid;
    const auto& vg = in.v_grid;
    const double dx = xg.dx();
    const auto weights = trapezoid_weights(in.times);
    const auto speeds = cell_speeds(vg, in.flux);
    const double a_k = in.flux.flux(k);
    const double inc_k = incoming_flux_part(k, 1.0, in.flux);
    // chi_k beyond the velocity grid, where the data vanish: |g0 - chi_k| = 1
    double tail = 0.0;
    if (k > vg.v_max()) {
        tail = simpson_positive_part(in.flux, vg.v_max(), k);
    } else if (k < vg.v_min()) {
        tail = simpson_positive_part(in.flux, k, vg.v_min());
    }

    MacroEntropyTerms out;
    std::vector<double> chi_k(vg.size());
    project_equilibrium_clamped(k, vg, chi_k);
    std::vector<double> g0(vg.size());
    for (std::size_t s = 0; s < ns; ++s) {
        const double t = in.times[s];
        const auto& w = in.w[s];
        if (w.size() != xg.size()) {
            throw LengthMismatch("macro_entropy_residual: field does not match the grid");
        }
        double interior = 0.0;
        double src = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double x = xg.center(i);
            const double sg = sign(w[i] - k);
            interior += std::abs(w[i] - k) * psi.d_dt(x, t) +
                        sg * (in.flux.flux(w[i]) - a_k) * psi.d_dx(x, t);
            if (in.source) {
                src += psi(x, t) * in.source(x, t, w[i]) * sg;
            }
        }
        out.interior -= weights[s] * interior * dx;
        out.source += weights[s] * src * dx;

        const double psi1 = psi(1.0, t);
        if (psi1 != 0.0) {
            const double w1 = in.w1(t);
            out.gamma1 += weights[s] * psi1 * sign(w1 - k) *
                          (incoming_flux_part(w1, 1.0, in.flux) - inc_k);
        }
        const double psi0 = psi(0.0, t);
        if (psi0 != 0.0) {
            in.g0.fill(t, vg, g0);
            double g = 0.0;
            for (std::size_t j = 0; j < vg.size(); ++j) {
                if (speeds[j] > 0.0) {
                    g -= speeds[j] * std::abs(g0[j] - chi_k[j]);
                }
            }
            out.gamma0 += weights[s] * psi0 * (g * vg.dv() - tail);
        }
    }
    return out;
}

DiagnosticsReport macro_entropy_report(const MacroEntropyInput& in, const std::vector<double>& ks,
                                       const std::vector<TestFunction>& psis, double c_tol)
{
    double dt = 0.0;
    for (std::size_t s = 0; s + 1 < in.times.size(); ++s) {
        dt = std::max(dt, in.times[s + 1] - in.times[s]);
    }
    const bool source_present = static_cast<bool>(in.source);
    DiagnosticsReport rep;
    char name[128];
    for (std::size_t kk = 0; kk < ks.size(); ++kk) {
        for (const auto& psi : psis) {
            const auto t = macro_entropy_residual(in, ks[kk], psi);
            std::snprintf(name, sizeof name, "macro_entropy/k%02zu(%+.4f)/%s", kk, ks[kk],
                          psi.name().c_str());
            const double tol =
                quadrature_tolerance(c_tol, in.x_grid.dx(), in.v_grid.dv(), dt, psi, t.scale());
            rep.add(name, t.residual(), 0.0, tol, "macro-entropy-inequality", !source_present);
        }
    }
    return rep;
}

} // namespace kinhydro
