#include "kinhydro/scenarios.hpp"

#include "kinhydro/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace kinhydro {

namespace {

struct Macro {
    Profile w0;
    double lo = 0.0;
    double hi = 0.0;
    // riemann
    std::optional<std::array<double, 3>> riemann;
    // sine mean, amp, k
    std::optional<std::array<double, 3>> sine;
    // manufactured mean, amp
    std::optional<std::array<double, 2>> manufactured;
};

std::pair<std::string, std::string> split_preset(const std::string& preset)
{
    const auto colon = preset.find(':');
    if (colon == std::string::npos) {
        return {preset, ""};
    }
    return {preset.substr(0, colon), preset.substr(colon + 1)};
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell.erase(0, cell.find_first_not_of(" \t\r"));
        cell.erase(cell.find_last_not_of(" \t\r") + 1);
        cells.push_back(cell);
    }
    return cells;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open CSV file '" + path + "'");
    }
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("CSV file '" + path + "' is empty");
    }
    table.header = split_csv_line(line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != table.header.size()) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(table.header.size()) + " columns");
        }
        std::vector<double> row;
        for (const auto& c : cells) {
            try {
                row.push_back(std::stod(c));
            } catch (const std::exception&) {
                throw ConfigError(path + ":" + std::to_string(line_no) + ": bad number '" + c +
                                  "'");
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

InitialData initial_from_csv(const std::string& path, const SpatialGrid& x_grid,
                             const VelocityGrid& v_grid, Macro& macro)
{
    const auto table = read_csv(path);
    InitialData data;
    data.description = "csv:" + path;
    if (table.header == std::vector<std::string>{"x", "value"}) {
        if (table.rows.empty()) {
            throw ConfigError("initial CSV '" + path + "' has no rows");
        }
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : table.rows) {
            pts.emplace_back(r[0], r[1]);
        }
        std::sort(pts.begin(), pts.end());
        double lo = pts.front().second;
        double hi = lo;
        for (const auto& p : pts) {
            lo = std::min(lo, p.second);
            hi = std::max(hi, p.second);
        }
        // nearest sample
        macro.w0 = [pts](double x) {
            auto it = std::lower_bound(pts.begin(), pts.end(), std::make_pair(x, -1e300));
            if (it == pts.end()) {
                return pts.back().second;
            }
            if (it != pts.begin() && x - std::prev(it)->first < it->first - x) {
                --it;
            }
            return it->second;
        };
        macro.lo = lo;
        macro.hi = hi;
        data.macro = macro.w0;
        data.w_lo = lo;
        data.w_hi = hi;
        return data;
    }
    if (table.header != std::vector<std::string>{"x", "v", "value"}) {
        throw ConfigError("initial CSV '" + path + "' must have header x,value or x,v,value");
    }
    KineticField g(x_grid.size(), v_grid.size());
    std::vector<char> seen(x_grid.size() * v_grid.size(), 0);
    double sup = 0.0;
    double v_lo = 0.0;
    double v_hi = 0.0;
    for (const auto& r : table.rows) {
        const double fi = r[0] / x_grid.dx() - 0.5;
        const double fj = (r[1] - v_grid.v_min()) / v_grid.dv() - 0.5;
        const double ri = std::round(fi);
        const double rj = std::round(fj);
        if (std::abs(fi - ri) > 1e-6 || std::abs(fj - rj) > 1e-6 || ri < 0 || rj < 0 ||
            ri >= static_cast<double>(x_grid.size()) || rj >= static_cast<double>(v_grid.size())) {
            throw GridMismatch("initial CSV '" + path + "': point (" + std::to_string(r[0]) + ", " +
                               std::to_string(r[1]) + ") is not a cell centre of the grids");
        }
        const auto i = static_cast<std::size_t>(ri);
        const auto j = static_cast<std::size_t>(rj);
        g(i, j) = r[2];
        seen[i * v_grid.size() + j] = 1;
        if (r[2] != 0.0) {
            sup = std::max(sup, std::abs(r[2]));
            v_lo = std::min(v_lo, v_grid.edge(j));
            v_hi = std::max(v_hi, v_grid.edge(j + 1));
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
        throw GridMismatch("initial CSV '" + path + "' does not cover every grid cell");
    }
    const auto w = density_field(g, v_grid);
    macro.lo = *std::min_element(w.begin(), w.end());
    macro.hi = *std::max_element(w.begin(), w.end());
    data.table = std::move(g);
    data.sup_norm = sup;
    data.v_lo = v_lo;
    data.v_hi = v_hi;
    data.w_lo = macro.lo;
    data.w_hi = macro.hi;
    return data;
}

Macro parse_macro(const std::string& preset)
{
    const auto [name, args] = split_preset(preset);
    Macro m;
    if (name == "constant") {
        const double c = parse_numbers(args, 1, preset)[0];
        m.w0 = [c](double) { return c; };
        m.lo = m.hi = c;
    } else if (name == "riemann") {
        const auto p = parse_numbers(args, 3, preset);
        const double wl = p[0];
        const double wr = p[1];
        const double x0 = p[2];
        m.w0 = [=](double x) { return x < x0 ? wl : wr; };
        m.lo = std::min(wl, wr);
        m.hi = std::max(wl, wr);
        m.riemann = std::array<double, 3>{wl, wr, x0};
    } else if (name == "pulse") {
        const auto p = parse_numbers(args, 4, preset);
        const double base = p[0];
        const double amp = p[1];
        const double center = p[2];
        const double width = p[3];
        if (!(width > 0.0)) {
            throw ConfigError("pulse width must be positive in '" + preset + "'");
        }
        m.w0 = [=](double x) {
            const double s = (x - center) / width;
            if (std::abs(s) >= 1.0) {
                return base;
            }
            const double b = 1.0 - s * s;
            return base + amp * b * b;
        };
        m.lo = std::min(base, base + amp);
        m.hi = std::max(base, base + amp);
    } else if (name == "sine") {
        const auto p = parse_numbers(args, 3, preset);
        const double mean = p[0];
        const double amp = p[1];
        const double k = p[2];
        m.w0 = [=](double x) { return mean + amp * std::sin(2.0 * std::numbers::pi * k * x); };
        m.lo = mean - std::abs(amp);
        m.hi = mean + std::abs(amp);
        m.sine = std::array<double, 3>{mean, amp, k};
    } else if (name == "manufactured") {
        const auto p = parse_numbers(args, 2, preset);
        const double mean = p[0];
        const double amp = p[1];
        if (!(mean > std::abs(amp))) {
            throw ConfigError("manufactured data needs mean > |amp| so the density stays positive");
        }
        m.w0 = [=](double x) { return mean + amp * std::sin(2.0 * std::numbers::pi * x); };
        m.lo = mean - std::abs(amp);
        m.hi = mean + std::abs(amp);
        m.manufactured = std::array<double, 2>{mean, amp};
    } else {
        throw ConfigError("unknown initial preset '" + preset + "'");
    }
    return m;
}

BoundarySide boundary_from_csv(const std::string& path, const VelocityGrid& v_grid)
{
    const auto table = read_csv(path);
    if (table.header != std::vector<std::string>{"t", "v", "value"}) {
        throw ConfigError("boundary CSV '" + path + "' must have header t,v,value");
    }
    // piecewise constant in time, keyed by velocity cell
    std::map<double, std::vector<double>> frames;
    double sup = 0.0;
    double v_lo = 0.0;
    double v_hi = 0.0;
    for (const auto& r : table.rows) {
        const double fj = (r[1] - v_grid.v_min()) / v_grid.dv() - 0.5;
        const double rj = std::round(fj);
        if (std::abs(fj - rj) > 1e-6 || rj < 0 || rj >= static_cast<double>(v_grid.size())) {
            throw GridMismatch("boundary CSV '" + path + "': v = " + std::to_string(r[1]) +
                               " is not a velocity cell centre");
        }
        auto& frame = frames[r[0]];
        frame.resize(v_grid.size(), 0.0);
        const auto j = static_cast<std::size_t>(rj);
        frame[j] = r[2];
        if (r[2] != 0.0) {
            sup = std::max(sup, std::abs(r[2]));
            v_lo = std::min(v_lo, v_grid.edge(j));
            v_hi = std::max(v_hi, v_grid.edge(j + 1));
        }
    }
    if (frames.empty()) {
        throw ConfigError("boundary CSV '" + path + "' has no rows");
    }
    BoundarySide side;
    side.fill = [frames, n = v_grid.size()](double t, const VelocityGrid& grid,
                                            std::span<double> out) {
        if (grid.size() != n) {
            throw GridMismatch("boundary CSV used with a different velocity grid");
        }
        auto it = frames.upper_bound(t);
        if (it != frames.begin()) {
            --it;
        }
        std::copy(it->second.begin(), it->second.end(), out.begin());
    };
    side.sup_norm = sup;
    side.v_lo = v_lo;
    side.v_hi = v_hi;
    side.w_lo = std::numeric_limits<double>::infinity();
    side.w_hi = -side.w_lo;
    for (const auto& [t, frame] : frames) {
        const double w = zeroth_moment(frame, v_grid);
        side.w_lo = std::min(side.w_lo, w);
        side.w_hi = std::max(side.w_hi, w);
    }
    side.description = "csv:" + path;
    return side;
}

} // namespace

std::vector<double> parse_numbers(const std::string& text, std::size_t count,
                                  const std::string& what)
{
    std::vector<double> out;
    for (const auto& cell : split_csv_line(text)) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(cell, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != cell.size() || !std::isfinite(x)) {
            throw ConfigError("cannot parse number '" + cell + "' in '" + what + "'");
        }
        out.push_back(x);
    }
    if (out.size() != count) {
        throw ConfigError("'" + what + "' needs " + std::to_string(count) + " parameters");
    }
    return out;
}

Scenario build_scenario(const ScenarioSpec& spec, const FluxModel& flux, const SpatialGrid& x_grid,
                        const VelocityGrid& v_grid)
{
    Scenario sc;
    Macro macro;
    if (spec.initial.rfind("csv:", 0) == 0) {
        sc.initial = initial_from_csv(spec.initial.substr(4), x_grid, v_grid, macro);
    } else {
        macro = parse_macro(spec.initial);
        sc.initial.macro = macro.w0;
        sc.initial.w_lo = macro.lo;
        sc.initial.w_hi = macro.hi;
        sc.initial.v_lo = std::min(macro.lo, 0.0);
        sc.initial.v_hi = std::max(macro.hi, 0.0);
        sc.initial.description = spec.initial;
    }

    // closed-form interior solution, before boundary effects are known
    std::function<double(double, double)> interior;
    if (macro.manufactured) {
        const auto [mean, amp] = *macro.manufactured;
        interior = [mean, amp](double x, double t) {
            return mean + amp * std::sin(2.0 * std::numbers::pi * x) * std::exp(-t);
        };
    } else if (macro.riemann && flux.kind() != FluxModel::Kind::Linear) {
        const auto [wl, wr, x0] = *macro.riemann;
        if (flux.convex_on(std::min(wl, wr), std::max(wl, wr))) {
            auto rs = solve_riemann(flux, wl, wr);
            interior = [rs, x0](double x, double t) { return rs.at(x, t, x0); };
        }
    } else if (macro.sine && flux.kind() != FluxModel::Kind::Linear) {
        const double lo = macro.lo;
        const double hi = macro.hi;
        interior = [flux, w0 = macro.w0, lo, hi](double x, double t) {
            return characteristic_solution(flux, w0, x, t, lo, hi);
        };
    } else if (spec.initial.rfind("constant:", 0) == 0 && flux.kind() != FluxModel::Kind::Linear) {
        const double c = macro.lo;
        interior = [c](double, double) { return c; };
    } else if (flux.kind() == FluxModel::Kind::Linear && macro.w0 && !spec.initial.starts_with("csv:")) {
        // presets are defined on the whole line
        const double c = flux.linear_speed();
        interior = [c, w0 = macro.w0](double x, double t) { return w0(x - c * t); };
    }

    auto make_side = [&](const std::string& preset, bool left) -> BoundarySide {
        const auto [name, args] = split_preset(preset);
        const double wall = left ? 0.0 : 1.0;
        if (name == "zero") {
            return zero_boundary();
        }
        if (name == "equilibrium") {
            return constant_equilibrium_boundary(parse_numbers(args, 1, preset)[0]);
        }
        if (name == "match") {
            if (!macro.w0) {
                throw ConfigError("boundary 'match' needs macroscopic initial data");
            }
            const double w = macro.w0(left ? 0.0 : 1.0);
            auto side = constant_equilibrium_boundary(w);
            side.description = "match";
            return side;
        }
        if (name == "exact") {
            if (!interior) {
                throw ConfigError("boundary 'exact' needs initial data with a closed-form solution");
            }
            // data range is a bound for the trace of a solution of these presets
            return equilibrium_boundary([interior, wall](double t) { return interior(wall, t); },
                                        macro.lo, macro.hi, "exact");
        }
        if (name == "csv") {
            return boundary_from_csv(args, v_grid);
        }
        throw ConfigError("unknown boundary preset '" + preset + "'");
    };
    sc.boundary.left = make_side(spec.left, true);
    sc.boundary.right = make_side(spec.right, false);

    const VelocityGrid vg = v_grid;
    sc.left_trace = [side = sc.boundary.left, vg](double t) { return boundary_moment(side, t, vg); };
    sc.right_trace = [side = sc.boundary.right, vg](double t) {
        return boundary_moment(side, t, vg);
    };

    if (flux.kind() == FluxModel::Kind::Linear && macro.w0) {
        const double c = flux.linear_speed();
        sc.exact = [c, w0 = macro.w0, l = sc.left_trace, r = sc.right_trace](double x, double t) {
            return linear_advection_solution(c, w0, l, r, x, t);
        };
    } else {
        sc.exact = interior;
    }

    const auto [src_name, src_args] = split_preset(spec.source);
    const double v_abs = std::max(-v_grid.v_min(), v_grid.v_max());
    if (src_name == "none" || src_name.empty()) {
        // no source
    } else if (src_name == "damping") {
        const double r = parse_numbers(src_args, 1, spec.source)[0];
        SourceModel s;
        s.force = [r](double, double, double v) { return -r * v; };
        s.force_dv = [r](double, double, double) { return -r; };
        s.sup_force = std::abs(r) * v_abs;
        s.sup_force_dv = std::abs(r);
        s.name = spec.source;
        sc.source = std::move(s);
    } else if (src_name == "manufactured") {
        if (!macro.manufactured) {
            throw ConfigError("source 'manufactured' needs manufactured initial data");
        }
        const auto [mean, amp] = *macro.manufactured;
        // rate r with S = v r reproducing the manufactured density
        auto rate = [flux, mean, amp](double x, double t) {
            const double k = 2.0 * std::numbers::pi;
            const double e = std::exp(-t);
            const double w = mean + amp * std::sin(k * x) * e;
            const double w_t = -amp * std::sin(k * x) * e;
            const double w_x = amp * k * std::cos(k * x) * e;
            return (w_t + flux.speed(w) * w_x) / w;
        };
        double sup_rate = 0.0;
        for (int a = 0; a <= 400; ++a) {
            for (int b = 0; b <= 40; ++b) {
                sup_rate = std::max(sup_rate, std::abs(rate(a / 400.0, b / 20.0)));
            }
        }
        sup_rate *= 1.01;
        SourceModel s;
        s.force = [rate](double x, double t, double v) { return v == 0.0 ? 0.0 : v * rate(x, t); };
        s.force_dv = [rate](double x, double t, double) { return rate(x, t); };
        s.sup_force = sup_rate * v_abs;
        s.sup_force_dv = sup_rate;
        s.name = "manufactured";
        sc.source = std::move(s);
    } else {
        throw ConfigError("unknown source preset '" + spec.source + "'");
    }

    sc.data_lo = std::min({macro.lo, sc.boundary.left.w_lo, sc.boundary.right.w_lo});
    sc.data_hi = std::max({macro.hi, sc.boundary.left.w_hi, sc.boundary.right.w_hi});
    sc.description = spec.initial + " | " + spec.left + " | " + spec.right + " | " + spec.source;
    return sc;
}

void apply_scenario(RunConfig& config, const Scenario& scenario)
{
    config.initial = scenario.initial;
    config.boundary = scenario.boundary;
    config.source = scenario.source;
}

ReferenceConfig reference_config(const Scenario& scenario, const RunConfig& config)
{
    if (!scenario.initial.macro) {
        throw ConfigError("reference solver needs macroscopic initial data");
    }
    ReferenceConfig r;
    r.grid = config.x_grid;
    r.flux = config.flux;
    r.w0 = scenario.initial.macro;
    r.boundary.w0_trace = scenario.left_trace;
    r.boundary.w1_trace = scenario.right_trace;
    if (scenario.source) {
        const SourceModel src = *scenario.source;
        r.source = [src](double x, double t, double w) { return src.macro(x, t, w); };
    }
    r.t_end = config.t_end;
    r.cfl = config.cfl;
    r.dt_max = config.dt_max;
    // sup |a| over the data range; the solution stays inside it without a
    // source, and the margin covers the manufactured case
    const double lo = scenario.data_lo;
    const double hi = scenario.data_hi;
    double sup = 0.0;
    for (int m = 0; m <= 200; ++m) {
        sup = std::max(sup, std::abs(config.flux.speed(lo + (hi - lo) * m / 200.0)));
    }
    r.speed_bound = std::max(1.1 * sup, 1e-3);
    return r;
}

} // namespace kinhydro
