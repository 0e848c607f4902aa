#include "hamhom/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "marcher.hpp"

namespace hamhom {
namespace {

// Fills the nodewise term added to the Hamiltonian before each step.
using ExtraFill =
    std::function<void(double t, std::span<const double> u, std::span<double> extra)>;

struct MarchOut {
    Field field;
    double mean_half = 0.0;
    long nsteps = 0;
};

// Shared forward-Euler loop. Every multiscale solve funnels through here so
// that degenerate cases (no value coupling, no oscillation) follow the exact
// same instruction stream as their plain counterparts.
MarchOut march(const HamiltonianSpec& spec, const Field& v0, double T,
               const SchemeConfig& cfg, const MarcherOptions& opt, const ExtraFill& fill,
               bool even_steps) {
    const TorusGrid& grid = v0.grid();
    cfg.validate(grid);
    if (!v0.all_finite()) throw ConfigError("initial data must be finite");

    SpecMarcher marcher(spec, grid, cfg, opt);
    MarchOut out;
    out.field = v0;
    if (!(T > 0.0)) return out;

    const double bound = marcher.dt_bound(cfg.cfl);
    long nsteps = static_cast<long>(std::ceil(T / bound - 1e-12));
    nsteps = std::max<long>(nsteps, 1);
    if (even_steps && nsteps % 2 != 0) ++nsteps;
    if (nsteps > cfg.max_steps)
        throw NumericsError("horizon needs " + std::to_string(nsteps) +
                            " steps, over the configured budget");
    const double dt = T / static_cast<double>(nsteps);

    Field cur = v0;
    Field next(grid);
    std::vector<double> extra;
    if (fill) extra.resize(grid.node_count());

    for (long k = 0; k < nsteps; ++k) {
        const double t = dt * static_cast<double>(k);
        if (fill) fill(t, cur.values(), extra);
        marcher.step(t, dt, cur, next, fill ? extra.data() : nullptr);
        std::swap(cur, next);
        if (!cur.all_finite())
            throw NumericsError("marching diverged at step " + std::to_string(k + 1));
        if (even_steps && k + 1 == nsteps / 2) out.mean_half = field_mean(cur);
    }
    out.field = std::move(cur);
    out.nsteps = nsteps;
    return out;
}

// 1/epsilon rounded to the whole number it must be.
int fast_scale(double epsilon) {
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw ConfigError("epsilon must lie in (0, 1]");
    const double inv = 1.0 / epsilon;
    const int m = static_cast<int>(std::lround(inv));
    if (m < 1 || std::fabs(inv - m) > 1e-9 * inv)
        throw ConfigError("1/epsilon must be a whole number");
    return m;
}

void require_resolved(const TorusGrid& grid, int m, int cells_per_fast_period) {
    if (cells_per_fast_period < 4)
        throw ConfigError("resolution rule needs at least 4 cells per fast period");
    const int need = cells_per_fast_period * m;
    for (int a = 0; a < grid.axes(); ++a)
        if (grid.cells(a) < need)
            throw ConfigError("fine solve at epsilon=1/" + std::to_string(m) +
                              " needs at least " + std::to_string(need) +
                              " cells on axis " + std::to_string(a) + ", grid has " +
                              std::to_string(grid.cells(a)));
}

Field sample(const CoeffField& f, const TorusGrid& grid) {
    Field out(grid);
    const std::size_t n = grid.node_count();
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = grid.unravel(i);
        double x[kMaxAxes] = {0.0, 0.0, 0.0};
        for (int a = 0; a < grid.space_dims(); ++a) x[a] = grid.coord(a, idx[a]);
        const double y =
            grid.has_y_axis() ? grid.coord(grid.y_axis(), idx[grid.y_axis()]) : 0.0;
        out[i] = f.eval({x, static_cast<std::size_t>(grid.space_dims())}, y, 0.0);
    }
    return out;
}

// Sup distance between two fields sampled on the common coarse lattice; both
// grids must refine it axis by axis.
double coarse_sup_diff(const Field& a, const Field& b, const TorusGrid& coarse) {
    const int na = coarse.axes();
    std::size_t ra[kMaxAxes], rb[kMaxAxes];
    for (int ax = 0; ax < na; ++ax) {
        const int ca = a.grid().cells(ax), cb = b.grid().cells(ax), cc = coarse.cells(ax);
        if (ca % cc != 0 || cb % cc != 0)
            throw ConfigError("comparison lattice does not divide the solve lattices");
        ra[ax] = a.grid().stride(ax) * static_cast<std::size_t>(ca / cc);
        rb[ax] = b.grid().stride(ax) * static_cast<std::size_t>(cb / cc);
    }
    double sup = 0.0;
    const std::size_t n = coarse.node_count();
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = coarse.unravel(i);
        std::size_t ia = 0, ib = 0;
        for (int ax = 0; ax < na; ++ax) {
            ia += static_cast<std::size_t>(idx[ax]) * ra[ax];
            ib += static_cast<std::size_t>(idx[ax]) * rb[ax];
        }
        sup = std::max(sup, std::fabs(a[ia] - b[ib]));
    }
    return sup;
}

// Per-axis slope bound of a closed-form field: 2*pi * sum |k_axis * amplitude|.
double axis_slope_bound(const CoeffField& f, int axis, int space_dims) {
    double s = 0.0;
    for (const CoeffMode& m : f.modes)
        s += std::fabs(m.amplitude) *
             std::abs(axis < space_dims ? m.kx[static_cast<std::size_t>(axis)] : m.ky);
    return kTwoPi * s;
}

PGrid derive_p_grid(const CoeffField& U0, int pdim, int space_dims) {
    PGrid pg;
    for (int d = 0; d < pdim; ++d) {
        const double reach = axis_slope_bound(U0, d, space_dims) + 0.5;
        const int half = static_cast<int>(std::ceil(reach / 0.25));
        pg.axes.push_back({-0.25 * half, 0.25 * half, 2 * half + 1});
    }
    return pg;
}

HamiltonianSpec gradient_part(const GraphSpec& graph) {
    HamiltonianSpec spec;
    spec.space_dims = graph.space_dims;
    spec.has_y = false;
    spec.coercive.push_back({graph.c, 1.0});
    spec.validate();
    return spec;
}

} // namespace

void RationalSlope::validate() const {
    if (den < 1 || den > 8)
        throw ConfigError("slope denominator must lie in [1, 8], got " +
                          std::to_string(den));
}

void ConvergenceReport::validate() const {
    if (epsilons.size() != errors.size() || epsilons.empty())
        throw ConfigError("report needs one error per epsilon");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(errors[i] >= 0.0)) throw ConfigError("errors must be nonnegative");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw ConfigError("epsilons must decrease strictly");
    }
    if (decay_factors.size() + 1 != errors.size())
        throw ConfigError("report needs one decay factor per halving");
}

Field solve_fine(const HamiltonianSpec& spec, double epsilon, const Field& U0, double T,
                 const SchemeConfig& cfg, int cells_per_fast_period) {
    const int m = fast_scale(epsilon);
    require_resolved(U0.grid(), m, cells_per_fast_period);
    MarcherOptions opt;
    opt.coord_scale = static_cast<double>(m);
    opt.time_scale = static_cast<double>(m);
    return march(spec, U0, T, cfg, opt, nullptr, false).field;
}

Field solve_homogenized(const EffectiveTable& table, const Field& U0, double T,
                        const SchemeConfig& cfg) {
    const TorusGrid& grid = U0.grid();
    const auto& axes = table.p_grid.axes;
    if (static_cast<int>(axes.size()) != grid.axes())
        throw ConfigError("table has " + std::to_string(axes.size()) +
                          " slope axes, grid has " + std::to_string(grid.axes()));

    // Per-axis difference quotients of the table double as both the Lipschitz
    // estimate for dissipation and the constancy probe.
    std::vector<double> dissipation(axes.size(), 0.0);
    std::size_t stride = 1;
    for (std::size_t d = 0; d < axes.size(); ++d) {
        double lip = 0.0;
        if (axes[d].count > 1) {
            const double inv_h = 1.0 / axes[d].spacing();
            for (std::size_t i = 0; i < table.values.size(); ++i) {
                const std::size_t along =
                    (i / stride) % static_cast<std::size_t>(axes[d].count);
                if (along + 1 == static_cast<std::size_t>(axes[d].count)) continue;
                lip = std::max(lip,
                               std::fabs(table.values[i + stride] - table.values[i]) * inv_h);
            }
        }
        dissipation[d] = 1.1 * lip;
        stride *= static_cast<std::size_t>(axes[d].count);
    }

    if (*std::max_element(dissipation.begin(), dissipation.end()) == 0.0) {
        // Constant table: the march is an exact downward shift.
        Field out = U0;
        for (double& v : out.values()) v -= table.values.front() * T;
        return out;
    }

    return evolve_generic(
        grid,
        [&table](std::span<const double>, double, std::span<const double> p) {
            return interpolate(table, p);
        },
        U0, 0.0, T, dissipation, cfg.cfl, cfg.max_steps);
}

ConvergenceReport convergence_study(const HamiltonianSpec& spec,
                                    std::span<const double> epsilons, const CoeffField& U0,
                                    double T, const StudyConfig& cfg) {
    if (epsilons.empty()) throw ConfigError("study needs at least one epsilon");
    std::vector<int> scales;
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw ConfigError("epsilons must decrease strictly");
        scales.push_back(fast_scale(epsilons[i]));
    }
    for (int m : scales)
        if (m % scales.front() != 0)
            throw ConfigError("every epsilon must refine the coarsest one");

    const int pdim = spec.space_dims + (spec.has_y ? 1 : 0);
    PGrid pg = cfg.p_grid;
    if (pg.axes.empty()) pg = derive_p_grid(U0, pdim, spec.space_dims);

    ConvergenceReport rep;
    rep.horizon = T;

    const EffectiveTable table = tabulate(spec, pg, cfg.ergodic_grid, cfg.effective);
    for (const std::string& w : table.warnings) rep.notes.push_back("table: " + w);

    auto make_grid = [&](int cells) {
        std::vector<int> c(static_cast<std::size_t>(pdim), cells);
        return TorusGrid(spec.space_dims, spec.has_y, c, {});
    };

    const int cells_ref = cfg.cells_per_fast_period * scales.back();
    const TorusGrid ref_grid = make_grid(cells_ref);
    const Field reference =
        solve_homogenized(table, sample(U0, ref_grid), T, cfg.effective.scheme);
    rep.reference_cells = cells_ref;

    rep.coarse_cells = cfg.cells_per_fast_period * scales.front();
    const TorusGrid coarse = make_grid(rep.coarse_cells);

    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        const int cells = cfg.cells_per_fast_period * scales[i];
        const TorusGrid grid = make_grid(cells);
        const Field fine = solve_fine(spec, epsilons[i], sample(U0, grid), T,
                                      cfg.effective.scheme, cfg.cells_per_fast_period);
        rep.epsilons.push_back(epsilons[i]);
        rep.errors.push_back(coarse_sup_diff(fine, reference, coarse));
        rep.fine_cells.push_back(cells);
        rep.notes.push_back("epsilon=1/" + std::to_string(scales[i]) + ": " +
                            std::to_string(cells) + " cells per axis (rule: >= " +
                            std::to_string(cfg.cells_per_fast_period) +
                            " per fast period)");
    }
    for (std::size_t i = 0; i + 1 < rep.errors.size(); ++i)
        rep.decay_factors.push_back(
            rep.errors[i + 1] > 0.0
                ? rep.errors[i] / rep.errors[i + 1]
                : std::numeric_limits<double>::infinity());
    rep.validate();
    return rep;
}

Field solve_graph(const GraphSpec& graph, double epsilon, const Field& u0, double T,
                  const SchemeConfig& cfg, int cells_per_fast_period) {
    graph.validate();
    const int m = fast_scale(epsilon);
    require_resolved(u0.grid(), m, cells_per_fast_period);

    const HamiltonianSpec spec = gradient_part(graph);
    MarcherOptions opt;
    opt.coord_scale = static_cast<double>(m);
    opt.time_scale = static_cast<double>(m);

    ExtraFill fill;
    bool g_zero = graph.g.mean == 0.0;
    for (const CoeffMode& mode : graph.g.modes)
        if (mode.amplitude != 0.0) g_zero = false;
    if (!g_zero) {
        opt.lip_u = graph.g.dy_bound() * static_cast<double>(m);
        const double inv_eps = static_cast<double>(m);
        const CoeffField g = graph.g;
        fill = [g, inv_eps](double t, std::span<const double> u, std::span<double> extra) {
            for (std::size_t i = 0; i < u.size(); ++i)
                extra[i] = g.eval({}, u[i] * inv_eps, t * inv_eps);
        };
    }
    return march(spec, u0, T, cfg, opt, fill, false).field;
}

double effective_H(const GraphSpec& graph, double p, const TorusGrid& grid,
                   const EffectiveConfig& cfg) {
    const double P[2] = {p, -1.0};
    return effective_at(lift(graph), P, grid, cfg).value;
}

double longtime_slope(const GraphSpec& graph, RationalSlope p, const CoeffField& w0,
                      double T, const SchemeConfig& cfg, int cells_per_unit) {
    graph.validate();
    p.validate();
    if (graph.space_dims != 1)
        throw ConfigError("long-run slope marches a one-dimensional front");
    if (!(T >= 4.0)) throw ConfigError("long-run slope needs a horizon of at least 4");
    if (cells_per_unit < 16) throw ConfigError("long-run slope needs >= 16 cells per unit");

    const int cells[1] = {p.den * cells_per_unit};
    const double period[1] = {static_cast<double>(p.den)};
    const TorusGrid grid(1, false, cells, period);

    const double pval = p.value();
    HamiltonianSpec spec = gradient_part(graph);
    const double shift[1] = {pval};
    spec = hamhom::shift(spec, shift, 0.0);

    MarcherOptions opt;
    opt.lip_u = graph.g.dy_bound();

    // The linear part p*x is folded into the value coupling; it is exactly
    // den-periodic on this torus because p*den is a whole number.
    std::vector<double> px(grid.node_count());
    for (std::size_t i = 0; i < px.size(); ++i)
        px[i] = pval * grid.coord(0, static_cast<int>(i));
    const CoeffField g = graph.g;
    ExtraFill fill = [g, px = std::move(px)](double t, std::span<const double> u,
                                             std::span<double> extra) {
        for (std::size_t i = 0; i < u.size(); ++i)
            extra[i] = g.eval({}, px[i] + u[i], t);
    };

    const MarchOut run = march(spec, sample(w0, grid), T, cfg, opt, fill, true);
    return (field_mean(run.field) - run.mean_half) / (0.5 * T);
}

GraphResult graph_consistency(const GraphSpec& graph, RationalSlope p,
                              const TorusGrid& lift_grid, const EffectiveConfig& cfg,
                              double slope_T, const SchemeConfig& slope_cfg,
                              int cells_per_unit) {
    GraphResult r;
    r.p = p;
    r.H_bar_lifted = effective_H(graph, p.value(), lift_grid, cfg);
    r.slope_longtime = longtime_slope(graph, p, CoeffField{}, slope_T, slope_cfg, cells_per_unit);
    r.discrepancy = std::fabs(r.H_bar_lifted + r.slope_longtime);
    return r;
}

} // namespace hamhom
