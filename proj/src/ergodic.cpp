#include "hamhom/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "marcher.hpp"

namespace hamhom {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string residual_tail(const std::vector<double>& hist) {
    std::string s = "last residuals:";
    const std::size_t n = hist.size();
    for (std::size_t i = n > 3 ? n - 3 : 0; i < n; ++i)
        s += " " + std::to_string(hist[i]);
    return s;
}

// Widens [lo, hi] by the range of -G(x, y, t, 0, 0) over the grid nodes.
void widen_zero_slope(const HamiltonianSpec& spec, const TorusGrid& grid, double t,
                      double& lo, double& hi) {
    const int nx = grid.space_dims();
    const double zeros[2] = {0.0, 0.0};
    const std::span<const double> pzero(zeros, static_cast<std::size_t>(nx));
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const auto idx = grid.unravel(i);
        double x[2] = {0.0, 0.0};
        for (int a = 0; a < nx; ++a) x[a] = grid.coord(a, idx[a]);
        const double y = grid.has_y_axis() ? grid.coord(nx, idx[nx]) : 0.0;
        const double g0 = -spec.eval({x, static_cast<std::size_t>(nx)}, y, t, pzero, 0.0);
        lo = std::min(lo, g0);
        hi = std::max(hi, g0);
    }
}

void add_constant(Field& f, double c) {
    for (double& v : f.values()) v += c;
}

DiscountedField solve_stationary(const HamiltonianSpec& spec, const TorusGrid& grid,
                                 double alpha, const SchemeConfig& cfg) {
    MarcherOptions opt;
    opt.alpha = alpha;
    SpecMarcher marcher(spec, grid, cfg, opt);
    const double dt = 0.95 * marcher.dt_monotone_cap();
    const long block = std::max<long>(50, static_cast<long>(std::ceil(0.5 / dt)));
    const double rho = std::pow(1.0 - dt * alpha, static_cast<double>(block));
    const double tol = cfg.residual_tol * 0.25;

    Field cur(grid, 0.0);
    Field next(grid);
    std::vector<double> res_hist;
    long steps = 0;
    double res = kInf;
    bool converged = false;

    while (steps < cfg.max_steps) {
        const long todo = std::min<long>(block, cfg.max_steps - steps);
        const double mean_before = field_mean(cur);
        for (long k = 0; k + 1 < todo; ++k) {
            marcher.step(0.0, dt, cur, next);
            std::swap(cur, next);
        }
        marcher.step(0.0, dt, cur, next);
        res = sup_abs_diff(cur, next) / dt;
        std::swap(cur, next);
        steps += todo;
        if (!cur.all_finite())
            throw NumericsError("damped solve diverged after " + std::to_string(steps) +
                                " steps");
        res_hist.push_back(res);
        if (res <= tol) {
            converged = true;
            break;
        }
        // Exact geometric extrapolation of the mean level: the constant mode
        // contracts by exactly (1 - dt*alpha) per step, so the block delta
        // determines its limit. Shape modes are untouched.
        if (todo == block && 1.0 - rho > 1e-12) {
            const double delta = field_mean(cur) - mean_before;
            add_constant(cur, delta * rho / (1.0 - rho));
        }
    }
    if (!converged)
        throw NumericsError("damped solve not converged within " +
                            std::to_string(cfg.max_steps) + " steps; " +
                            residual_tail(res_hist));

    DiscountedField out;
    out.alpha = alpha;
    out.estimate = -alpha * field_mean(cur);
    out.residual = res;
    out.steps = steps;
    out.alpha_w_min = alpha * field_min(cur);
    out.alpha_w_max = alpha * field_max(cur);
    out.window_lo = kInf;
    out.window_hi = -kInf;
    widen_zero_slope(spec, grid, 0.0, out.window_lo, out.window_hi);
    out.w = std::move(cur);
    return out;
}

DiscountedField solve_periodic(const HamiltonianSpec& spec, const TorusGrid& grid,
                               double alpha, const SchemeConfig& cfg) {
    MarcherOptions opt;
    opt.alpha = alpha;
    SpecMarcher marcher(spec, grid, cfg, opt);
    const long m = static_cast<long>(std::ceil(1.0 / (0.95 * marcher.dt_monotone_cap())));
    const double dt = 1.0 / static_cast<double>(m);
    const double rho = std::pow(1.0 - dt * alpha, static_cast<double>(m));
    const double tol = cfg.residual_tol * 0.25;
    const long period_cap = static_cast<long>(std::ceil(20.0 / alpha));

    Field cur(grid, 0.0);
    Field next(grid);
    Field phase0(grid);
    std::vector<double> res_hist;
    long steps = 0;
    double res = kInf;
    bool converged = false;

    for (long p = 0; p < period_cap; ++p) {
        if (steps + 2 * m > cfg.max_steps)
            throw NumericsError("period marching exceeds the step budget; " +
                                residual_tail(res_hist));
        phase0 = cur;
        for (long k = 0; k < m; ++k) {
            marcher.step(static_cast<double>(k) * dt, dt, cur, next);
            std::swap(cur, next);
        }
        steps += m;
        if (!cur.all_finite())
            throw NumericsError("damped solve diverged in period " + std::to_string(p + 1));
        res = sup_abs_diff(cur, phase0);
        res_hist.push_back(res);
        if (res <= tol) {
            converged = true;
            break;
        }
        if (1.0 - rho > 1e-12) {
            const double delta = field_mean(cur) - field_mean(phase0);
            add_constant(cur, delta * rho / (1.0 - rho));
        }
    }
    if (!converged)
        throw NumericsError("period map not stationary within " +
                            std::to_string(period_cap) + " periods; " +
                            residual_tail(res_hist));

    // One more period accumulates the estimate and the orbit statistics; the
    // zero-slope window is sampled at exactly the step times the solver visits.
    DiscountedField out;
    out.alpha = alpha;
    out.residual = res;
    out.window_lo = kInf;
    out.window_hi = -kInf;
    out.alpha_w_min = kInf;
    out.alpha_w_max = -kInf;
    double est_acc = 0.0;
    const double inv_n = 1.0 / static_cast<double>(grid.node_count());
    for (long k = 0; k < m; ++k) {
        const double t = static_cast<double>(k) * dt;
        double mn = kInf, mx = -kInf, sum = 0.0;
        for (double v : cur.values()) {
            mn = std::min(mn, v);
            mx = std::max(mx, v);
            sum += v;
        }
        est_acc += -alpha * sum * inv_n;
        out.alpha_w_min = std::min(out.alpha_w_min, alpha * mn);
        out.alpha_w_max = std::max(out.alpha_w_max, alpha * mx);
        widen_zero_slope(spec, grid, t, out.window_lo, out.window_hi);
        marcher.step(t, dt, cur, next);
        std::swap(cur, next);
    }
    steps += m;
    out.estimate = est_acc / static_cast<double>(m);
    out.steps = steps;
    out.w = std::move(cur);
    return out;
}

} // namespace

DiscountedField solve_discounted_detailed(const HamiltonianSpec& spec, const TorusGrid& grid,
                                          double alpha, const SchemeConfig& cfg) {
    if (!(alpha > 0.0)) throw ConfigError("damping must be positive");
    return spec.time_dependent() ? solve_periodic(spec, grid, alpha, cfg)
                                 : solve_stationary(spec, grid, alpha, cfg);
}

Field solve_discounted(const HamiltonianSpec& spec, const TorusGrid& grid, double alpha,
                       const SchemeConfig& cfg) {
    return solve_discounted_detailed(spec, grid, alpha, cfg).w;
}

ErgodicResult ergodic_discount(const HamiltonianSpec& spec, const TorusGrid& grid,
                               std::span<const double> alphas, const SchemeConfig& cfg) {
    std::vector<double> as(alphas.begin(), alphas.end());
    if (as.empty()) as = {0.2, 0.1, 0.05};
    for (std::size_t i = 0; i < as.size(); ++i) {
        if (!(as[i] > 0.0)) throw ConfigError("damping values must be positive");
        if (i > 0 && !(as[i] < as[i - 1]))
            throw ConfigError("damping values must be strictly decreasing");
    }

    ErgodicResult r;
    r.method = ErgodicMethod::discount;
    DiscountedField last;
    for (double a : as) {
        last = solve_discounted_detailed(spec, grid, a, cfg);
        r.history.emplace_back(a, last.estimate);
    }
    if (as.size() == 1) {
        r.lambda = last.estimate;
    } else {
        const auto& [a0, e0] = r.history[r.history.size() - 2];
        const auto& [a1, e1] = r.history.back();
        const double slope = (e0 - e1) / (a0 - a1);
        r.lambda = e1 - slope * a1;
    }
    r.parameter = as.back();
    r.oscillation = oscillation(last.w);
    r.residual = last.residual;
    return r;
}

ErgodicResult ergodic_longtime(const HamiltonianSpec& spec, const TorusGrid& grid, double T,
                               const SchemeConfig& cfg) {
    if (!(T >= 10.0)) throw ConfigError("long-time horizon must be at least 10");
    SpecMarcher marcher(spec, grid, cfg, MarcherOptions{});
    double t_eff = T;
    long nsteps;
    double dt;
    if (marcher.time_dependent()) {
        t_eff = 2.0 * std::ceil(T / 2.0);
        // Even steps per unit period and an even period count: the quarter
        // horizons then land on exact step boundaries.
        const long m =
            2 * static_cast<long>(std::ceil(1.0 / (2.0 * marcher.dt_bound(cfg.cfl))));
        dt = 1.0 / static_cast<double>(m);
        nsteps = m * static_cast<long>(t_eff);
    } else {
        nsteps = 4 * static_cast<long>(std::ceil(T / (4.0 * marcher.dt_bound(cfg.cfl))));
        dt = t_eff / static_cast<double>(nsteps);
    }
    if (nsteps > cfg.max_steps)
        throw NumericsError("long-time horizon needs " + std::to_string(nsteps) +
                            " steps, over the configured budget");

    Field cur(grid, 0.0);
    Field next(grid);
    const long q1 = nsteps / 4, q2 = nsteps / 2, q3 = 3 * (nsteps / 4);
    double m1 = 0.0, m2 = 0.0, m3 = 0.0;
    for (long k = 0; k < nsteps; ++k) {
        marcher.step(static_cast<double>(k) * dt, dt, cur, next);
        std::swap(cur, next);
        const long done = k + 1;
        if (done == q1 || done == q2 || done == q3 || done == nsteps) {
            if (!cur.all_finite())
                throw NumericsError("long-time marching diverged by step " +
                                    std::to_string(done));
            const double mean = field_mean(cur);
            if (done == q1) m1 = mean;
            if (done == q2) m2 = mean;
            if (done == q3) m3 = mean;
        }
    }
    const double m4 = field_mean(cur);
    const double quarter = t_eff / 4.0;
    const double slope_mid = (m2 - m1) / quarter;
    const double slope_final = (m4 - m2) / (2.0 * quarter);
    const double slope_late = (m4 - m3) / quarter;

    ErgodicResult r;
    r.method = ErgodicMethod::longtime;
    r.lambda = -slope_final;
    r.parameter = t_eff;
    r.oscillation = oscillation(cur);
    r.residual = std::fabs(slope_final - slope_late);
    r.history.emplace_back(t_eff / 2.0, -slope_mid);
    r.history.emplace_back(t_eff, -slope_final);
    return r;
}

DiagnosticRecord diagnostics(const HamiltonianSpec& spec, const Field& w_alpha,
                             const AssumptionReport& report) {
    DiagnosticRecord rec;
    rec.osc_full = oscillation(w_alpha);
    rec.K = oscillation_bound_K(report, spec.space_dims);
    const TorusGrid& grid = w_alpha.grid();
    if (!grid.has_y_axis()) {
        rec.osc_xbar = rec.osc_full;
        return rec;
    }
    rec.osc_xbar = oscillation(reduce_max_over_y(w_alpha));

    const double l = spec.l_effective();
    const int ya = grid.y_axis();
    const double hy = grid.spacing(ya);
    const std::size_t sy = grid.stride(ya);
    const int ny = grid.cells(ya);
    double viol = 0.0, var = 0.0;
    for (std::size_t xf = 0; xf < sy; ++xf) {
        double mn = kInf, mx = -kInf;
        for (int j = 0; j < ny; ++j) {
            const double wj = w_alpha[xf + static_cast<std::size_t>(j) * sy];
            const double wn =
                w_alpha[xf + static_cast<std::size_t>(j + 1 == ny ? 0 : j + 1) * sy];
            mn = std::min(mn, wj);
            mx = std::max(mx, wj);
            // l <= 0: y -> w + l*y must be nonincreasing; l > 0: nondecreasing.
            const double d = l <= 0.0 ? (wn - wj) + l * hy : (wj - wn) - l * hy;
            viol = std::max(viol, d);
        }
        var = std::max(var, mx - mn);
    }
    rec.y_monotone_violation = std::max(0.0, viol);
    rec.y_slice_variation = var;
    return rec;
}

std::pair<double, double> zero_slope_window(const HamiltonianSpec& spec, const TorusGrid& grid,
                                            int time_samples) {
    if (time_samples < 1) throw ConfigError("need at least one time sample");
    if (!spec.time_dependent()) time_samples = 1;
    double lo = kInf, hi = -kInf;
    for (int s = 0; s < time_samples; ++s)
        widen_zero_slope(spec, grid, static_cast<double>(s) / time_samples, lo, hi);
    return {lo, hi};
}

} // namespace hamhom
