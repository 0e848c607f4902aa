#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hamhom/errors.hpp"
#include "hamhom/grid.hpp"
#include "hamhom/hamiltonian.hpp"

namespace hamhom {

// Settings for the explicit monotone marching scheme.
struct SchemeConfig {
    double cfl = 0.5;
    // Numerical dissipation per grid axis. Empty means derive from the
    // Hamiltonian's coefficient bounds over slopes |p| <= gradient_probe_radius
    // with a 10% margin. When supplied it must cover every axis with positive
    // entries; it is the caller's promise of a slope-derivative bound.
    std::vector<double> dissipation_per_axis;
    double gradient_probe_radius = 20.0;
    double residual_tol = 1e-6;
    long max_steps = 50'000'000;

    void validate(const TorusGrid& grid) const;
};

// Dissipation bound per axis: theta_x from the coercive term's slope
// derivative at the probe radius, theta_y from the summed drift magnitudes.
// A zero drift bound yields theta_y = 0, which degenerates the y-coupling
// exactly (the update then matches the drift-free scheme bit for bit).
std::vector<double> derive_dissipation(const HamiltonianSpec& spec, const TorusGrid& grid,
                                       double probe_radius);

// Monotone flux: G(node, t, averaged slopes) minus the per-axis dissipation
// penalty theta * (right - left) / 2. Equal one-sided slopes recover G exactly.
double numerical_hamiltonian(const HamiltonianSpec& spec, const TorusGrid& grid,
                             std::size_t node, double t,
                             std::span<const double> left_slopes,
                             std::span<const double> right_slopes,
                             std::span<const double> dissipation);

using SampleFn = std::function<void(double t, const Field& v)>;

// Forward-Euler marching of v_t + G(x, y, t, Dv) = 0 from t0 over a horizon T.
// sample_times must be increasing within (0, T]; on_sample fires at the first
// step boundary reaching each. Throws NumericsError naming the step if the
// field leaves the finite range (a CFL or dissipation misconfiguration).
Field evolve(const HamiltonianSpec& spec, const Field& v0, double t0, double T,
             const SchemeConfig& cfg, std::span<const double> sample_times = {},
             const SampleFn& on_sample = {});

// Marches u0 and v0 with identical steps; true iff u0 <= v0 nodewise implies
// the order persists at every step up to the horizon.
bool comparison_probe(const HamiltonianSpec& spec, const Field& u0, const Field& v0,
                      double T, const SchemeConfig& cfg);

// Direct-evaluation marching for a callable Hamiltonian ham(x, t, p) where x
// and p span every grid axis. Used for solves under tabulated or closed-form
// Hamiltonians where no coefficient structure exists to exploit. Dissipation
// entries may be zero on axes the Hamiltonian provably ignores.
template <class F>
Field evolve_generic(const TorusGrid& grid, F&& ham, const Field& v0, double t0, double T,
                     std::span<const double> dissipation, double cfl, long max_steps) {
    const int na = grid.axes();
    if (static_cast<int>(dissipation.size()) != na)
        throw ConfigError("generic marching needs one dissipation entry per axis");
    double dt_cfl = std::numeric_limits<double>::infinity();
    double denom = 0.0;
    for (int a = 0; a < na; ++a) {
        if (!(dissipation[a] >= 0)) throw ConfigError("dissipation must be nonnegative");
        if (dissipation[a] > 0)
            dt_cfl = std::min(dt_cfl, cfl * grid.spacing(a) / dissipation[a]);
        denom += dissipation[a] / grid.spacing(a);
    }
    if (!(denom > 0.0)) throw ConfigError("generic marching needs some dissipation");
    const double dt_bound = std::min(dt_cfl, 1.0 / denom);
    if (!(T > 0)) return v0;
    const long nsteps = static_cast<long>(std::ceil(T / dt_bound - 1e-12));
    if (nsteps > max_steps) throw NumericsError("generic marching exceeds the step budget");
    const double dt = T / static_cast<double>(nsteps);

    Field cur = v0;
    Field next(grid);
    const std::size_t n = grid.node_count();
    for (long k = 0; k < nsteps; ++k) {
        const double t = t0 + dt * static_cast<double>(k);
        const auto vin = cur.values();
        const auto vout = next.values();
        for (std::size_t i = 0; i < n; ++i) {
            const auto idx = grid.unravel(i);
            double x[kMaxAxes], p[kMaxAxes];
            double dd = 0.0;
            const double vc = vin[i];
            for (int a = 0; a < na; ++a) {
                x[a] = grid.coord(a, idx[a]);
                const std::size_t s = grid.stride(a);
                const std::size_t im = i + (idx[a] == 0 ? (grid.cells(a) - 1) * s : 0) - (idx[a] == 0 ? 0 : s);
                const std::size_t ip = idx[a] + 1 == grid.cells(a) ? i - idx[a] * s : i + s;
                const double inv_h = 1.0 / grid.spacing(a);
                const double dm = (vc - vin[im]) * inv_h;
                const double dp = (vin[ip] - vc) * inv_h;
                p[a] = (dm + dp) * 0.5;
                dd += dissipation[a] * 0.5 * (dp - dm);
            }
            const double g = ham(std::span<const double>(x, static_cast<std::size_t>(na)), t,
                                 std::span<const double>(p, static_cast<std::size_t>(na)));
            vout[i] = vc - dt * (g - dd);
        }
        std::swap(cur, next);
        if (!cur.all_finite())
            throw NumericsError("generic marching diverged at step " + std::to_string(k + 1));
    }
    return cur;
}

} // namespace hamhom
