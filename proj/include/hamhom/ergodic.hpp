#pragma once

#include <span>
#include <utility>
#include <vector>

#include "hamhom/assumptions.hpp"
#include "hamhom/grid.hpp"
#include "hamhom/hamiltonian.hpp"
#include "hamhom/scheme.hpp"

namespace hamhom {

enum class ErgodicMethod { discount, longtime };

// One ergodic-constant estimate. history holds (parameter, estimate) pairs:
// per-damping estimates for the discount method, per-horizon slopes for the
// long-time method. For the long-time method residual is the drift between
// the final slope and the late-window slope (a horizon-adequacy diagnostic).
struct ErgodicResult {
    double lambda = 0.0;
    ErgodicMethod method = ErgodicMethod::discount;
    double parameter = 0.0;
    double oscillation = 0.0;
    double residual = 0.0;
    std::vector<std::pair<double, double>> history;
};

// Converged damped solve plus the bracketing data tests care about: the range
// of damping * field over the final orbit, and the zero-slope window
// [min -G(.,0,0), max -G(.,0,0)] sampled at the solver's own nodes and step
// times, which must contain that range.
struct DiscountedField {
    Field w;
    double alpha = 0.0;
    double estimate = 0.0; // mean of -alpha * w (time-averaged when periodic)
    double residual = 0.0;
    long steps = 0;
    double alpha_w_min = 0.0;
    double alpha_w_max = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
};

// Damped fixed-point solve of w_t + G(x,y,t,Dw) + alpha*w = 0. Stationary
// specs iterate damped pseudo-time to a fixed point; time-dependent specs
// march whole unit periods until the period map is stationary in sup norm.
// Either way the loop stops once the residual reaches residual_tol / 4 and
// the achieved residual is reported. Convergence of the mean level is
// accelerated by closed-form damping extrapolation between measured blocks;
// the returned state always comes from plain scheme steps that pass the
// residual criterion. Throws NumericsError (with recent residuals) when the
// step or period budget runs out first.
DiscountedField solve_discounted_detailed(const HamiltonianSpec& spec, const TorusGrid& grid,
                                          double alpha, const SchemeConfig& cfg);

// The field of solve_discounted_detailed; for time-dependent specs this is
// the phase-0 snapshot of the periodic family.
Field solve_discounted(const HamiltonianSpec& spec, const TorusGrid& grid, double alpha,
                       const SchemeConfig& cfg);

// Ergodic constant via vanishing damping: one estimate per damping value
// (positive, decreasing; empty uses {0.2, 0.1, 0.05}), then a linear-in-alpha
// extrapolation of the last two estimates to alpha = 0.
ErgodicResult ergodic_discount(const HamiltonianSpec& spec, const TorusGrid& grid,
                               std::span<const double> alphas, const SchemeConfig& cfg);

// Ergodic constant via the long-time slope of v_t + G(x,y,t,Dv) = 0 from
// v0 = 0: lambda = -(mean v(T) - mean v(T/2)) / (T/2). Requires T >= 10; for
// time-dependent specs T is rounded up to an even integer (reported back in
// parameter) so the half and quarter horizons land on exact period boundaries.
ErgodicResult ergodic_longtime(const HamiltonianSpec& spec, const TorusGrid& grid, double T,
                               const SchemeConfig& cfg);

// Structural diagnostics of a converged damped field.
struct DiagnosticRecord {
    double osc_full = 0.0;          // oscillation of w
    double osc_xbar = 0.0;          // oscillation of the y-reduced field
    double K = 0.0;                 // a-priori oscillation bound from the constants
    double y_monotone_violation = 0.0; // positive part of the drift monotonicity defect
    double y_slice_variation = 0.0;    // max over x of the variation along y
};

DiagnosticRecord diagnostics(const HamiltonianSpec& spec, const Field& w_alpha,
                             const AssumptionReport& report);

// [min, max] of -G(x,y,t,0,0) over grid nodes and time_samples uniform times
// in [0,1) (one sample when the spec is time-independent).
std::pair<double, double> zero_slope_window(const HamiltonianSpec& spec, const TorusGrid& grid,
                                            int time_samples);

} // namespace hamhom
