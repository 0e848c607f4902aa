#pragma once

#include <span>
#include <string>
#include <vector>

#include "hamhom/effective.hpp"
#include "hamhom/grid.hpp"
#include "hamhom/hamiltonian.hpp"
#include "hamhom/scheme.hpp"

namespace hamhom {

// Slope written as num/den. Linear data with a rational slope becomes periodic
// on a den-fold covering torus, which is what the long-run solver marches on.
struct RationalSlope {
    int num = 0;
    int den = 1;

    double value() const { return static_cast<double>(num) / den; }
    void validate() const; // den in [1, 8]
};

// Fine-vs-homogenized comparison across a shrinking oscillation scale.
struct ConvergenceReport {
    std::vector<double> epsilons;      // strictly decreasing
    std::vector<double> errors;        // sup distance at the final time
    std::vector<double> decay_factors; // errors[i] / errors[i+1]
    std::vector<int> fine_cells;       // per-axis cells used at each epsilon
    int coarse_cells = 0;              // comparison lattice (cells per axis)
    int reference_cells = 0;           // lattice of the homogenized reference
    double horizon = 0.0;
    std::vector<std::string> notes;    // resolution rule, table records

    void validate() const;
};

// Front speed two ways: through the lifted cell problem and from the long-run
// drift of the direct solve. The two should cancel: H_bar_lifted approximates
// the speed, slope_longtime its negative.
struct GraphResult {
    RationalSlope p;
    double H_bar_lifted = 0.0;
    double slope_longtime = 0.0;
    double discrepancy = 0.0; // |H_bar_lifted + slope_longtime|
};

// Settings for a convergence study.
struct StudyConfig {
    EffectiveConfig effective;      // cell-problem settings for the table
    TorusGrid ergodic_grid;         // lattice the cell problems run on
    PGrid p_grid;                   // slope lattice; empty -> derived from U0
    int cells_per_fast_period = 32; // fine-lattice resolution rule
};

// March with coefficients sampled at (x/eps, y/eps, t/eps). 1/eps must be a
// whole number and the grid must resolve the fast scale: at least
// cells_per_fast_period cells per fast period on every axis.
Field solve_fine(const HamiltonianSpec& spec, double epsilon, const Field& U0, double T,
                 const SchemeConfig& cfg, int cells_per_fast_period = 32);

// March under the tabulated effective Hamiltonian. Dissipation comes from the
// table's per-axis difference quotients; slopes leaving the table hull raise
// RangeError naming the offending slope. A constant table advances the data
// by -value*T exactly.
Field solve_homogenized(const EffectiveTable& table, const Field& U0, double T,
                        const SchemeConfig& cfg);

// Fine solves across epsilons against one homogenized reference, compared on
// the coarsest lattice at the final time. Initial data is given as a closed
// form so every lattice samples the same function.
ConvergenceReport convergence_study(const HamiltonianSpec& spec,
                                    std::span<const double> epsilons, const CoeffField& U0,
                                    double T, const StudyConfig& cfg);

// Direct front equation u_t + c(x/eps, t/eps)|Du| + g(u/eps, t/eps) = 0. The
// value coupling g(u/eps) is evaluated from the previous step's field; with
// g identically zero the run reduces bit-for-bit to solve_fine of the
// gradient part alone.
Field solve_graph(const GraphSpec& graph, double epsilon, const Field& u0, double T,
                  const SchemeConfig& cfg, int cells_per_fast_period = 32);

// Front speed through the lifted cell problem at the slope pair (p, -1).
double effective_H(const GraphSpec& graph, double p, const TorusGrid& grid,
                   const EffectiveConfig& cfg);

// Long-run drift of w solving w_t + c(x,t)|p + Dw| + g(p x + w, t) = 0 from
// w0 on the den-fold covering torus: (mean w(T) - mean w(T/2)) / (T/2).
// For time-dependent coefficients pick T divisible by 2 so both windows
// cover whole coefficient periods.
double longtime_slope(const GraphSpec& graph, RationalSlope p, const CoeffField& w0,
                      double T, const SchemeConfig& cfg, int cells_per_unit = 256);

// Runs both routes at slope p and reports the mismatch.
GraphResult graph_consistency(const GraphSpec& graph, RationalSlope p,
                              const TorusGrid& lift_grid, const EffectiveConfig& cfg,
                              double slope_T, const SchemeConfig& slope_cfg,
                              int cells_per_unit = 256);

} // namespace hamhom
