#pragma once

#include <span>
#include <string>
#include <vector>

#include "hamhom/ergodic.hpp"
#include "hamhom/grid.hpp"
#include "hamhom/hamiltonian.hpp"
#include "hamhom/scheme.hpp"

namespace hamhom {

// One axis of a slope-space lattice. count == 1 pins the axis to min.
struct PAxis {
    double min = 0.0;
    double max = 0.0;
    int count = 1;

    double spacing() const { return count > 1 ? (max - min) / (count - 1) : 0.0; }
    double coord(int i) const { return count > 1 ? min + i * spacing() : min; }
    void validate() const;
};

// Rectangular lattice in slope space; axis 0 varies fastest in flat order.
struct PGrid {
    std::vector<PAxis> axes;

    std::size_t point_count() const;
    std::vector<double> point(std::size_t flat) const;
    void validate() const;
};

struct PointMeta {
    double discount = 0.0;
    double longtime = 0.0;
    double residual = 0.0;
    bool flagged = false;
};

// Tabulated effective Hamiltonian. warnings carries human-readable bound or
// continuity violations; an empty list is the healthy state.
struct EffectiveTable {
    PGrid p_grid;
    std::vector<double> values;
    std::vector<PointMeta> meta;
    std::string spec_digest;
    std::vector<std::string> warnings;
};

struct EffectiveConfig {
    SchemeConfig scheme;
    std::vector<double> alphas;  // empty uses the solver default {0.2, 0.1, 0.05}
    double longtime_T = 50.0;
    double crosscheck_tol = 0.02;
};

// The slope-averaged cell value at one P, cross-checked by the long-time
// method. flagged means the two estimators disagree beyond crosscheck_tol
// (typically a resolution or horizon problem); both estimates are carried.
struct EffectiveValue {
    double value = 0.0;
    double discount = 0.0;
    double longtime = 0.0;
    double residual = 0.0;
    bool flagged = false;
};

// P lists the x-slopes first, then the y-slope when the spec has a y axis.
EffectiveValue effective_at(const HamiltonianSpec& spec, std::span<const double> P,
                            const TorusGrid& grid, const EffectiveConfig& cfg);

// Independent cell solves over the lattice (parallel over points). Checks the
// pointwise range bounds and the adjacent-jump continuity surrogate, recording
// violations as warnings and cross-check failures as per-point flags.
EffectiveTable tabulate(const HamiltonianSpec& spec, const PGrid& p_grid,
                        const TorusGrid& grid, const EffectiveConfig& cfg);

// Multilinear interpolation, exact at lattice points (queries within 1e-9 of
// a node snap to it). Throws RangeError outside the hull; no extrapolation.
double interpolate(const EffectiveTable& table, std::span<const double> P);

struct HomogeneityReport {
    double max_deviation = 0.0; // relative defect of value(s*P) = s*value(P)
    double value_at_zero = 0.0;
};

// Degree-1 homogeneity probe for lifted front-speed specs (requires the spec
// to carry graph_inner). Empty scales default to {0.5, 2}; empty samples use
// a small slope set around the unit ball.
HomogeneityReport homogeneity_check(const HamiltonianSpec& spec, const TorusGrid& grid,
                                    const EffectiveConfig& cfg,
                                    std::span<const double> scales = {},
                                    std::span<const std::vector<double>> samples = {});

struct StabilityReport {
    std::vector<double> deltas;
    std::vector<double> deviations; // max over samples of |value_pert - value|
    double observed_C = 0.0;        // max deviation / delta
    bool monotone_decay = false;    // deviations decrease along deltas (0.01 slack)
};

// Uniform coefficient perturbations: amplitudes scaled by (1 + delta) for each
// delta (decreasing, e.g. {0.2, 0.1, 0.05}); deviations of the effective value
// at the sample slopes must shrink as delta does.
StabilityReport stability_check(const HamiltonianSpec& spec, const TorusGrid& grid,
                                const EffectiveConfig& cfg, std::span<const double> deltas,
                                std::span<const std::vector<double>> samples = {});

} // namespace hamhom
