#pragma once

#include "hamhom/hamiltonian.hpp"

namespace hamhom {

// Deterministic sampling lattice for the assumption checks; no randomness so
// reports are reproducible bit-for-bit.
struct ProbeConfig {
    double p_max = 20.0;      // largest |p_x| probed for the growth minorant
    double fd_step = 1e-4;    // centered difference step for derivative probes
    int cells = 32;           // sample nodes per spatial/y axis
    int time_samples = 16;    // t samples in [0,1) for time-dependent specs
    int radial_samples = 12;  // |p_x| values in [1, p_max]
    int directions = 8;       // p_x directions when space_dims == 2
    double ratio_cap = 1e3;   // admission cap on the sampled derivative ratios
};

struct AssumptionReport {
    double C0 = 0;   // max |G(.,0,0)|
    double C1 = 0;   // half the minimal large-|p_x| slope of the sampled minorant
    double C2 = 0;   // affine minorant offset: G(.,p_x,0) >= C1|p_x| - C2 on samples
    double C3 = 0;   // max |d_y G| / |p_y + l|
    double C4 = 0;   // max |d_t G| / (1 + |p_y| + |G|)
    double C5 = 0;   // max |d_{p_y} G|
    double l = 0;    // common drift offset (including any y-shift)
    double eta = 0;  // min of the coercive coefficient over samples
    double scaling_defect = 0; // max |grad_p H . p - H| for the inner graph data
    bool coercive_ok = false;
    bool lipschitz_ok = false;
    bool graph_scaling_ok = false;
    long samples_used = 0;

    bool admitted() const { return coercive_ok && lipschitz_ok && eta > 0.0; }
};

// Samples the spec over a deterministic (node, time, gradient) lattice and
// estimates the structural constants. The sampled ratio checks are a heuristic
// admission filter, not a proof: a spec is rejected (ConfigError) only when a
// ratio exceeds probe.ratio_cap or the growth minorant fails.
AssumptionReport estimate_constants(const HamiltonianSpec& spec, const ProbeConfig& probe = {});

// (C0 + C2) * (1 + sqrt(n)/(2*C1)) + |l|. Throws ConfigError when C1 <= 0.
double oscillation_bound_K(const AssumptionReport& report, int space_dims);

} // namespace hamhom
