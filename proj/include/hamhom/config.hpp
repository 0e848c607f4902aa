#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hamhom/assumptions.hpp"
#include "hamhom/effective.hpp"
#include "hamhom/hamiltonian.hpp"
#include "hamhom/multiscale.hpp"
#include "hamhom/scheme.hpp"

namespace hamhom {

// Structural-constant estimation over the probe lattice.
struct VerifyParams {
    ProbeConfig probe;
};

// Cell-problem value by both estimators on the configured grid.
struct ErgodicParams {
    std::vector<double> alphas;  // empty uses the solver default ladder
    double longtime_T = 50.0;
};

// Effective Hamiltonian table over a slope lattice.
struct EffectiveParams {
    PGrid p_grid;
    std::vector<double> alphas;
    double longtime_T = 50.0;
    double crosscheck_tol = 0.02;
};

// Fine-vs-homogenized convergence study over a ladder of scale ratios.
struct HomogenizeParams {
    std::vector<double> epsilons{0.25, 0.125, 0.0625};
    double horizon = 0.25;
    CoeffField initial;          // initial condition sampled on each solve lattice
    PGrid p_grid;                // empty axes: derived from the initial condition's slope bound
    int cells_per_fast_period = 32;
    std::vector<double> alphas;
    double longtime_T = 50.0;
    double crosscheck_tol = 0.02;
};

// Front-speed consistency: lifted effective value against the long-time slope.
struct GraphParams {
    std::vector<RationalSlope> slopes;
    double slope_T = 40.0;
    int cells_per_unit = 256;
    std::vector<double> alphas;
    double longtime_T = 50.0;
    double crosscheck_tol = 0.02;
};

enum class ExperimentKind { verify, ergodic, effective, homogenize, graph };

std::string_view kind_name(ExperimentKind kind);

struct OutputConfig {
    std::string directory = "out";
    bool json = true;
    bool csv = true;
};

using ExperimentParams =
    std::variant<VerifyParams, ErgodicParams, EffectiveParams, HomogenizeParams, GraphParams>;

// A fully resolved run description. `resolved` is the canonical JSON text of
// the configuration after defaults and overrides were applied; reports embed
// it verbatim so any output file identifies the run that produced it.
struct ExperimentConfig {
    std::optional<HamiltonianSpec> spec;
    std::optional<GraphSpec> graph;
    std::vector<int> grid_cells;
    SchemeConfig scheme;
    ExperimentKind kind = ExperimentKind::verify;
    ExperimentParams params;
    OutputConfig output;
    std::string resolved;

    // The spec to march: the inline one, or the lifted front-speed spec.
    HamiltonianSpec hamiltonian() const;

    // Lattice from grid_cells; axis count must match the marched spec.
    TorusGrid make_grid() const;
};

// Parses a configuration document. `overrides` entries take the form
// "dotted.path=value"; the value is parsed as JSON when possible and treated
// as a string otherwise. Unknown keys anywhere are an error, as are values
// outside their documented ranges. Throws ConfigError.
ExperimentConfig parse_config_text(const std::string& text,
                                   std::span<const std::string> overrides = {});

// parse_config_text on the file's contents. Throws ConfigError when the file
// cannot be read.
ExperimentConfig load_config(const std::string& path,
                             std::span<const std::string> overrides = {});

} // namespace hamhom
