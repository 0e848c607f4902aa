#include "hamhom/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <utility>

#include "hamhom/corpus.hpp"
#include "hamhom/effective.hpp"
#include "hamhom/ergodic.hpp"
#include "hamhom/errors.hpp"
#include "hamhom/multiscale.hpp"
#include "hamhom/parallel.hpp"
#include "hamhom/reports.hpp"
#include "hamhom/scheme.hpp"

namespace hamhom {
namespace {

constexpr double kHalfPi = 1.5707963267948966;

std::string num(double v) { return format_double(v); }

// Installed once per battery run; criteria read it through the helpers below.
AcceptanceTuning g_tuning;

SchemeConfig tuned_scheme() {
    SchemeConfig scheme;
    scheme.residual_tol *= g_tuning.residual_tol_scale;
    return scheme;
}

std::vector<int> tuned(std::span<const int> cells) {
    std::vector<int> out(cells.begin(), cells.end());
    for (int& c : out) c /= g_tuning.cells_divisor;
    return out;
}

TorusGrid grid_for(const HamiltonianSpec& spec, std::span<const int> cells) {
    return TorusGrid(spec.space_dims, spec.has_y, tuned(cells));
}

EffectiveConfig sweep_config() {
    EffectiveConfig cfg;
    cfg.scheme = tuned_scheme();
    cfg.alphas = {0.2, 0.1, 0.05};
    return cfg;
}

// Tracks the worst margin of a family of <= comparisons and the first breach.
struct Worst {
    double value = 0.0;
    bool ok = true;
    std::string breach;

    void bound(double observed, double allow, const std::string& what) {
        value = std::max(value, observed);
        if (observed > allow && ok) {
            ok = false;
            breach = what + " = " + num(observed) + " exceeds " + num(allow);
        }
    }
};

// ---- effective-eikonal-oracle -------------------------------------------

CriterionResult effective_eikonal_oracle() {
    CriterionResult r;
    r.name = "effective-eikonal-oracle";
    const HamiltonianSpec& spec = corpus_spec("eikonal_sine");
    const int cells[] = {256};
    TorusGrid grid = grid_for(spec, cells);
    PGrid pg;
    pg.axes.push_back(PAxis{-2.0, 2.0, 9});
    EffectiveTable table = tabulate(spec, pg, grid, sweep_config());

    Worst w;
    for (double p : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
        const double P[] = {p};
        double got = interpolate(table, P);
        double want = std::max(1.0, std::fabs(p));
        w.bound(std::fabs(got - want), 0.05, "value error at p = " + num(p));
    }
    r.pass = w.ok && table.warnings.empty();
    r.detail = "max value error " + num(w.value) + " over 7 slopes (allow 0.05), " +
               std::to_string(table.warnings.size()) + " table warnings";
    if (!w.ok) r.detail += "; " + w.breach;
    return r;
}

// ---- graph-harmonic-lift -------------------------------------------------

CriterionResult graph_harmonic_lift() {
    CriterionResult r;
    r.name = "graph-harmonic-lift";
    const GraphSpec& graph = corpus_graph("graph_harmonic");
    const int cells[] = {256, 8};
    TorusGrid lift_grid(graph.space_dims, true, tuned(cells));
    EffectiveConfig cfg = sweep_config();

    Worst w;
    for (double p : {0.5, -0.5, 1.0, -1.0, 2.0, -2.0}) {
        double got = effective_H(graph, p, lift_grid, cfg);
        w.bound(std::fabs(got - std::fabs(p)), 0.05, "front speed error at p = " + num(p));
    }
    r.pass = w.ok;
    r.detail = "max front-speed error " + num(w.value) + " over 6 slopes (allow 0.05)";
    if (!w.ok) r.detail += "; " + w.breach;
    return r;
}

// ---- ergodic-method-agreement --------------------------------------------

struct SpecCase {
    const char* name;
    std::vector<int> cells;
};

const std::vector<SpecCase>& spec_cases() {
    static const std::vector<SpecCase> cases = {
        {"eikonal_sine", {128}},
        {"noncoercive_xyt", {64, 64}},
        {"drift_lneg", {64, 64}},
    };
    return cases;
}

CriterionResult ergodic_method_agreement() {
    CriterionResult r;
    r.name = "ergodic-method-agreement";
    SchemeConfig scheme = tuned_scheme();
    Worst w;
    for (const SpecCase& c : spec_cases()) {
        const HamiltonianSpec& spec = corpus_spec(c.name);
        TorusGrid grid = grid_for(spec, c.cells);
        ErgodicResult rd = ergodic_discount(spec, grid, {}, scheme);
        ErgodicResult rl = ergodic_longtime(spec, grid, 50.0, scheme);
        w.bound(std::fabs(rd.lambda - rl.lambda), 0.02,
                std::string("method gap on ") + c.name);
    }
    r.pass = w.ok;
    r.detail = "max method gap " + num(w.value) + " over 3 specs (allow 0.02)";
    if (!w.ok) r.detail += "; " + w.breach;
    return r;
}

// ---- discounted-structure-suite ------------------------------------------

CriterionResult discounted_structure_suite() {
    CriterionResult r;
    r.name = "discounted-structure-suite";
    SchemeConfig scheme = tuned_scheme();
    const double slack = 10.0 * scheme.residual_tol;
    Worst window, osc, ystruct;
    for (const SpecCase& c : spec_cases()) {
        const HamiltonianSpec& spec = corpus_spec(c.name);
        TorusGrid grid = grid_for(spec, c.cells);
        AssumptionReport rep = estimate_constants(spec);
        double K = oscillation_bound_K(rep, spec.space_dims);
        for (double alpha : {0.2, 0.1, 0.05}) {
            DiscountedField df = solve_discounted_detailed(spec, grid, alpha, scheme);
            std::string tag = std::string(c.name) + " alpha " + num(alpha);
            window.bound(df.window_lo - df.alpha_w_min, slack, "window breach (low) on " + tag);
            window.bound(df.alpha_w_max - df.window_hi, slack, "window breach (high) on " + tag);
            osc.bound(oscillation(df.w) - K, 0.05, "oscillation excess on " + tag);
            if (spec.has_y) {
                DiagnosticRecord d = diagnostics(spec, df.w, rep);
                double l = spec.l_effective();
                if (l == 0.0)
                    ystruct.bound(d.y_slice_variation, slack, "y-variation on " + tag);
                else if (l < 0.0)
                    ystruct.bound(d.y_monotone_violation, slack, "y-monotonicity on " + tag);
            }
        }
    }
    r.pass = window.ok && osc.ok && ystruct.ok;
    r.detail = "window breach " + num(std::max(window.value, 0.0)) + ", oscillation excess " +
               num(osc.value) + " (allow 0.05), y-structure defect " + num(ystruct.value) +
               " (allow " + num(slack) + ")";
    for (const Worst* w : {&window, &osc, &ystruct})
        if (!w->ok) r.detail += "; " + w->breach;
    return r;
}

// ---- homogenization-convergence ------------------------------------------

CriterionResult homogenization_convergence() {
    CriterionResult r;
    r.name = "homogenization-convergence";
    const std::vector<double> eps = {0.25, 0.125, 0.0625};
    Worst w;  // tracked as 1.3 - factor so "worst" is the smallest factor
    double min_factor = std::numeric_limits<double>::infinity();

    {
        StudyConfig study;
        study.effective = sweep_config();
        const int cells[] = {128};
        study.ergodic_grid = TorusGrid(1, false, tuned(cells));
        CoeffField u0;
        u0.modes.push_back(CoeffMode{{1, 0}, 0, 0, 0.3, -kHalfPi});
        ConvergenceReport rep =
            convergence_study(corpus_spec("eikonal_sine"), eps, u0, 0.25, study);
        for (double f : rep.decay_factors) {
            min_factor = std::min(min_factor, f);
            w.bound(1.3 - f, 0.0, "frozen-coefficient decay factor " + num(f));
        }
    }
    {
        StudyConfig study;
        study.effective = sweep_config();
        const int cells[] = {64, 64};
        study.ergodic_grid = TorusGrid(1, true, tuned(cells));
        study.p_grid.axes = {PAxis{-2.2, 2.2, 13}, PAxis{-2.2, 2.2, 13}};
        CoeffField u0;
        u0.modes.push_back(CoeffMode{{1, 0}, 0, 0, 0.3, -kHalfPi});
        u0.modes.push_back(CoeffMode{{0, 0}, 1, 0, 0.3, 0.0});
        ConvergenceReport rep =
            convergence_study(corpus_spec("noncoercive_xyt"), eps, u0, 0.25, study);
        for (double f : rep.decay_factors) {
            min_factor = std::min(min_factor, f);
            w.bound(1.3 - f, 0.0, "mixed-axes decay factor " + num(f));
        }
    }
    r.pass = w.ok;
    r.detail = "min decay factor " + num(min_factor) + " per halving (need 1.3)";
    if (!w.ok) r.detail += "; " + w.breach;
    return r;
}

// ---- graph-pipeline-consistency ------------------------------------------

CriterionResult graph_pipeline_consistency() {
    CriterionResult r;
    r.name = "graph-pipeline-consistency";
    SchemeConfig scheme = tuned_scheme();
    EffectiveConfig cfg = sweep_config();
    const RationalSlope slopes[] = {{0, 1}, {1, 2}, {-1, 2}, {1, 1}, {-1, 1}};
    Worst w;
    for (const char* name : {"graph_smooth", "graph_pinning"}) {
        const GraphSpec& graph = corpus_graph(name);
        const int cells[] = {64, 64};
        TorusGrid lift_grid(graph.space_dims, true, tuned(cells));
        for (RationalSlope s : slopes) {
            GraphResult gr = graph_consistency(graph, s, lift_grid, cfg, 40.0, scheme);
            w.bound(gr.discrepancy, 0.05,
                    std::string("route mismatch on ") + name + " at p = " + num(s.value()));
        }
    }
    r.pass = w.ok;
    r.detail = "max route mismatch " + num(w.value) + " over 10 slope cases (allow 0.05)";
    if (!w.ok) r.detail += "; " + w.breach;
    return r;
}

// ---- scheme-property-suite -------------------------------------------------

Field random_field(const TorusGrid& grid, std::mt19937& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Field f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = dist(rng);
    return f;
}

CriterionResult scheme_property_suite() {
    CriterionResult r;
    r.name = "scheme-property-suite";
    SchemeConfig scheme = tuned_scheme();
    std::string fails;
    auto note = [&fails](const std::string& s) {
        if (!fails.empty()) fails += "; ";
        fails += s;
    };

    // Discrete comparison principle on 50 random ordered pairs (exact).
    int comparison_passes = 0;
    {
        std::mt19937 rng(20260815u);
        struct { const char* name; std::vector<int> cells; } cases[] = {
            {"eikonal_sine", {32}},
            {"noncoercive_xyt", {16, 16}},
        };
        for (const auto& c : cases) {
            const HamiltonianSpec& spec = corpus_spec(c.name);
            TorusGrid grid = grid_for(spec, c.cells);
            for (int k = 0; k < 25; ++k) {
                Field u0 = random_field(grid, rng, -1.0, 1.0);
                Field v0 = u0;
                std::uniform_real_distribution<double> gap(0.0, 1.0);
                for (std::size_t i = 0; i < v0.size(); ++i) v0[i] += gap(rng);
                if (comparison_probe(spec, u0, v0, 0.1, scheme)) ++comparison_passes;
            }
        }
        if (comparison_passes != 50)
            note("order preserved on only " + std::to_string(comparison_passes) + "/50 pairs");
    }

    // Flux consistency: equal one-sided slopes must reproduce the Hamiltonian
    // exactly, dissipation cancelling to zero.
    double flux_defect = 0.0;
    {
        for (const SpecCase& c : spec_cases()) {
            const HamiltonianSpec& spec = corpus_spec(c.name);
            std::vector<int> small(c.cells.size(), 16);
            TorusGrid grid = grid_for(spec, small);
            std::vector<double> theta = derive_dissipation(spec, grid, scheme.gradient_probe_radius);
            const double slope_sets[3][2] = {{0.7, -1.3}, {-0.4, 0.9}, {2.1, 0.0}};
            for (std::size_t node = 0; node < grid.node_count(); node += 7) {
                for (const auto& s : slope_sets) {
                    std::vector<double> slopes(s, s + grid.axes());
                    for (double t : {0.0, 0.3}) {
                        double via_flux = numerical_hamiltonian(spec, grid, node, t, slopes,
                                                                slopes, theta);
                        auto ix = grid.unravel(node);
                        double x[2] = {grid.coord(0, ix[0]), 0.0};
                        double y = 0.0;
                        std::span<const double> px(slopes.data(), spec.space_dims);
                        double py = 0.0;
                        if (spec.has_y) {
                            y = grid.coord(grid.y_axis(), ix[grid.y_axis()]);
                            py = slopes[grid.y_axis()];
                        } else if (spec.space_dims == 2) {
                            x[1] = grid.coord(1, ix[1]);
                        }
                        double direct = spec.eval(std::span<const double>(x, spec.space_dims),
                                                  y, t, px, py);
                        flux_defect = std::max(flux_defect, std::fabs(via_flux - direct));
                    }
                }
            }
        }
        if (flux_defect != 0.0) note("flux consistency defect " + num(flux_defect));
    }

    // Constant source shift moves the cell value by exactly that constant.
    double lambda_shift_defect = 0.0;
    {
        const HamiltonianSpec& spec = corpus_spec("eikonal_sine");
        HamiltonianSpec shifted = spec;
        shifted.sources.push_back(SourceTerm{CoeffField::constant(0.37)});
        const int cells[] = {128};
        TorusGrid grid = grid_for(spec, cells);
        ErgodicResult base = ergodic_discount(spec, grid, {}, scheme);
        ErgodicResult moved = ergodic_discount(shifted, grid, {}, scheme);
        lambda_shift_defect = std::fabs(moved.lambda - (base.lambda - 0.37));
        if (lambda_shift_defect > scheme.residual_tol)
            note("cell-value shift defect " + num(lambda_shift_defect));
    }

    // Effective-value equivariances: additive constants and gradient shifts.
    double equivariance_defect = 0.0;
    {
        EffectiveConfig cfg = sweep_config();
        const HamiltonianSpec& eik = corpus_spec("eikonal_sine");
        const int cells1[] = {128};
        TorusGrid g1 = grid_for(eik, cells1);

        HamiltonianSpec plus = eik;
        plus.sources.push_back(SourceTerm{CoeffField::constant(0.37)});
        for (double p : {0.0, 1.5}) {
            const double P[] = {p};
            double base = effective_at(eik, P, g1, cfg).value;
            double moved = effective_at(plus, P, g1, cfg).value;
            equivariance_defect = std::max(equivariance_defect,
                                           std::fabs(moved - (base - 0.37)));
        }

        const double P1[] = {1.0};
        const double Q[] = {0.6};
        const double P2[] = {0.4};
        double whole = effective_at(eik, P1, g1, cfg).value;
        double split = effective_at(shift(eik, Q, 0.0), P2, g1, cfg).value;
        equivariance_defect = std::max(equivariance_defect, std::fabs(whole - split));

        const HamiltonianSpec& dl = corpus_spec("drift_lneg");
        const int cells2[] = {32, 32};
        TorusGrid g2 = grid_for(dl, cells2);
        const double Pxy[] = {0.5, 0.3};
        const double zero[] = {0.0, 0.0};
        double direct = effective_at(dl, Pxy, g2, cfg).value;
        const double qx[] = {0.5};
        double composed = effective_at(shift(dl, qx, 0.3), zero, g2, cfg).value;
        equivariance_defect = std::max(equivariance_defect, std::fabs(direct - composed));

        if (equivariance_defect > 0.02)
            note("effective-value equivariance defect " + num(equivariance_defect));
    }

    // Degree-1 homogeneity of the lifted front-speed value.
    double homogeneity_defect = 0.0;
    {
        const GraphSpec& graph = corpus_graph("graph_harmonic");
        const int cells[] = {128, 8};
        TorusGrid lift_grid(graph.space_dims, true, tuned(cells));
        HomogeneityReport hr = homogeneity_check(lift(graph), lift_grid, sweep_config());
        homogeneity_defect = std::max(hr.max_deviation, std::fabs(hr.value_at_zero));
        if (homogeneity_defect > 0.02)
            note("homogeneity defect " + num(homogeneity_defect));
    }

    // Range bounds at every tabulated point, rechecked on a fresh table.
    std::size_t bound_warnings = 0;
    {
        const HamiltonianSpec& dl = corpus_spec("drift_lneg");
        const int cells[] = {32, 32};
        TorusGrid grid = grid_for(dl, cells);
        PGrid pg;
        pg.axes = {PAxis{-1.0, 1.0, 5}, PAxis{-0.5, 0.5, 3}};
        EffectiveTable table = tabulate(dl, pg, grid, sweep_config());
        bound_warnings = table.warnings.size();
        if (bound_warnings) note(std::to_string(bound_warnings) + " table warnings");
    }

    r.pass = fails.empty();
    r.detail = std::to_string(comparison_passes) + "/50 ordered pairs, flux defect " +
               num(flux_defect) + ", shift defects " + num(lambda_shift_defect) + "/" +
               num(equivariance_defect) + ", homogeneity defect " + num(homogeneity_defect) +
               ", " + std::to_string(bound_warnings) + " bound warnings";
    if (!fails.empty()) r.detail += "; " + fails;
    return r;
}

// ---- stability-perturbations ----------------------------------------------

CriterionResult stability_perturbations() {
    CriterionResult r;
    r.name = "stability-perturbations";
    const HamiltonianSpec& spec = corpus_spec("eikonal_sine");
    const int cells[] = {128};
    TorusGrid grid = grid_for(spec, cells);
    const double deltas[] = {0.2, 0.1, 0.05};
    StabilityReport rep = stability_check(spec, grid, sweep_config(), deltas);

    Worst w;
    for (std::size_t i = 0; i < rep.deltas.size(); ++i)
        w.bound(std::fabs(rep.deviations[i] - rep.deltas[i]), 0.05,
                "deviation tracking at delta " + num(rep.deltas[i]));
    r.pass = w.ok && rep.monotone_decay;
    r.detail = "max |deviation - delta| " + num(w.value) + " (allow 0.05), decay " +
               (rep.monotone_decay ? "monotone" : "NOT monotone") + ", response ratio " +
               num(rep.observed_C);
    if (!w.ok) r.detail += "; " + w.breach;
    return r;
}

// ---- determinism-bitwise ----------------------------------------------------

std::vector<std::pair<std::string, std::string>> corpus_csv_slice() {
    std::vector<std::pair<std::string, std::string>> files;
    SchemeConfig scheme = tuned_scheme();

    {
        const HamiltonianSpec& spec = corpus_spec("noncoercive_xyt");
        const int cells[] = {32, 32};
        TorusGrid grid = grid_for(spec, cells);
        const double alphas[] = {0.2, 0.1};
        ErgodicResult rs[2] = {
            ergodic_discount(spec, grid, alphas, scheme),
            ergodic_longtime(spec, grid, 10.0, scheme),
        };
        files.emplace_back("ergodic.csv", csv_ergodic(rs));
    }
    {
        const HamiltonianSpec& spec = corpus_spec("eikonal_sine");
        const int cells[] = {128};
        TorusGrid grid = grid_for(spec, cells);
        PGrid pg;
        pg.axes.push_back(PAxis{-1.0, 1.0, 5});
        EffectiveTable table = tabulate(spec, pg, grid, sweep_config());
        files.emplace_back("effective.csv", csv_effective(table));
    }
    {
        const GraphSpec& graph = corpus_graph("graph_pinning");
        const int cells[] = {32, 32};
        TorusGrid lift_grid(graph.space_dims, true, tuned(cells));
        GraphResult gr =
            graph_consistency(graph, {1, 2}, lift_grid, sweep_config(), 8.0, scheme, 64);
        files.emplace_back("graph.csv", csv_graph(std::span<const GraphResult>(&gr, 1)));
    }
    {
        StudyConfig study;
        study.effective = sweep_config();
        const int cells[] = {64};
        study.ergodic_grid = TorusGrid(1, false, tuned(cells));
        CoeffField u0;
        u0.modes.push_back(CoeffMode{{1, 0}, 0, 0, 0.3, -kHalfPi});
        const double eps[] = {0.25, 0.125};
        ConvergenceReport rep =
            convergence_study(corpus_spec("eikonal_sine"), eps, u0, 0.1, study);
        files.emplace_back("homogenize.csv", csv_convergence(rep));
    }
    return files;
}

CriterionResult determinism_bitwise() {
    CriterionResult r;
    r.name = "determinism-bitwise";
    set_thread_count(1);
    auto serial = corpus_csv_slice();
    set_thread_count(4);
    auto threaded = corpus_csv_slice();
    auto rerun = corpus_csv_slice();
    set_thread_count(0);

    std::string mismatch;
    std::size_t bytes = 0;
    for (std::size_t i = 0; i < serial.size(); ++i) {
        bytes += serial[i].second.size();
        if (serial[i].second != threaded[i].second && mismatch.empty())
            mismatch = serial[i].first + " differs between 1 and 4 threads";
        if (threaded[i].second != rerun[i].second && mismatch.empty())
            mismatch = threaded[i].first + " differs between repeat runs";
    }
    r.pass = mismatch.empty();
    r.detail = std::to_string(serial.size()) + " reports, " + std::to_string(bytes) +
               " bytes, bit-identical across reruns and thread counts 1/4";
    if (!mismatch.empty()) r.detail = mismatch;
    return r;
}

struct Entry {
    const char* name;
    CriterionResult (*run)();
    double time_cap;  // seconds; 0 = uncapped
};

} // namespace

void AcceptanceTuning::validate() const {
    if (!(residual_tol_scale > 0.0) || !std::isfinite(residual_tol_scale))
        throw ConfigError("acceptance: residual_tol_scale must be a positive number");
    if (cells_divisor < 1)
        throw ConfigError("acceptance: cells_divisor must be at least 1");
}

std::vector<CriterionResult> run_acceptance(const AcceptanceTuning& tuning) {
    tuning.validate();
    g_tuning = tuning;
    const Entry entries[] = {
        {"effective-eikonal-oracle", effective_eikonal_oracle, 60.0},
        {"graph-harmonic-lift", graph_harmonic_lift, 0.0},
        {"ergodic-method-agreement", ergodic_method_agreement, 300.0},
        {"discounted-structure-suite", discounted_structure_suite, 0.0},
        {"homogenization-convergence", homogenization_convergence, 600.0},
        {"graph-pipeline-consistency", graph_pipeline_consistency, 0.0},
        {"scheme-property-suite", scheme_property_suite, 0.0},
        {"stability-perturbations", stability_perturbations, 0.0},
        {"determinism-bitwise", determinism_bitwise, 0.0},
    };
    std::vector<CriterionResult> results;
    results.reserve(std::size(entries));
    for (const Entry& e : entries) {
        auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = e.run();
        } catch (const std::exception& ex) {
            r.pass = false;
            r.detail = std::string("aborted: ") + ex.what();
        }
        r.name = e.name;
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (e.time_cap > 0.0 && r.seconds > e.time_cap) {
            r.pass = false;
            r.detail += "; runtime over the " + num(e.time_cap) + "s budget";
        }
        results.push_back(std::move(r));
    }
    return results;
}

int report_acceptance(const std::vector<CriterionResult>& results, std::ostream& out) {
    int failures = 0;
    for (const CriterionResult& r : results) {
        out << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "  ["
            << format_double(std::round(r.seconds * 10.0) / 10.0) << "s]\n";
        if (!r.pass) ++failures;
    }
    out << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
        << " (" << results.size() << " total)\n";
    return failures;
}

} // namespace hamhom
