#include "hamhom/runner.hpp"

#include <cmath>
#include <filesystem>
#include <utility>

#include "hamhom/effective.hpp"
#include "hamhom/ergodic.hpp"
#include "hamhom/errors.hpp"
#include "hamhom/multiscale.hpp"
#include "hamhom/reports.hpp"

namespace hamhom {
namespace {

namespace fs = std::filesystem;

// Writes name.json / name.csv per the format switches and records the paths.
void emit(RunOutcome& out, const ExperimentConfig& cfg, const std::string& name,
          const std::string& json_text, const std::string& csv_text) {
    fs::path dir(cfg.output.directory);
    if (cfg.output.json) {
        fs::path p = dir / (name + ".json");
        write_text_file(p, json_text);
        out.files.push_back(p.string());
    }
    if (cfg.output.csv) {
        fs::path p = dir / (name + ".csv");
        write_text_file(p, csv_text);
        out.files.push_back(p.string());
    }
}

EffectiveConfig cell_config(const SchemeConfig& scheme, const std::vector<double>& alphas,
                            double longtime_T, double crosscheck_tol) {
    EffectiveConfig cfg;
    cfg.scheme = scheme;
    cfg.alphas = alphas;
    cfg.longtime_T = longtime_T;
    cfg.crosscheck_tol = crosscheck_tol;
    return cfg;
}

std::string run_verify(RunOutcome& out, const ExperimentConfig& cfg, const VerifyParams& p) {
    AssumptionReport report = estimate_constants(cfg.hamiltonian(), p.probe);
    emit(out, cfg, "verify", json_assumptions(report, cfg.resolved), csv_assumptions(report));
    return std::string("admitted: ") + (report.admitted() ? "yes" : "no") +
           ", eta = " + format_double(report.eta);
}

std::string run_ergodic(RunOutcome& out, const ExperimentConfig& cfg, const ErgodicParams& p) {
    HamiltonianSpec spec = cfg.hamiltonian();
    TorusGrid grid = cfg.make_grid();
    ErgodicResult results[2] = {
        ergodic_discount(spec, grid, p.alphas, cfg.scheme),
        ergodic_longtime(spec, grid, p.longtime_T, cfg.scheme),
    };
    emit(out, cfg, "ergodic", json_ergodic(results, cfg.resolved), csv_ergodic(results));
    return "lambda = " + format_double(results[0].lambda) + ", methods differ by " +
           format_double(std::fabs(results[0].lambda - results[1].lambda));
}

std::string run_effective(RunOutcome& out, const ExperimentConfig& cfg,
                          const EffectiveParams& p) {
    EffectiveTable table = tabulate(cfg.hamiltonian(), p.p_grid, cfg.make_grid(),
                                    cell_config(cfg.scheme, p.alphas, p.longtime_T,
                                                p.crosscheck_tol));
    emit(out, cfg, "effective", json_effective(table, cfg.resolved), csv_effective(table));
    return std::to_string(table.values.size()) + " slope points, " +
           std::to_string(table.warnings.size()) + " warnings";
}

std::string run_homogenize(RunOutcome& out, const ExperimentConfig& cfg,
                           const HomogenizeParams& p) {
    StudyConfig study;
    study.effective = cell_config(cfg.scheme, p.alphas, p.longtime_T, p.crosscheck_tol);
    study.ergodic_grid = cfg.make_grid();
    study.p_grid = p.p_grid;
    study.cells_per_fast_period = p.cells_per_fast_period;
    ConvergenceReport report =
        convergence_study(cfg.hamiltonian(), p.epsilons, p.initial, p.horizon, study);
    emit(out, cfg, "homogenize", json_convergence(report, cfg.resolved),
         csv_convergence(report));
    std::string msg = "errors";
    for (double e : report.errors) msg += " " + format_double(e);
    return msg;
}

std::string run_graph(RunOutcome& out, const ExperimentConfig& cfg, const GraphParams& p) {
    const GraphSpec& graph = *cfg.graph;
    TorusGrid lift_grid = cfg.make_grid();
    EffectiveConfig ecfg = cell_config(cfg.scheme, p.alphas, p.longtime_T, p.crosscheck_tol);
    std::vector<GraphResult> results;
    results.reserve(p.slopes.size());
    double worst = 0.0;
    for (RationalSlope s : p.slopes) {
        results.push_back(graph_consistency(graph, s, lift_grid, ecfg, p.slope_T, cfg.scheme,
                                            p.cells_per_unit));
        worst = std::max(worst, results.back().discrepancy);
    }
    emit(out, cfg, "graph", json_graph(results, cfg.resolved), csv_graph(results));
    return std::to_string(results.size()) + " slopes, worst discrepancy " +
           format_double(worst);
}

void write_error(RunOutcome& out, const ExperimentConfig& cfg, const std::string& stage,
                 const std::string& message) {
    // Best effort: the error report must not mask the original failure.
    try {
        fs::path p = fs::path(cfg.output.directory) / "error.json";
        write_text_file(p, json_error(stage, message, cfg.resolved));
        out.files.push_back(p.string());
    } catch (const std::exception&) {
    }
}

} // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg) {
    RunOutcome out;
    const std::string stage(kind_name(cfg.kind));
    try {
        switch (cfg.kind) {
            case ExperimentKind::verify:
                out.message = run_verify(out, cfg, std::get<VerifyParams>(cfg.params));
                break;
            case ExperimentKind::ergodic:
                out.message = run_ergodic(out, cfg, std::get<ErgodicParams>(cfg.params));
                break;
            case ExperimentKind::effective:
                out.message = run_effective(out, cfg, std::get<EffectiveParams>(cfg.params));
                break;
            case ExperimentKind::homogenize:
                out.message = run_homogenize(out, cfg, std::get<HomogenizeParams>(cfg.params));
                break;
            case ExperimentKind::graph:
                out.message = run_graph(out, cfg, std::get<GraphParams>(cfg.params));
                break;
        }
    } catch (const NumericsError& e) {
        out.exit_code = 2;
        out.message = e.what();
        write_error(out, cfg, stage, out.message);
    } catch (const RangeError& e) {
        // A solve escaped the tabulated slope hull: the configured table is
        // too small for the data, which is a configuration problem.
        out.exit_code = 1;
        out.message = e.what();
        write_error(out, cfg, stage, out.message);
    } catch (const ConfigError& e) {
        out.exit_code = 1;
        out.message = e.what();
        write_error(out, cfg, stage, out.message);
    }
    return out;
}

} // namespace hamhom
