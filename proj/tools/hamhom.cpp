#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hamhom/acceptance.hpp"
#include "hamhom/config.hpp"
#include "hamhom/errors.hpp"
#include "hamhom/reports.hpp"
#include "hamhom/runner.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir;
};

int run_kind(const std::string& kind, const CommonArgs& args) {
    std::vector<std::string> overrides;
    overrides.push_back("experiment.kind=" + kind);
    overrides.insert(overrides.end(), args.sets.begin(), args.sets.end());
    if (!args.out_dir.empty()) overrides.push_back("output.directory=" + args.out_dir);

    hamhom::ExperimentConfig cfg = hamhom::load_config(args.config_path, overrides);
    hamhom::RunOutcome out = hamhom::run_experiment(cfg);
    std::ostream& os = out.exit_code == 0 ? std::cout : std::cerr;
    os << kind << ": " << out.message << "\n";
    for (const std::string& f : out.files) os << "wrote " << f << "\n";
    return out.exit_code;
}

int run_corpus(const std::string& out_dir, const hamhom::AcceptanceTuning& tuning) {
    std::vector<hamhom::CriterionResult> results = hamhom::run_acceptance(tuning);
    int failures = hamhom::report_acceptance(results, std::cout);

    namespace fs = std::filesystem;
    fs::path dir(out_dir);
    hamhom::write_text_file(dir / "acceptance.csv", hamhom::csv_acceptance(results));
    hamhom::write_text_file(dir / "acceptance.json", hamhom::json_acceptance(results));
    std::cout << "wrote " << (dir / "acceptance.csv").string() << "\n";
    std::cout << "wrote " << (dir / "acceptance.json").string() << "\n";

    if (failures) {
        for (const hamhom::CriterionResult& r : results)
            if (!r.pass) {
                std::cerr << "first failing criterion: " << r.name << "\n";
                break;
            }
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic cell problems, effective Hamiltonians, and scale-convergence studies"};
    app.require_subcommand(1);

    const std::pair<const char*, const char*> kinds[] = {
        {"verify", "estimate structural constants of a spec"},
        {"ergodic", "cell value by damped and long-time estimators"},
        {"effective", "tabulate the effective Hamiltonian over a slope lattice"},
        {"homogenize", "fine-vs-homogenized convergence study"},
        {"graph", "front-speed consistency for graph equations"},
    };

    CommonArgs args;
    for (const auto& [name, help] : kinds) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", args.config_path, "JSON experiment description")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--set", args.sets,
                        "override a config value, e.g. --set scheme.cfl=0.4");
        sub->add_option("--out", args.out_dir, "output directory (overrides the config)");
    }
    std::string corpus_out = "out";
    hamhom::AcceptanceTuning tuning;
    CLI::App* corpus = app.add_subcommand("corpus", "run the built-in acceptance battery");
    corpus->add_option("--out", corpus_out, "directory for the aggregate reports");
    corpus->add_option("--residual-tol-scale", tuning.residual_tol_scale,
                       "loosen every solver stopping tolerance by this factor");
    corpus->add_option("--cells-divisor", tuning.cells_divisor,
                       "divide every battery lattice resolution by this integer");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (corpus->parsed()) return run_corpus(corpus_out, tuning);
        for (const auto& [name, help] : kinds) {
            (void)help;
            if (app.get_subcommand(name)->parsed()) return run_kind(name, args);
        }
        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const hamhom::NumericsError& e) {
        std::cerr << "numerics failure: " << e.what() << "\n";
        return 2;
    } catch (const hamhom::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
