#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hamhom/config.hpp"
#include "hamhom/errors.hpp"
#include "hamhom/reports.hpp"

using namespace hamhom;
namespace fs = std::filesystem;

namespace {

bool rejected(const std::string& text) {
    try {
        (void)parse_config_text(text);
        return false;
    } catch (const ConfigError&) {
        return true;
    }
}

} // namespace

TEST_CASE("inline specs parse into full experiment configs") {
    ExperimentConfig c = parse_config_text(R"({
      "spec": {
        "space_dims": 1,
        "has_y": true,
        "coercive": {"beta": 1.0, "a": 1.0},
        "drifts": [{"shape": "absolute", "offset": -1.0,
                    "b": {"mean": 1.0, "modes": [{"ky": 1, "amplitude": 0.5}]}}]
      },
      "grid": {"cells": [64, 16]},
      "scheme": {"cfl": 0.4},
      "experiment": {"kind": "ergodic", "alphas": [0.2, 0.1], "longtime_T": 30.0},
      "output": {"directory": "run1", "formats": ["csv"]}
    })");
    CHECK(c.kind == ExperimentKind::ergodic);
    REQUIRE(c.spec.has_value());
    CHECK(c.spec->has_y);
    CHECK(c.spec->drifts.size() == 1);
    CHECK(c.grid_cells == std::vector<int>{64, 16});
    CHECK(c.scheme.cfl == 0.4);
    CHECK(c.output.csv);
    CHECK_FALSE(c.output.json);
    CHECK(c.output.directory == "run1");
    const auto& ep = std::get<ErgodicParams>(c.params);
    CHECK(ep.alphas == std::vector<double>{0.2, 0.1});
    CHECK(ep.longtime_T == 30.0);
    TorusGrid g = c.make_grid();
    CHECK(g.axes() == 2);
    CHECK(g.cells(0) == 64);
    CHECK_FALSE(c.resolved.empty());
    CHECK(nlohmann::json::parse(c.resolved)["experiment"]["kind"] == "ergodic");
}

TEST_CASE("corpus specs resolve by name and overrides apply in order") {
    const std::vector<std::string> overrides = {"experiment.slope_T=16",
                                                "output.directory=graph_run",
                                                "scheme.residual_tol=1e-7"};
    ExperimentConfig c = parse_config_text(R"({
      "spec": {"corpus": "graph_harmonic"},
      "grid": {"cells": [256, 8]},
      "experiment": {"kind": "graph", "slopes": [{"num": 1, "den": 2}, {"num": -1}],
                     "slope_T": 12.0}
    })",
                                           overrides);
    CHECK(c.graph.has_value());
    CHECK_FALSE(c.spec.has_value());
    const auto& gp = std::get<GraphParams>(c.params);
    REQUIRE(gp.slopes.size() == 2);
    CHECK(gp.slopes[1].num == -1);
    CHECK(gp.slopes[1].den == 1); // denominator defaults to 1
    CHECK(gp.slope_T == 16.0);    // override wins over the file value
    CHECK(c.output.directory == "graph_run");
    CHECK(c.scheme.residual_tol == 1e-7);

    HamiltonianSpec lifted = c.hamiltonian();
    CHECK(lifted.has_y);
    CHECK(lifted.graph_inner.has_value());
}

TEST_CASE("homogenize experiments carry their lattice and initial data") {
    ExperimentConfig c = parse_config_text(R"({
      "spec": {"corpus": "noncoercive_xyt"},
      "grid": {"cells": [64, 64]},
      "experiment": {"kind": "homogenize",
                     "epsilons": [0.25, 0.125],
                     "horizon": 0.25,
                     "initial": {"modes": [{"kx": [1], "amplitude": 0.3}]},
                     "p_axes": [{"min": -2.0, "max": 2.0, "count": 9},
                                {"min": -2.0, "max": 2.0, "count": 9}]}
    })");
    const auto& hp = std::get<HomogenizeParams>(c.params);
    CHECK(hp.epsilons == std::vector<double>{0.25, 0.125});
    CHECK(hp.horizon == 0.25);
    CHECK(hp.p_grid.axes.size() == 2);
    REQUIRE(hp.initial.modes.size() == 1);
    CHECK(hp.initial.modes[0].amplitude == 0.3);
}

TEST_CASE("verification runs need no grid") {
    ExperimentConfig c = parse_config_text(R"({
      "spec": {"corpus": "drift_lneg"},
      "experiment": {"kind": "verify", "cells": 16}
    })");
    CHECK(std::get<VerifyParams>(c.params).probe.cells == 16);
}

TEST_CASE("malformed configs are rejected with config errors") {
    CHECK(rejected(R"({"spec": {"corpus": "nope"}, "grid": {"cells": [8]},
                       "experiment": {"kind": "ergodic"}})"));
    // unknown key: probable typo of alphas
    CHECK(rejected(R"({"spec": {"corpus": "eikonal_sine"}, "grid": {"cells": [8]},
                       "experiment": {"kind": "ergodic", "alpha": [0.1]}})"));
    // grid axes do not match the one-dimensional spec
    CHECK(rejected(R"({"spec": {"corpus": "eikonal_sine"}, "grid": {"cells": [8, 8]},
                       "experiment": {"kind": "ergodic"}})"));
    CHECK(rejected(R"({"spec": {"corpus": "eikonal_sine"},
                       "experiment": {"kind": "ergodic"}})"));
    CHECK(rejected(R"({"spec": {"corpus": "eikonal_sine"}, "grid": {"cells": [8]},
                       "scheme": {"cfl": 1.5}, "experiment": {"kind": "ergodic"}})"));
    // graph experiment against a non-graph spec
    CHECK(rejected(R"({"spec": {"corpus": "eikonal_sine"}, "grid": {"cells": [8]},
                       "experiment": {"kind": "graph", "slopes": [{"num": 1}]}})"));
    CHECK(rejected(R"({"spec": {"corpus": "graph_pinning"}, "grid": {"cells": [8, 8]},
                       "experiment": {"kind": "graph", "slopes": [{"num": 1, "den": 9}]}})"));
    CHECK(rejected(R"({"spec": {"corpus": "eikonal_sine"}, "grid": {"cells": [8]},
                       "experiment": {"kind": "ergodic"},
                       "output": {"formats": []}})"));
    CHECK(rejected(R"({"spec": {"corpus": "eikonal_sine"}, "grid": {"cells": [8]},
                       "experiment": {"kind": "ergodic"},
                       "output": {"formats": ["yaml"]}})"));
    CHECK(rejected(R"({"spec": {"corpus": "eikonal_sine"}, "grid": {"cells": [8]},
                       "experiment": {"kind": "mystery"}})"));
    CHECK(rejected("not json at all"));
}

TEST_CASE("override strings must be key=value with a known key") {
    const std::string base = R"({"spec": {"corpus": "eikonal_sine"}, "grid": {"cells": [16]},
                                 "experiment": {"kind": "ergodic"}})";
    const std::vector<std::string> missing_eq = {"scheme.cfl"};
    CHECK_THROWS_AS(parse_config_text(base, missing_eq), ConfigError);
    const std::vector<std::string> unknown = {"scheme.speed=3"};
    CHECK_THROWS_AS(parse_config_text(base, unknown), ConfigError);
    const std::vector<std::string> ok = {"scheme.cfl=0.25", "output.directory=over there"};
    ExperimentConfig c = parse_config_text(base, ok);
    CHECK(c.scheme.cfl == 0.25);
    CHECK(c.output.directory == "over there"); // non-JSON values stay strings
}

TEST_CASE("configs load from disk and missing files are config errors") {
    fs::path dir = fs::temp_directory_path() / "hamhom_cfg_test";
    fs::create_directories(dir);
    fs::path file = dir / "exp.json";
    std::ofstream(file) << R"({"spec": {"corpus": "eikonal_sine"}, "grid": {"cells": [16]},
                               "experiment": {"kind": "effective",
                                              "p_axes": [{"min": -1, "max": 1, "count": 3}]}})";
    ExperimentConfig c = load_config(file.string(), {});
    CHECK(c.kind == ExperimentKind::effective);
    CHECK(std::get<EffectiveParams>(c.params).p_grid.axes.size() == 1);
    CHECK_THROWS_AS(load_config((dir / "absent.json").string(), {}), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("doubles render as shortest round-trip decimals") {
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.5) == "-2.5");
    const double values[] = {1.0 / 3.0, 6.283185307179586, 1e-300, -7.1e22, 0.0};
    for (double v : values) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("csv assembly quotes and counts cells") {
    const std::string cols[] = {"a", "b"};
    CsvBuilder csv(cols);
    csv.row({"plain", "with,comma"});
    csv.row({"quote\"inside", "line\nbreak"});
    CHECK(csv.text() == "a,b\nplain,\"with,comma\"\n\"quote\"\"inside\",\"line\nbreak\"\n");
    CHECK_THROWS_AS(csv.row({"only one"}), ConfigError);
    CHECK_THROWS_AS(CsvBuilder(std::span<const std::string>{}), ConfigError);
}

TEST_CASE("result tables render their documented columns") {
    ErgodicResult r;
    r.lambda = 0.5;
    r.method = ErgodicMethod::discount;
    r.parameter = 0.05;
    r.history = {{0.1, 0.48}, {0.05, 0.49}};
    const ErgodicResult rs[] = {r};
    const std::string csv = csv_ergodic(rs);
    CHECK(csv == "method,parameter,estimate,final\n"
                 "discount,0.1,0.48,false\n"
                 "discount,0.05,0.49,false\n"
                 "discount,0.05,0.5,true\n");

    ConvergenceReport cr;
    cr.epsilons = {0.25, 0.125};
    cr.errors = {0.2, 0.1};
    cr.decay_factors = {2.0};
    cr.fine_cells = {128, 256};
    const std::string conv = csv_convergence(cr);
    CHECK(conv == "epsilon,fine_cells,error,decay_factor\n"
                  "0.25,128,0.2,\n"
                  "0.125,256,0.1,2\n");

    GraphResult gr;
    gr.p = RationalSlope{1, 2};
    gr.H_bar_lifted = 0.75;
    gr.slope_longtime = -0.74;
    gr.discrepancy = 0.01;
    const GraphResult grs[] = {gr};
    CHECK(csv_graph(grs) == "num,den,p,effective_value,longtime_slope,discrepancy\n"
                            "1,2,0.5,0.75,-0.74,0.01\n");
}

TEST_CASE("json reports embed the resolved config and end with a newline") {
    ExperimentConfig c = parse_config_text(R"({
      "spec": {"corpus": "eikonal_sine"},
      "grid": {"cells": [16]},
      "experiment": {"kind": "ergodic"}
    })");
    ErgodicResult r;
    r.lambda = 1.0;
    const ErgodicResult rs[] = {r};
    const std::string text = json_ergodic(rs, c.resolved);
    REQUIRE(!text.empty());
    CHECK(text.back() == '\n');
    auto doc = nlohmann::json::parse(text);
    CHECK(doc["kind"] == "ergodic");
    CHECK(doc["config"] == nlohmann::json::parse(c.resolved));
    REQUIRE(doc["estimates"].is_array());
    CHECK(doc["estimates"][0]["lambda"] == 1.0);

    const std::string err = json_error("load", "boom", c.resolved);
    auto edoc = nlohmann::json::parse(err);
    CHECK(edoc["kind"] == "error");
    CHECK(edoc["stage"] == "load");
    CHECK(edoc["message"] == "boom");
}

TEST_CASE("acceptance summaries render without timings") {
    CriterionResult a;
    a.name = "sample-criterion";
    a.pass = true;
    a.detail = "max defect 0.001 (allow 0.05)";
    a.seconds = 12.34;
    CriterionResult b = a;
    b.seconds = 99.9; // timing must not reach the rendered bytes
    const CriterionResult one[] = {a};
    const CriterionResult two[] = {b};
    CHECK(csv_acceptance(one) == csv_acceptance(two));
    CHECK(json_acceptance(one) == json_acceptance(two));
    CHECK(csv_acceptance(one) ==
          "criterion,pass,detail\nsample-criterion,true,max defect 0.001 (allow 0.05)\n");
}

TEST_CASE("report files are written whole with parents created") {
    fs::path dir = fs::temp_directory_path() / "hamhom_write_test" / "nested";
    fs::remove_all(dir.parent_path());
    fs::path file = dir / "report.csv";
    write_text_file(file, "a,b\n1,2\n");
    std::ifstream in(file);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text == "a,b\n1,2\n");
    write_text_file(file, "replaced\n");
    std::ifstream in2(file);
    std::string text2((std::istreambuf_iterator<char>(in2)), std::istreambuf_iterator<char>());
    CHECK(text2 == "replaced\n");
    fs::remove_all(dir.parent_path());
}
