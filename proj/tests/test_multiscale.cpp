#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hamhom/corpus.hpp"
#include "hamhom/errors.hpp"
#include "hamhom/multiscale.hpp"

using namespace hamhom;

namespace {

TorusGrid grid1(int n) {
    const int cells[] = {n};
    return TorusGrid(1, false, cells);
}

TorusGrid grid_xy(int nx, int ny) {
    const int cells[] = {nx, ny};
    return TorusGrid(1, true, cells);
}

Field cosine_field(const TorusGrid& g, double amp) {
    Field v(g);
    for (int i = 0; i < g.cells(0); ++i)
        v[static_cast<std::size_t>(i)] = amp * std::cos(kTwoPi * g.coord(0, i));
    return v;
}

} // namespace

TEST_CASE("rational slopes bound their denominator") {
    RationalSlope half{1, 2};
    half.validate();
    CHECK(half.value() == 0.5);
    RationalSlope flat{0, 1};
    flat.validate();
    RationalSlope zero_den{1, 0};
    CHECK_THROWS_AS(zero_den.validate(), ConfigError);
    RationalSlope deep{3, 9};
    CHECK_THROWS_AS(deep.validate(), ConfigError);
}

TEST_CASE("fast-scale solves validate epsilon and resolution") {
    const HamiltonianSpec& spec = corpus_spec("eikonal_sine");
    SchemeConfig cfg;
    Field u0 = cosine_field(grid1(128), 0.5);

    CHECK_THROWS_AS(solve_fine(spec, 0.3, u0, 0.1, cfg), ConfigError);  // 1/0.3 not whole
    CHECK_THROWS_AS(solve_fine(spec, 0.0, u0, 0.1, cfg), ConfigError);
    CHECK_THROWS_AS(solve_fine(spec, 1.5, u0, 0.1, cfg), ConfigError);
    // 128 cells cannot resolve 8 fast periods at 32 cells each
    CHECK_THROWS_AS(solve_fine(spec, 0.125, u0, 0.1, cfg), ConfigError);
    CHECK_THROWS_AS(solve_fine(spec, 0.25, u0, 0.1, cfg, 2), ConfigError); // rule floor is 4

    Field u = solve_fine(spec, 0.25, u0, 0.05, cfg);
    CHECK(u.all_finite());
    CHECK(sup_abs_diff(u, u0) > 0.0);
}

TEST_CASE("front solves with no value coupling reduce to the gradient part") {
    const GraphSpec& graph = corpus_graph("graph_harmonic"); // g is identically zero
    Field u0 = cosine_field(grid1(128), 0.5);
    SchemeConfig cfg;

    HamiltonianSpec gradient;
    gradient.space_dims = 1;
    gradient.coercive.push_back(CoerciveTerm{graph.c, 1.0});

    Field a = solve_graph(graph, 0.25, u0, 0.1, cfg);
    Field b = solve_fine(gradient, 0.25, u0, 0.1, cfg);
    CHECK(sup_abs_diff(a, b) == 0.0);
}

TEST_CASE("a constant table advances data by an exact shift") {
    EffectiveTable t;
    t.p_grid.axes.push_back(PAxis{0.0, 0.0, 1});
    t.values = {0.35};
    t.meta.resize(1);

    TorusGrid g = grid1(32);
    Field u0 = cosine_field(g, 1.0);
    SchemeConfig cfg;
    Field u = solve_homogenized(t, u0, 0.5, cfg);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] == u0[i] - 0.35 * 0.5);

    EffectiveTable wide;
    wide.p_grid.axes.push_back(PAxis{-1.0, 1.0, 3});
    wide.values = {0.35, 0.35, 0.35}; // equal values: zero Lipschitz, same shift
    wide.meta.resize(3);
    Field w = solve_homogenized(wide, u0, 0.5, cfg);
    CHECK(sup_abs_diff(w, u) == 0.0);

    EffectiveTable mismatched = t;
    Field u2(grid_xy(16, 16), 0.0);
    CHECK_THROWS_AS(solve_homogenized(mismatched, u2, 0.1, cfg), ConfigError);
}

TEST_CASE("oscillation-scale study shrinks its error") {
    const HamiltonianSpec& spec = corpus_spec("eikonal_sine");
    CoeffField U0;
    U0.modes.push_back(CoeffMode{{1, 0}, 0, 0, 0.3, 0.0});

    StudyConfig cfg;
    cfg.ergodic_grid = grid1(64);
    const double eps[] = {0.25, 0.125};
    ConvergenceReport rep = convergence_study(spec, eps, U0, 0.1, cfg);
    rep.validate();
    REQUIRE(rep.errors.size() == 2);
    REQUIRE(rep.decay_factors.size() == 1);
    CHECK(rep.fine_cells == std::vector<int>{128, 256});
    CHECK(rep.coarse_cells == 128);
    CHECK(rep.reference_cells == 256);
    CHECK(rep.horizon == 0.1);
    CHECK(rep.errors[1] < rep.errors[0]);
    CHECK(rep.decay_factors[0] > 1.0);
    CHECK(rep.notes.size() >= 2);

    const double same[] = {0.25, 0.25};
    CHECK_THROWS_AS(convergence_study(spec, same, U0, 0.1, cfg), ConfigError);
    const double coarser_misfit[] = {0.25, 1.0 / 6.0};
    CHECK_THROWS_AS(convergence_study(spec, coarser_misfit, U0, 0.1, cfg), ConfigError);
    CHECK_THROWS_AS(convergence_study(spec, {}, U0, 0.1, cfg), ConfigError);
}

TEST_CASE("convergence reports validate their shape") {
    ConvergenceReport rep;
    rep.epsilons = {0.25};
    rep.errors = {0.1};
    rep.fine_cells = {128};
    rep.validate(); // one epsilon, one error, no factors: fine
    rep.errors = {0.1, 0.2};
    CHECK_THROWS_AS(rep.validate(), ConfigError);
    rep.errors = {-0.1};
    CHECK_THROWS_AS(rep.validate(), ConfigError);
}

TEST_CASE("both front-speed routes agree on the harmonic speed") {
    const GraphSpec& graph = corpus_graph("graph_harmonic");
    EffectiveConfig cfg;
    double Hbar = effective_H(graph, 1.0, grid_xy(64, 32), cfg);
    CHECK(Hbar == doctest::Approx(1.0).epsilon(0.02)); // harmonic average of the speed

    SchemeConfig scheme;
    double slope = longtime_slope(graph, RationalSlope{1, 1}, CoeffField::constant(0.0),
                                  8.0, scheme, 128);
    CHECK(slope == doctest::Approx(-1.0).epsilon(0.05));

    GraphResult r = graph_consistency(graph, RationalSlope{1, 1}, grid_xy(64, 32), cfg,
                                      8.0, scheme, 128);
    CHECK(r.discrepancy <= 0.05);
    CHECK(r.discrepancy == std::fabs(r.H_bar_lifted + r.slope_longtime));
}

TEST_CASE("long-run slope rejects bad marching setups") {
    const GraphSpec& graph = corpus_graph("graph_pinning");
    SchemeConfig cfg;
    CoeffField w0 = CoeffField::constant(0.0);
    RationalSlope p{1, 2};
    CHECK_THROWS_AS(longtime_slope(graph, p, w0, 3.0, cfg), ConfigError);
    CHECK_THROWS_AS(longtime_slope(graph, p, w0, 8.0, cfg, 8), ConfigError);

    GraphSpec planar;
    planar.space_dims = 2;
    planar.c = CoeffField::constant(1.0);
    planar.g = CoeffField::constant(0.0);
    CHECK_THROWS_AS(longtime_slope(planar, p, w0, 8.0, cfg), ConfigError);
}
