#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hamhom/corpus.hpp"
#include "hamhom/effective.hpp"
#include "hamhom/errors.hpp"

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

PGrid axis_grid(double lo, double hi, int count) {
    PGrid pg;
    pg.axes.push_back(PAxis{lo, hi, count});
    return pg;
}

} // namespace

TEST_CASE("slope axes and lattices are validated") {
    PAxis no_points{0.0, 1.0, 0};
    CHECK_THROWS_AS(no_points.validate(), ConfigError);
    PAxis reversed{1.0, 0.0, 3};
    CHECK_THROWS_AS(reversed.validate(), ConfigError);
    PAxis pinned{0.75, 0.0, 1};
    pinned.validate(); // a pinned axis ignores max
    CHECK(pinned.coord(0) == 0.75);
    CHECK(pinned.spacing() == 0.0);

    PGrid empty;
    CHECK_THROWS_AS(empty.validate(), ConfigError);

    PGrid pg;
    pg.axes.push_back(PAxis{0.0, 1.0, 3});
    pg.axes.push_back(PAxis{-1.0, 1.0, 2});
    pg.validate();
    CHECK(pg.point_count() == 6);
    CHECK(pg.point(0) == std::vector<double>{0.0, -1.0});
    CHECK(pg.point(1) == std::vector<double>{0.5, -1.0}); // axis 0 varies fastest
    CHECK(pg.point(3) == std::vector<double>{0.0, 1.0});
}

TEST_CASE("cell values follow the clipped-growth closed form") {
    const HamiltonianSpec& spec = corpus_spec("eikonal_sine");
    TorusGrid g = grid1(64);
    EffectiveConfig cfg;

    // For |p| against a unit sine source the cell value is max(1, |P|).
    const double cases[][2] = {{0.0, 1.0}, {0.5, 1.0}, {-1.5, 1.5}, {2.0, 2.0}};
    for (auto [P, want] : cases) {
        const double Pv[] = {P};
        EffectiveValue v = effective_at(spec, Pv, g, cfg);
        CHECK(v.value == doctest::Approx(want).epsilon(0.01));
        CHECK_FALSE(v.flagged);
        CHECK(std::fabs(v.discount - v.longtime) <= cfg.crosscheck_tol);
    }

    const double bad[] = {0.0, 0.0};
    CHECK_THROWS_AS(effective_at(spec, bad, g, cfg), ConfigError);
}

TEST_CASE("tables record values, metadata, and a clean bill of health") {
    const HamiltonianSpec& spec = corpus_spec("eikonal_sine");
    EffectiveTable t = tabulate(spec, axis_grid(-2.0, 2.0, 5), grid1(64), EffectiveConfig{});
    REQUIRE(t.values.size() == 5);
    REQUIRE(t.meta.size() == 5);
    const double want[] = {2.0, 1.0, 1.0, 1.0, 2.0};
    for (int i = 0; i < 5; ++i) {
        CHECK(t.values[i] == doctest::Approx(want[i]).epsilon(0.01));
        CHECK_FALSE(t.meta[i].flagged);
        CHECK(t.meta[i].residual <= 1e-5);
    }
    CHECK(t.warnings.empty());
    CHECK(t.spec_digest == spec.digest());
}

TEST_CASE("interpolation is exact on nodes and affine data") {
    EffectiveTable t;
    t.p_grid.axes.push_back(PAxis{0.0, 2.0, 3});
    t.p_grid.axes.push_back(PAxis{-1.0, 1.0, 3});
    const std::size_t n = t.p_grid.point_count();
    for (std::size_t i = 0; i < n; ++i) {
        auto P = t.p_grid.point(i);
        t.values.push_back(0.25 + P[0] + 2.0 * P[1]); // affine: multilinear is exact
    }
    t.meta.resize(n);

    for (std::size_t i = 0; i < n; ++i)
        CHECK(interpolate(t, t.p_grid.point(i)) == t.values[i]);

    const double mid[] = {0.7, 0.3};
    CHECK(interpolate(t, mid) == doctest::Approx(0.25 + 0.7 + 0.6).epsilon(1e-14));

    const double near[] = {1.0 + 1e-10, -1.0};
    CHECK(interpolate(t, near) == doctest::Approx(1.25 - 2.0).epsilon(1e-12));

    const double outside[] = {2.5, 0.0};
    CHECK_THROWS_AS(interpolate(t, outside), RangeError);
    const double low[] = {0.0, -1.0 - 1e-6};
    CHECK_THROWS_AS(interpolate(t, low), RangeError);
    const double wrong_dim[] = {0.0};
    CHECK_THROWS_AS(interpolate(t, wrong_dim), ConfigError);
}

TEST_CASE("lifted front speeds scale linearly in the slope") {
    HamiltonianSpec spec = lift(corpus_graph("graph_harmonic"));
    HomogeneityReport r = homogeneity_check(spec, grid_xy(64, 16), EffectiveConfig{});
    CHECK(r.max_deviation <= 0.02);
    CHECK(std::fabs(r.value_at_zero) <= 0.02);

    CHECK_THROWS_AS(
        homogeneity_check(corpus_spec("eikonal_sine"), grid1(32), EffectiveConfig{}),
        ConfigError);
}

TEST_CASE("coefficient perturbations wash out as they shrink") {
    const HamiltonianSpec& spec = corpus_spec("eikonal_sine");
    TorusGrid g = grid1(32);
    EffectiveConfig cfg;
    const double deltas[] = {0.2, 0.1, 0.05};
    StabilityReport r = stability_check(spec, g, cfg, deltas);
    REQUIRE(r.deltas.size() == 3);
    REQUIRE(r.deviations.size() == 3);
    CHECK(r.monotone_decay);
    CHECK(r.observed_C >= 0.0);
    CHECK(r.deviations[0] < 0.5); // a 20% amplitude bump cannot move the value much

    const double increasing[] = {0.05, 0.1};
    CHECK_THROWS_AS(stability_check(spec, g, cfg, increasing), ConfigError);
    const double zero[] = {0.0};
    CHECK_THROWS_AS(stability_check(spec, g, cfg, zero), ConfigError);
}
