#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hamhom/corpus.hpp"
#include "hamhom/errors.hpp"
#include "hamhom/grid.hpp"
#include "hamhom/scheme.hpp"

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

HamiltonianSpec pure_norm() {
    HamiltonianSpec s;
    s.coercive.push_back(CoerciveTerm{CoeffField::constant(1.0), 1.0});
    return s;
}

Field cosine_field(const TorusGrid& g) {
    Field v(g);
    for (int i = 0; i < g.cells(0); ++i)
        v[static_cast<std::size_t>(i)] = std::cos(kTwoPi * g.coord(0, i));
    return v;
}

} // namespace

TEST_CASE("scheme settings are validated") {
    TorusGrid g = grid1(16);
    SchemeConfig c;
    c.validate(g);

    SchemeConfig bad = c;
    bad.cfl = 0.0;
    CHECK_THROWS_AS(bad.validate(g), ConfigError);
    bad.cfl = 1.5;
    CHECK_THROWS_AS(bad.validate(g), ConfigError);

    bad = c;
    bad.residual_tol = 0.0;
    CHECK_THROWS_AS(bad.validate(g), ConfigError);

    bad = c;
    bad.max_steps = 0;
    CHECK_THROWS_AS(bad.validate(g), ConfigError);

    bad = c;
    bad.gradient_probe_radius = -1.0;
    CHECK_THROWS_AS(bad.validate(g), ConfigError);

    bad = c;
    bad.dissipation_per_axis = {1.0, 1.0};
    CHECK_THROWS_AS(bad.validate(g), ConfigError); // one axis, two entries

    bad.dissipation_per_axis = {0.0};
    CHECK_THROWS_AS(bad.validate(g), ConfigError);
}

TEST_CASE("derived dissipation follows the coefficient bounds") {
    auto th = derive_dissipation(corpus_spec("eikonal_sine"), grid1(64), 20.0);
    REQUIRE(th.size() == 1);
    CHECK(th[0] == 1.1); // unit coercive coefficient, slope derivative 1, 10% margin

    auto th2 = derive_dissipation(corpus_spec("drift_lneg"), grid_xy(16, 16), 20.0);
    REQUIRE(th2.size() == 2);
    CHECK(th2[0] == 1.1);
    CHECK(th2[1] == 1.1 * 1.5); // drift coefficient peaks at 1.5

    HamiltonianSpec quad = pure_norm();
    quad.coercive.front().beta = 2.0;
    auto th3 = derive_dissipation(quad, grid1(64), 20.0);
    CHECK(th3[0] == 1.1 * (2.0 * 20.0)); // d/dp p^2 at the probe radius

    CHECK_THROWS_AS(derive_dissipation(corpus_spec("eikonal_sine"), grid_xy(16, 16), 20.0),
                    ConfigError);
}

TEST_CASE("flux with equal one-sided slopes reproduces the raw value") {
    const HamiltonianSpec& spec = corpus_spec("drift_lneg");
    TorusGrid g = grid_xy(16, 16);
    auto theta = derive_dissipation(spec, g, 20.0);
    std::mt19937 rng(2026);
    std::uniform_real_distribution<double> slope(-4.0, 4.0);
    for (int trial = 0; trial < 32; ++trial) {
        std::size_t node = rng() % g.node_count();
        double s[2] = {slope(rng), slope(rng)};
        auto idx = g.unravel(node);
        const double x[] = {g.coord(0, idx[0])};
        const double y = g.coord(1, idx[1]);
        const double px[] = {s[0]};
        double direct = spec.eval(x, y, 0.0, px, s[1]);
        double flux = numerical_hamiltonian(spec, g, node, 0.0, s, s, theta);
        CHECK(flux == direct); // averaging equal slopes and a zero penalty are exact
    }
}

TEST_CASE("flux is monotone in each one-sided slope") {
    const HamiltonianSpec& spec = corpus_spec("drift_lneg");
    TorusGrid g = grid_xy(16, 16);
    auto theta = derive_dissipation(spec, g, 20.0);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> slope(-5.0, 5.0);
    std::uniform_real_distribution<double> bump(1e-3, 1.0);
    for (int trial = 0; trial < 64; ++trial) {
        std::size_t node = rng() % g.node_count();
        double l[2] = {slope(rng), slope(rng)};
        double r[2] = {slope(rng), slope(rng)};
        double base = numerical_hamiltonian(spec, g, node, 0.0, l, r, theta);
        for (int a = 0; a < 2; ++a) {
            double d = bump(rng);
            double lp[2] = {l[0], l[1]};
            lp[a] += d;
            // nondecreasing in the left slope, nonincreasing in the right
            CHECK(numerical_hamiltonian(spec, g, node, 0.0, lp, r, theta) >= base - 1e-12);
            double rp[2] = {r[0], r[1]};
            rp[a] += d;
            CHECK(numerical_hamiltonian(spec, g, node, 0.0, l, rp, theta) <= base + 1e-12);
        }
    }

    double s[2] = {0.0, 0.0};
    double short_theta[1] = {1.0};
    CHECK_THROWS_AS(numerical_hamiltonian(spec, g, 0, 0.0, s, s, short_theta), ConfigError);
}

TEST_CASE("constant state is a fixed point of the homogeneous flow") {
    HamiltonianSpec spec = pure_norm();
    TorusGrid g = grid1(32);
    Field v0(g, 3.25);
    SchemeConfig cfg;
    Field v = evolve(spec, v0, 0.0, 0.5, cfg);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == 3.25);
}

TEST_CASE("unit-speed contraction matches the sliding-minimum formula") {
    HamiltonianSpec spec = pure_norm();
    TorusGrid g = grid1(512);
    Field v0 = cosine_field(g);
    const double T = 0.1;
    SchemeConfig cfg;
    Field v = evolve(spec, v0, 0.0, T, cfg);

    // v(x,T) = min over |z - x| <= T of v0(z), sampled finely.
    double worst = 0.0;
    for (int i = 0; i < g.cells(0); ++i) {
        const double x = g.coord(0, i);
        double lo = 1e300;
        const int m = 400;
        for (int j = 0; j <= m; ++j) {
            const double z = x - T + 2.0 * T * j / m;
            lo = std::min(lo, std::cos(kTwoPi * z));
        }
        worst = std::max(worst, std::fabs(v[static_cast<std::size_t>(i)] - lo));
    }
    CHECK(worst < 0.02);
}

TEST_CASE("zero-horizon and negative-horizon edge cases") {
    HamiltonianSpec spec = pure_norm();
    TorusGrid g = grid1(16);
    Field v0 = cosine_field(g);
    SchemeConfig cfg;
    Field same = evolve(spec, v0, 0.0, 0.0, cfg);
    CHECK(sup_abs_diff(same, v0) == 0.0);
    CHECK_THROWS_AS(evolve(spec, v0, 0.0, -1.0, cfg), ConfigError);
}

TEST_CASE("step budget violations are reported as numerics failures") {
    HamiltonianSpec spec = pure_norm();
    TorusGrid g = grid1(256);
    Field v0 = cosine_field(g);
    SchemeConfig cfg;
    cfg.max_steps = 3; // horizon 1 at h = 1/256 needs hundreds of steps
    CHECK_THROWS_AS(evolve(spec, v0, 0.0, 1.0, cfg), NumericsError);
}

TEST_CASE("samples fire at step boundaries and end with the result") {
    const HamiltonianSpec& spec = corpus_spec("eikonal_sine");
    TorusGrid g = grid1(64);
    Field v0 = cosine_field(g);
    SchemeConfig cfg;
    std::vector<double> stamps;
    Field last;
    const double times[] = {0.05, 0.1, 0.2};
    Field v = evolve(spec, v0, 0.0, 0.2, cfg, times,
                     [&](double t, const Field& f) {
                         stamps.push_back(t);
                         last = f;
                     });
    REQUIRE(stamps.size() == 3);
    CHECK(std::is_sorted(stamps.begin(), stamps.end()));
    CHECK(stamps[0] >= 0.05);
    CHECK(stamps[2] == doctest::Approx(0.2));
    CHECK(sup_abs_diff(last, v) == 0.0); // final sample is the returned state
}

TEST_CASE("ordered data stays ordered under joint marching") {
    const HamiltonianSpec& spec = corpus_spec("noncoercive_xyt");
    TorusGrid g = grid_xy(16, 16);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_real_distribution<double> gap(0.0, 0.5);
    SchemeConfig cfg;
    for (int trial = 0; trial < 5; ++trial) {
        Field u(g), v(g);
        for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] = val(rng);
            v[i] = u[i] + gap(rng);
        }
        CHECK(comparison_probe(spec, u, v, 0.05, cfg));
    }

    Field a(g, 0.0), b(grid_xy(16, 32), 0.0);
    CHECK_THROWS_AS(comparison_probe(spec, a, b, 0.1, cfg), ConfigError);
}

TEST_CASE("direct-evaluation marching matches the structured path") {
    const HamiltonianSpec& spec = corpus_spec("drift_lneg");
    TorusGrid g = grid_xy(24, 24);
    auto theta = derive_dissipation(spec, g, 20.0);

    Field v0(g);
    for (std::size_t i = 0; i < v0.size(); ++i) {
        auto idx = g.unravel(i);
        v0[i] = std::cos(kTwoPi * g.coord(0, idx[0])) +
                0.5 * std::sin(kTwoPi * g.coord(1, idx[1]));
    }

    SchemeConfig cfg;
    cfg.dissipation_per_axis = theta;
    Field fast = evolve(spec, v0, 0.0, 0.2, cfg);

    auto ham = [&spec](std::span<const double> x, double t, std::span<const double> p) {
        const double px[] = {p[0]};
        return spec.eval(x.first(1), x[1], t, px, p[1]);
    };
    Field slow = evolve_generic(g, ham, v0, 0.0, 0.2, theta, cfg.cfl, cfg.max_steps);

    CHECK(sup_abs_diff(fast, slow) < 1e-12); // same steps, same flux, independent arithmetic
}

TEST_CASE("direct-evaluation marching validates its dissipation") {
    TorusGrid g = grid1(16);
    Field v0(g, 0.0);
    auto ham = [](std::span<const double>, double, std::span<const double> p) {
        return std::fabs(p[0]);
    };
    const double none[] = {0.0};
    CHECK_THROWS_AS(evolve_generic(g, ham, v0, 0.0, 0.1, none, 0.5, 1000), ConfigError);
    const double neg[] = {-1.0};
    CHECK_THROWS_AS(evolve_generic(g, ham, v0, 0.0, 0.1, neg, 0.5, 1000), ConfigError);
    const double two[] = {1.0, 1.0};
    CHECK_THROWS_AS(evolve_generic(g, ham, v0, 0.0, 0.1, two, 0.5, 1000), ConfigError);
    const double ok[] = {1.1};
    CHECK_THROWS_AS(evolve_generic(g, ham, v0, 0.0, 1.0, ok, 0.5, 2), NumericsError);
}
