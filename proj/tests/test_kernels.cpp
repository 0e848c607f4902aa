#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "hamhom/corpus.hpp"
#include "hamhom/grid.hpp"
#include "hamhom/parallel.hpp"
#include "hamhom/scheme.hpp"
#include "kernels/kernels.hpp"

using namespace hamhom;

namespace {

struct PlanData {
    std::vector<double> v, out, a, babs, blin, src, extra;
    kern::StepPlan plan;
};

// Builds a fully populated plan over pseudorandom tables. Layout follows the
// marching grids: axis 0 contiguous, outer axes as rows.
PlanData make_plan(int naxes, int n0, int c1, int c2, int beta_case, bool with_drift,
                   bool with_src, bool with_extra, unsigned seed) {
    PlanData d;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    std::uniform_real_distribution<double> pos(0.5, 2.0);
    const std::size_t n = static_cast<std::size_t>(n0) * c1 * c2;
    d.v.resize(n);
    d.out.assign(n, 0.0);
    d.a.resize(n);
    d.babs.resize(n);
    d.blin.resize(n);
    d.src.resize(n);
    d.extra.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.v[i] = val(rng);
        d.a[i] = pos(rng);
        d.babs[i] = pos(rng);
        d.blin[i] = val(rng);
        d.src[i] = val(rng);
        d.extra[i] = val(rng);
    }
    kern::StepPlan& p = d.plan;
    p.naxes = naxes;
    p.n0 = n0;
    p.cells1 = naxes > 1 ? c1 : 1;
    p.cells2 = naxes > 2 ? c2 : 1;
    p.stride1 = naxes > 1 ? static_cast<std::size_t>(n0) : 0;
    p.stride2 = naxes > 2 ? static_cast<std::size_t>(n0) * c1 : 0;
    p.n_rows = static_cast<std::size_t>(p.cells1) * p.cells2;
    for (int a = 0; a < naxes; ++a) {
        p.inv_h[a] = static_cast<double>(n0 + 8 * a);
        p.theta_half[a] = 0.55 + 0.1 * a;
    }
    p.dt = 1e-3;
    p.dt_alpha = 1e-3 * 0.25;
    p.a_vals = d.a.data();
    p.beta_case = beta_case;
    p.beta = beta_case == 0 ? 1.7 : static_cast<double>(beta_case);
    p.sx0 = 0.125;
    p.sx1 = naxes > 2 ? -0.25 : 0.0;
    p.coercive_dims = naxes > 2 ? 2 : 1;
    if (with_drift && naxes > 1) {
        p.babs_vals = d.babs.data();
        p.off_abs = -1.0;
        p.blin_vals = d.blin.data();
        p.off_lin = -1.0;
    }
    if (with_src) p.src_vals = d.src.data();
    if (with_extra) p.extra_vals = d.extra.data();
    p.v = d.v.data();
    p.out = d.out.data();
    return d;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

} // namespace

TEST_CASE("kernel selection is wired up") {
    CHECK(kern::select_step_kernel() != nullptr);
    std::string name = kern::selected_kernel_name();
    CHECK((name == "scalar" || name == "avx2"));
    if (!kern::avx2_available()) CHECK(name == "scalar");
}

TEST_CASE("simd and scalar kernels agree bit for bit") {
    if (!kern::avx2_available()) return; // nothing to compare on this host
    struct Case {
        int naxes, n0, c1, c2, beta_case;
        bool drift, src, extra;
    };
    const Case cases[] = {
        {1, 64, 1, 1, 1, false, true, false},
        {1, 67, 1, 1, 2, false, false, false}, // odd length exercises the vector tail
        {2, 32, 16, 1, 1, true, true, true},
        {2, 33, 9, 1, 0, true, false, false},
        {3, 16, 8, 8, 2, true, true, true},
        {3, 21, 5, 7, 0, false, true, false},
    };
    unsigned seed = 100;
    for (const Case& c : cases) {
        PlanData lhs = make_plan(c.naxes, c.n0, c.c1, c.c2, c.beta_case, c.drift, c.src,
                                 c.extra, seed);
        PlanData rhs = make_plan(c.naxes, c.n0, c.c1, c.c2, c.beta_case, c.drift, c.src,
                                 c.extra, seed);
        ++seed;
        REQUIRE(bitwise_equal(lhs.v, rhs.v));
        kern::step_scalar(lhs.plan, 0, lhs.plan.n_rows);
        kern::step_avx2(rhs.plan, 0, rhs.plan.n_rows);
        CHECK(bitwise_equal(lhs.out, rhs.out));
    }
}

TEST_CASE("row ranges partition the update independently") {
    PlanData whole = make_plan(2, 32, 12, 1, 1, true, true, false, 42);
    PlanData parts = make_plan(2, 32, 12, 1, 1, true, true, false, 42);
    kern::step_scalar(whole.plan, 0, whole.plan.n_rows);
    kern::step_scalar(parts.plan, 0, 5);
    kern::step_scalar(parts.plan, 5, parts.plan.n_rows);
    CHECK(bitwise_equal(whole.out, parts.out));
}

TEST_CASE("node update matches a hand-computed flux") {
    PlanData d = make_plan(1, 16, 1, 1, 1, false, false, false, 7);
    kern::StepPlan& p = d.plan;
    p.sx0 = 0.0;
    p.dt_alpha = 0.0;
    kern::step_scalar(p, 0, 1);
    const int j = 5;
    const double dm = (d.v[j] - d.v[j - 1]) * p.inv_h[0];
    const double dp = (d.v[j + 1] - d.v[j]) * p.inv_h[0];
    const double flux = d.a[j] * std::fabs((dm + dp) * 0.5) - p.theta_half[0] * (dp - dm);
    CHECK(d.out[j] == doctest::Approx(d.v[j] - p.dt * flux).epsilon(1e-15));

    // wrap-around neighbors at the row ends
    const double dm0 = (d.v[0] - d.v[15]) * p.inv_h[0];
    const double dp0 = (d.v[1] - d.v[0]) * p.inv_h[0];
    const double flux0 = d.a[0] * std::fabs((dm0 + dp0) * 0.5) - p.theta_half[0] * (dp0 - dm0);
    CHECK(d.out[0] == doctest::Approx(d.v[0] - p.dt * flux0).epsilon(1e-15));
}

TEST_CASE("marching output is independent of the thread count") {
    const HamiltonianSpec& spec = corpus_spec("drift_lneg");
    const int cells[] = {32, 32};
    TorusGrid g(1, true, cells);
    Field v0(g);
    for (std::size_t i = 0; i < v0.size(); ++i) {
        auto idx = g.unravel(i);
        v0[i] = std::sin(kTwoPi * g.coord(0, idx[0])) * std::cos(kTwoPi * g.coord(1, idx[1]));
    }
    SchemeConfig cfg;

    set_thread_count(1);
    Field serial = evolve(spec, v0, 0.0, 0.1, cfg);
    set_thread_count(3);
    Field threaded = evolve(spec, v0, 0.0, 0.1, cfg);
    set_thread_count(0);

    CHECK(sup_abs_diff(serial, threaded) == 0.0);
}
