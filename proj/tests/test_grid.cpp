#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <vector>

#include "hamhom/errors.hpp"
#include "hamhom/grid.hpp"

using namespace hamhom;

TEST_CASE("axis layout and strides") {
    TorusGrid g(2, true, std::array{8, 16, 32});
    CHECK(g.axes() == 3);
    CHECK(g.space_dims() == 2);
    CHECK(g.has_y_axis());
    CHECK(g.y_axis() == 2);
    CHECK(g.node_count() == 8u * 16 * 32);
    CHECK(g.stride(0) == 1u);
    CHECK(g.stride(1) == 8u);
    CHECK(g.stride(2) == 128u);
    CHECK(g.spacing(0) == doctest::Approx(1.0 / 8));
    CHECK(g.coord(1, 3) == doctest::Approx(3.0 / 16));
}

TEST_CASE("unravel inverts flat indexing") {
    TorusGrid g(1, true, std::array{9, 11});
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        auto ix = g.unravel(n);
        CHECK(ix[0] + 9 * ix[1] == static_cast<int>(n));
    }
}

TEST_CASE("wrap handles both directions") {
    TorusGrid g(1, false, std::array{8});
    CHECK(g.wrap(0, 8) == 0);
    CHECK(g.wrap(0, -1) == 7);
    CHECK(g.wrap(0, 13) == 5);
    CHECK(g.wrap(0, -9) == 7);
}

TEST_CASE("custom periods rescale spacing") {
    TorusGrid g(1, false, std::array{8}, std::array{2.0});
    CHECK(g.period(0) == 2.0);
    CHECK(g.spacing(0) == doctest::Approx(0.25));
    CHECK(g.coord(0, 4) == doctest::Approx(1.0));
}

TEST_CASE("grid construction rejects bad shapes") {
    CHECK_THROWS_AS(TorusGrid(0, false, std::array{16}), ConfigError);
    CHECK_THROWS_AS(TorusGrid(3, true, std::array{16, 16, 16, 16}), ConfigError);
    CHECK_THROWS_AS(TorusGrid(1, false, std::array{4}), ConfigError);
    CHECK_THROWS_AS(TorusGrid(2, false, std::array{16}), ConfigError);
    CHECK_THROWS_AS(TorusGrid(1, false, std::array{16}, std::array{-1.0}), ConfigError);
}

TEST_CASE("y-axis accessor guards absence") {
    TorusGrid g(2, false, std::array{16, 16});
    CHECK_THROWS_AS((void)g.y_axis(), ConfigError);
}

TEST_CASE("field reductions are exact on known data") {
    TorusGrid g(1, false, std::array{8});
    Field f(g, std::vector<double>{-1.0, 0.25, 3.0, 0.75, 0.5, -0.5, 1.0, 4.0});
    CHECK(field_min(f) == -1.0);
    CHECK(field_max(f) == 4.0);
    CHECK(oscillation(f) == 5.0);
    CHECK(field_mean(f) == doctest::Approx(1.0));
}

TEST_CASE("field value count must match the grid") {
    TorusGrid g(1, false, std::array{8});
    CHECK_THROWS_AS(Field(g, std::vector<double>(7, 0.0)), ConfigError);
}

TEST_CASE("sup_abs_diff requires matching sizes") {
    TorusGrid a(1, false, std::array{8});
    TorusGrid b(1, false, std::array{16});
    Field fa(a), fb(b);
    CHECK_THROWS_AS((void)sup_abs_diff(fa, fb), ConfigError);
    Field fc(a, 2.0), fd(a, -1.5);
    CHECK(sup_abs_diff(fc, fd) == 3.5);
}

TEST_CASE("reduce_max_over_y collapses the last axis") {
    TorusGrid g(1, true, std::array{8, 8});
    Field f(g, -2.0);
    f[3 + 8 * 5] = 7.0;  // x = 3, y = 5
    f[0 + 8 * 2] = 1.0;  // x = 0, y = 2
    Field r = reduce_max_over_y(f);
    REQUIRE(r.size() == 8);
    CHECK(r[3] == 7.0);
    CHECK(r[0] == 1.0);
    CHECK(r[1] == -2.0);
    CHECK_FALSE(r.grid().has_y_axis());

    TorusGrid flat(1, false, std::array{8});
    Field g2(flat);
    CHECK_THROWS_AS((void)reduce_max_over_y(g2), ConfigError);
}

TEST_CASE("without_y keeps spatial axes and periods") {
    TorusGrid g(1, true, std::array{8, 16}, std::array{3.0, 1.0});
    TorusGrid x = g.without_y();
    CHECK(x.axes() == 1);
    CHECK(x.cells(0) == 8);
    CHECK(x.period(0) == 3.0);
}

TEST_CASE("all_finite flags poisoned fields") {
    TorusGrid g(1, false, std::array{8});
    Field f(g, 1.0);
    CHECK(f.all_finite());
    f[2] = std::nan("");
    CHECK_FALSE(f.all_finite());
}
