#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "coag/grid.hpp"
#include "coag/initial.hpp"

using namespace coag;

TEST_CASE("geometric grid construction") {
    auto g = Grid::geometric(1.0, 16.0, 4);
    REQUIRE(g->cells() == 4);
    REQUIRE(g->edges().size() == 5);
    CHECK(g->edges().front() == 1.0);
    CHECK(g->edges().back() == 16.0);  // pinned exactly
    CHECK(g->edges()[2] == doctest::Approx(4.0));
    CHECK(g->ratio() == doctest::Approx(2.0));
    // pivots are cell midpoints
    CHECK(g->pivots()[0] == doctest::Approx(1.5));
    CHECK(g->pivots()[3] == doctest::Approx(12.0));
    CHECK(g->widths()[1] == doctest::Approx(2.0));

    CHECK_THROWS_AS(Grid::geometric(0.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(Grid::geometric(2.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(Grid::geometric(1.0, 2.0, 0), std::invalid_argument);
}

TEST_CASE("pivot lookup") {
    auto g = Grid::geometric(1.0, 16.0, 4);  // pivots ~ 1.5, 3, 6, 12
    CHECK(g->pivot_below(0.5) == Grid::npos);
    CHECK(g->pivot_below(1.5) == 0);
    CHECK(g->pivot_below(2.9) == 0);
    CHECK(g->pivot_below(7.0) == 2);
    CHECK(g->pivot_below(100.0) == 3);
}

TEST_CASE("weighted norms and L1 distance") {
    auto g = Grid::geometric(1.0, 100.0, 40);
    DistributionState a{g, 0.0, std::vector<double>(40, 2.0)};
    CHECK(weighted_norm(a, 0.0) == doctest::Approx(2.0 * 99.0));
    CHECK(weighted_norm(a, 1.0) == doctest::Approx(100.0 * 100.0 - 1.0));  // int 2 z dz

    DistributionState b = a;
    b.values[7] += 0.5;
    CHECK(l1_distance(a, b) == doctest::Approx(0.5 * g->widths()[7]));
    CHECK(l1_distance(a, a) == 0.0);

    // disjoint grids: piecewise-constant exact overlap accounting
    auto g2 = Grid::geometric(0.5, 80.0, 17);
    DistributionState c{g2, 0.0, std::vector<double>(17, 2.0)};
    CHECK(l1_distance(a, c) == doctest::Approx(2.0 * 0.5 + 2.0 * 20.0));

    DistributionState bad{g, 0.0, std::vector<double>(3, 0.0)};
    CHECK_THROWS_AS(weighted_norm(bad, 0.0), std::invalid_argument);
}

TEST_CASE("initial densities") {
    auto f = InitialDensity::exponential(2.0, 3.0);
    CHECK(f.value(1.0) == doctest::Approx(2.0 * std::exp(-3.0)));
    CHECK_THROWS_AS(f.value(0.0), std::domain_error);
    double inf = std::numeric_limits<double>::infinity();
    CHECK(f.integral(0.0, inf) == doctest::Approx(2.0 / 3.0));
    CHECK(f.mass_integral(0.0, inf) == doctest::Approx(2.0 / 9.0));
    CHECK(f.integral(1.0, 1.0) == 0.0);
    CHECK_THROWS_AS(f.integral(2.0, 1.0), std::invalid_argument);

    CHECK(InitialDensity::constant(0.5).integral(0.0, inf) == inf);
    CHECK(InitialDensity::constant(0.0).integral(0.0, inf) == 0.0);
    CHECK_THROWS_AS(InitialDensity::exponential(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(InitialDensity::exponential(1.0, 0.0), std::invalid_argument);

    SUBCASE("singular moment finiteness") {
        CHECK(f.singular_moment_finite(2.0 / 3.0));
        CHECK_FALSE(f.singular_moment_finite(1.0));
    }

    SUBCASE("tabulated interpolation is log-linear") {
        auto t = InitialDensity::tabulated({{1.0, 1.0}, {4.0, 4.0}});
        CHECK(t.value(2.0) == doctest::Approx(2.0));  // geometric mean path
        CHECK(t.value(0.5) == 0.0);
        CHECK(t.value(5.0) == 0.0);
        CHECK_THROWS_AS(InitialDensity::tabulated({{1.0, 1.0}}), std::invalid_argument);
        CHECK_THROWS_AS(InitialDensity::tabulated({{2.0, 1.0}, {1.0, 1.0}}),
                        std::invalid_argument);
        CHECK_THROWS_AS(InitialDensity::tabulated({{1.0, -1.0}, {2.0, 1.0}}),
                        std::invalid_argument);
    }
}

TEST_CASE("projection preserves per-cell particle number") {
    auto g = Grid::geometric(1e-3, 100.0, 150);
    auto f = InitialDensity::exponential(1.0, 1.0);
    DistributionState st = project_initial(f, g);
    REQUIRE(st.values.size() == 150);
    // cell averages integrate back to the exact number on the grid span
    CHECK(weighted_norm(st, 0.0) ==
          doctest::Approx(f.integral(1e-3, 100.0)).epsilon(1e-13));
    const auto& e = g->edges();
    CHECK(st.values[10] ==
          doctest::Approx(f.integral(e[10], e[11]) / g->widths()[10]).epsilon(1e-13));
}
