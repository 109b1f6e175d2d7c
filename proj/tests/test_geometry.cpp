#include <catch2/catch_amalgamated.hpp>

#include "bsa/geometry.hpp"
#include "bsa/raster.hpp"

using namespace bsa;
using namespace bsa::geometry;

namespace {
MaterialStack paper_stack() { return MaterialStack{}; }
RibWaveguide paper_rib() { return RibWaveguide{0.475, 0.110, 75.0}; }
}  // namespace

TEST_CASE("rib_polygon dimensions") {
    MaterialStack stack = paper_stack();
    RibWaveguide rib = paper_rib();

    SECTION("75 degree sidewalls widen the base") {
        // independent hand computation: 475 + 2*110/tan(75 deg) = 533.949 nm
        const double expected = 0.475 + 2.0 * 0.110 * std::cos(75.0 * kPi / 180.0) /
                                            std::sin(75.0 * kPi / 180.0);
        REQUIRE(rib.bottom_width() == Catch::Approx(expected).epsilon(1e-12));
        REQUIRE(rib.bottom_width() == Catch::Approx(0.5339492402).epsilon(1e-8));
        const Polygon p = rib_polygon(rib, stack);
        REQUIRE(p.size() == 4);
        REQUIRE(p[1].x - p[0].x == Catch::Approx(rib.bottom_width()));
        REQUIRE(p[2].x - p[3].x == Catch::Approx(rib.width));
        REQUIRE(p[0].y == Catch::Approx(stack.film_thickness - rib.etch_depth));
        REQUIRE(p[2].y == Catch::Approx(stack.film_thickness));
    }

    SECTION("vertical sidewalls give a rectangle") {
        rib.sidewall_angle = 90.0;
        REQUIRE(rib.bottom_width() == Catch::Approx(0.475).margin(1e-15));
    }

    SECTION("full etch leaves no slab") {
        rib.etch_depth = stack.film_thickness;
        REQUIRE(rib.slab_thickness(stack) == Catch::Approx(0.0).margin(1e-15));
    }

    SECTION("etch deeper than the film is rejected") {
        rib.etch_depth = stack.film_thickness + 0.001;
        REQUIRE_THROWS_AS(rib_polygon(rib, stack), std::invalid_argument);
    }
}

TEST_CASE("sbend_gap raised-cosine profile") {
    SBendProfile prof;
    prof.start_separation = 2.0;
    prof.end_gap = 0.040;
    prof.bend_length = 30.0;

    REQUIRE(sbend_gap(0.0, prof) == Catch::Approx(2.0).epsilon(1e-14));
    REQUIRE(sbend_gap(prof.bend_length, prof) == Catch::Approx(0.040).margin(1e-14));
    REQUIRE(sbend_gap(prof.bend_length / 2, prof) == Catch::Approx(1.020).epsilon(1e-14));
    REQUIRE_THROWS_AS(sbend_gap(-0.1, prof), std::invalid_argument);
    REQUIRE_THROWS_AS(sbend_gap(prof.bend_length + 0.1, prof), std::invalid_argument);

    SECTION("monotone non-increasing") {
        double prev = sbend_gap(0.0, prof);
        for (int k = 1; k <= 200; ++k) {
            const double g = sbend_gap(prof.bend_length * k / 200.0, prof);
            REQUIRE(g <= prev + 1e-15);
            prev = g;
        }
    }

    SECTION("C1 at the endpoints: finite-difference slope vanishes") {
        double prev_slope = 1e9;
        for (double h : {1e-2, 1e-3, 1e-4}) {
            const double s0 = (sbend_gap(h, prof) - sbend_gap(0.0, prof)) / h;
            const double s1 =
                (sbend_gap(prof.bend_length, prof) - sbend_gap(prof.bend_length - h, prof)) / h;
            REQUIRE(std::abs(s0) < prev_slope);
            REQUIRE(std::abs(s1) < std::abs(s0) * 10 + 1e-6);
            prev_slope = std::abs(s0);
        }
        REQUIRE(prev_slope < 1e-3);
    }
}

TEST_CASE("rasterize fill fractions") {
    MaterialStack stack = paper_stack();
    RasterParams params;

    SECTION("cladding-only window is uniform") {
        LayerStack layers{stack, {}};
        const IndexMap map = rasterize(layers, params);
        for (double v : map.n2) REQUIRE(v == Catch::Approx(square(stack.n_clad)).epsilon(1e-15));
    }

    SECTION("cells fully inside the rib are core") {
        const IndexMap map = rasterize(paper_rib(), stack, params);
        bool found = false;
        for (int j = 0; j < map.grid.ny; ++j)
            for (int i = 0; i < map.grid.nx; ++i)
                if (std::abs(map.grid.x_center(i)) < 0.15 &&
                    map.grid.y_center(j) > 0.21 && map.grid.y_center(j) < 0.28) {
                    REQUIRE(map.n2[map.idx(i, j)] == Catch::Approx(square(stack.n_core)));
                    found = true;
                }
        REQUIRE(found);
    }

    SECTION("half-covered cell averages arithmetically for tangential components") {
        // Vertical sidewall (90 deg) placed through a cell center: the strip
        // edge at x = 0.235 um bisects the cell [0.23, 0.24].
        RibWaveguide strip{0.470, stack.film_thickness, 90.0};
        const IndexMap map = rasterize(strip, stack, params);
        const int i = static_cast<int>(std::round((0.230 - map.grid.x0) / map.grid.dx));
        const int j = map.grid.ny / 2;
        REQUIRE(map.grid.y_center(j) > 0.0);
        REQUIRE(map.grid.y_center(j) < stack.film_thickness);
        REQUIRE(map.fill[map.idx(i, j)] == Catch::Approx(0.5).margin(1e-12));
        const double arith = 0.5 * (square(stack.n_core) + square(stack.n_clad));
        REQUIRE(map.eps_for_ez(i, j) == Catch::Approx(arith).epsilon(1e-13));
        REQUIRE(map.eps_for_ey(i, j) == Catch::Approx(arith).epsilon(1e-13));
        // Normal component (Ex) is harmonically averaged at this x-normal cut.
        const double harm = 1.0 / (0.5 / square(stack.n_core) + 0.5 / square(stack.n_clad));
        REQUIRE(map.eps_for_ex(i, j) == Catch::Approx(harm).epsilon(1e-13));
    }

    SECTION("every cell value lies between the cladding and core permittivity") {
        const IndexMap map = rasterize(paper_rib(), stack, params);
        for (double v : map.n2) {
            REQUIRE(v >= square(stack.n_clad) - 1e-12);
            REQUIRE(v <= square(stack.n_core) + 1e-12);
        }
    }
}

TEST_CASE("rasterize pair maps are exactly mirror symmetric") {
    MaterialStack stack = paper_stack();
    CoupledPair pair{paper_rib(), 0.065};
    RasterParams params;
    const IndexMap map = rasterize(pair, stack, params);
    REQUIRE(map.mirror_symmetric);
    // mid-plane on the central grid node
    REQUIRE(map.grid.x0 == Catch::Approx(-map.grid.nx * map.grid.dx / 2).margin(1e-15));
    for (int j = 0; j < map.grid.ny; ++j)
        for (int i = 0; i < map.grid.nx; ++i) {
            REQUIRE(map.fill[map.idx(i, j)] == map.fill[map.idx(map.grid.nx - 1 - i, j)]);
            REQUIRE(map.n2[map.idx(i, j)] == map.n2[map.idx(map.grid.nx - 1 - i, j)]);
        }
}

TEST_CASE("rasterized core area matches the analytic area exactly") {
    MaterialStack stack = paper_stack();
    RibWaveguide rib = paper_rib();
    for (double d : {0.010, 0.005, 0.0025}) {
        RasterParams params;
        params.dx = params.dy = d;
        const IndexMap map = rasterize(rib, stack, params);
        const double slab = map.grid.width() * rib.slab_thickness(stack);
        const double trap = 0.5 * (rib.width + rib.bottom_width()) * rib.etch_depth;
        REQUIRE(map.core_area() == Catch::Approx(slab + trap).epsilon(1e-10));
    }
}

TEST_CASE("rasterize rejects windows without the cladding margin") {
    MaterialStack stack = paper_stack();
    RasterParams params;
    params.margin = 1.0;  // below the 1.5 um requirement
    REQUIRE_THROWS_AS(rasterize(paper_rib(), stack, params), std::invalid_argument);

    RasterParams tight;
    tight.window_width = 2.0;  // core + 2 x 1.5 um does not fit
    REQUIRE_THROWS_WITH(rasterize(paper_rib(), stack, tight),
                        Catch::Matchers::ContainsSubstring("window too small"));
}
