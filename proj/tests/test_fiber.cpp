#include <catch2/catch_amalgamated.hpp>

#include "bsa/fiber.hpp"

using namespace bsa;
using namespace bsa::fiber;
using geometry::GridSpec;

namespace {

GridSpec fine_grid(double half_width, double d = 0.005) {
    GridSpec g;
    g.dx = g.dy = d;
    g.nx = g.ny = static_cast<int>(std::round(2 * half_width / d));
    g.x0 = -half_width;
    g.y0 = -half_width;
    return g;
}

}  // namespace

TEST_CASE("gaussian beam waist convention") {
    GaussianBeam beam{0.6, 0.49355};
    REQUIRE(beam.waist() == Catch::Approx(0.49355 / (kPi * 0.6)).epsilon(1e-14));
    REQUIRE(beam.waist() == Catch::Approx(0.2618).epsilon(1e-3));
    REQUIRE_FALSE(beam.beyond_paper_range());
    REQUIRE(GaussianBeam{0.7, 0.49355}.beyond_paper_range());
    REQUIRE_THROWS_AS((GaussianBeam{-0.1, 0.49355}.validate()), std::invalid_argument);
}

TEST_CASE("gaussian_field sampling and normalization") {
    GaussianBeam beam{0.4, 0.49355};
    const GridSpec g = fine_grid(2.0);
    const ScalarField f = gaussian_field(beam, g, Polarization::TE, 0.0, 0.0);

    SECTION("unit power") {
        REQUIRE(f.values.square().sum() * g.dx * g.dy == Catch::Approx(1.0).margin(1e-10));
    }

    SECTION("peak at the center, 1/e amplitude at one waist") {
        double peak = 0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) peak = std::max(peak, f.values(j, i));
        // closest sample to (w0, 0)
        const double w0 = beam.waist();
        int ib = 0, jb = 0;
        double best = 1e9;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double d2 = square(g.x_center(i) - w0) + square(g.y_node(j));
                if (d2 < best) {
                    best = d2;
                    ib = i;
                    jb = j;
                }
            }
        REQUIRE(f.values(jb, ib) / peak == Catch::Approx(std::exp(-1.0)).epsilon(0.05));
    }

    SECTION("window must be at least 6 waists wide") {
        GaussianBeam wide{0.05, 0.49355};  // w0 = 3.14 um
        REQUIRE_THROWS_WITH(gaussian_field(wide, g, Polarization::TE, 0.0, 0.0),
                            Catch::Matchers::ContainsSubstring("6 w0"));
    }
}

TEST_CASE("overlap integral") {
    const GridSpec g = fine_grid(2.5);

    SECTION("self-overlap is unity") {
        const ScalarField f =
            gaussian_field(GaussianBeam{0.5, 0.49355}, g, Polarization::TE, 0.0, 0.0);
        REQUIRE(overlap(f, f) == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("two centered gaussians match the closed form to 1e-6") {
        // eta = (2 w1 w2 / (w1^2 + w2^2))^2
        const GaussianBeam b1{0.5, 0.49355}, b2{0.25, 0.49355};
        const double w1 = b1.waist(), w2 = b2.waist();
        const ScalarField f1 = gaussian_field(b1, g, Polarization::TM, 0.0, 0.0);
        const ScalarField f2 = gaussian_field(b2, g, Polarization::TM, 0.0, 0.0);
        const double expected = square(2 * w1 * w2 / (w1 * w1 + w2 * w2));
        REQUIRE(overlap(f1, f2) == Catch::Approx(expected).margin(1e-6));
    }

    SECTION("far-offset gaussian has negligible overlap") {
        const GaussianBeam b{0.6, 0.49355};
        const ScalarField a = gaussian_field(b, g, Polarization::TE, -1.8, 0.0);
        const ScalarField c = gaussian_field(b, g, Polarization::TE, 1.8, 0.0);
        REQUIRE(overlap(a, c) < 1e-6);
    }

    SECTION("grid mismatch is rejected") {
        const ScalarField a =
            gaussian_field(GaussianBeam{0.5, 0.49355}, g, Polarization::TE, 0.0, 0.0);
        const ScalarField b = gaussian_field(GaussianBeam{0.5, 0.49355}, fine_grid(2.0),
                                             Polarization::TE, 0.0, 0.0);
        REQUIRE_THROWS_AS(overlap(a, b), std::invalid_argument);
    }
}

TEST_CASE("core centroid sits inside the film") {
    geometry::MaterialStack stack;
    geometry::RibWaveguide rib{0.475, 0.110, 75.0};
    auto [cx, cy] = core_centroid(rib, stack);
    REQUIRE(cx == 0.0);
    REQUIRE(cy > 0.0);
    REQUIRE(cy < stack.film_thickness);
}

TEST_CASE("na_sweep basics", "[solver][rib]") {
    geometry::MaterialStack stack;
    geometry::RibWaveguide rib{0.475, 0.110, 75.0};
    geometry::RasterParams p;
    p.dx = p.dy = 0.025;
    p.margin = 2.5;

    SECTION("single sample returns exactly one row") {
        const auto rows = na_sweep(rib, stack, p, 0.6, 0.6, 1);
        REQUIRE(rows.size() == 1);
        REQUIRE(rows[0].na == 0.6);
        REQUIRE(rows[0].eta_te > 0.0);
        REQUIRE(rows[0].eta_te <= 1.0);
        REQUIRE(rows[0].eta_tm > 0.0);
        REQUIRE(rows[0].eta_tm <= 1.0);
    }

    SECTION("efficiencies rise with NA and stay polarization-balanced") {
        const auto rows = na_sweep(rib, stack, p, 0.25, 0.6, 5);
        REQUIRE(rows.size() == 5);
        for (size_t k = 1; k < rows.size(); ++k) {
            REQUIRE(rows[k].eta_te > rows[k - 1].eta_te);
            REQUIRE(rows[k].eta_tm > rows[k - 1].eta_tm);
        }
        for (const auto& r : rows) REQUIRE(std::abs(r.eta_te - r.eta_tm) <= 0.05);
    }
}
