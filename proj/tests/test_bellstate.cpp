#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bsa/bellstate.hpp"

using namespace bsa;
using namespace bsa::bell;
using coupler::TransferCoefficients;

namespace {

TransferCoefficients balanced() {
    const double s = 1.0 / std::sqrt(2.0);
    return {s, s, s, s, 1.0, 1.0};
}

TransferCoefficients from_angles(double th, double tv) {
    return {std::abs(std::cos(th)), std::abs(std::sin(th)), std::abs(std::cos(tv)),
            std::abs(std::sin(tv)), 1.0, 1.0};
}

// The Fig. 5(b,c) caption splittings: 49.7/48.9 (TE), 50.7/48.3 (TM).
TransferCoefficients paper_point() {
    return transfer_from_splits(0.497, 0.489, 0.507, 0.483);
}

}  // namespace

TEST_CASE("heralded state closed form") {
    SECTION("balanced splitter heralds the singlet exactly") {
        const Eigen::Vector4d psi = heralded_state_closed_form(balanced());
        REQUIRE(std::abs(psi.dot(singlet_state())) == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("bar state heralds a product state") {
        const TransferCoefficients tc{1.0, 0.0, 1.0, 0.0, 1.0, 1.0};
        const Eigen::Vector4d psi = heralded_state_closed_form(tc);
        REQUIRE(std::abs(psi[1]) == Catch::Approx(1.0).margin(1e-12));  // |up,down>
        REQUIRE(psi.norm() == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("matched products give a unit-fidelity state") {
        // r_h r_v == t_h t_v without balance: th = 0.3, tv chosen so that
        // cos(th) cos(tv) = sin(th) sin(tv) -> tv = pi/2 - th.
        const TransferCoefficients tc = from_angles(0.3, kPi / 2 - 0.3);
        const FidelityReport rep = fidelity_closed_form(tc);
        REQUIRE(rep.fidelity == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("vanishing products are an error") {
        const TransferCoefficients tc{1.0, 0.0, 0.0, 1.0, 1.0, 1.0};
        REQUIRE_THROWS_AS(heralded_state_closed_form(tc), numerical_error);
    }
}

TEST_CASE("fidelity closed form (Eq. 3 shape)") {
    SECTION("balanced gives F = 1, E = 0") {
        const FidelityReport rep = fidelity_closed_form(balanced());
        REQUIRE(rep.fidelity == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(rep.error == Catch::Approx(0.0).margin(1e-12));
    }

    SECTION("fully polarizing splitter gives F = 1/2") {
        const TransferCoefficients tc{1.0, 0.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0),
                                      1.0, 1.0};
        REQUIRE(fidelity_closed_form(tc).fidelity == Catch::Approx(0.5).margin(1e-12));
    }

    SECTION("paper operating point: E around 2.6e-4") {
        const FidelityReport rep = fidelity_closed_form(paper_point());
        REQUIRE(rep.error > 1.5e-4);
        REQUIRE(rep.error < 3.5e-4);
        REQUIRE(rep.error == Catch::Approx(2.617e-4).epsilon(0.01));
    }

    SECTION("E = 1 - F identically") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.0, kPi / 2);
        for (int k = 0; k < 200; ++k) {
            const FidelityReport rep = fidelity_closed_form(from_angles(u(rng), u(rng)));
            REQUIRE(rep.error == 1.0 - rep.fidelity);
        }
    }

    SECTION("exchange symmetry in h/v and t/r") {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> u(0.05, kPi / 2 - 0.05);
        for (int k = 0; k < 200; ++k) {
            const double th = u(rng), tv = u(rng);
            const TransferCoefficients a = from_angles(th, tv);
            TransferCoefficients swapped_hv = from_angles(tv, th);
            TransferCoefficients swapped_tr{a.r_h, a.t_h, a.r_v, a.t_v, 1.0, 1.0};
            const double f = fidelity_closed_form(a).fidelity;
            REQUIRE(fidelity_closed_form(swapped_hv).fidelity == Catch::Approx(f).margin(1e-12));
            REQUIRE(fidelity_closed_form(swapped_tr).fidelity == Catch::Approx(f).margin(1e-12));
        }
    }

    SECTION("F >= 1/2 whenever the product sum is positive") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(0.01, kPi / 2 - 0.01);
        for (int k = 0; k < 1000; ++k) {
            const FidelityReport rep = fidelity_closed_form(from_angles(u(rng), u(rng)));
            REQUIRE(rep.fidelity >= 0.5 - 1e-12);
        }
    }
}

TEST_CASE("Fock-space oracle") {
    SECTION("balanced splitter: F = 1, coincidence probability 1/4") {
        // Exhaustive enumeration of the two-photon interference: the
        // opposite-polarization sectors (probability 1/2) split across ports
        // half the time; same-polarization sectors bunch completely.
        const FidelityReport rep = oracle_coincidence(balanced());
        REQUIRE(rep.fidelity == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(rep.coincidence_probability == Catch::Approx(0.25).margin(1e-12));
        const FidelityReport bucket =
            oracle_coincidence(balanced(), {}, DetectionModel::bucket_coincidence);
        REQUIRE(bucket.fidelity == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(bucket.coincidence_probability == Catch::Approx(0.25).margin(1e-12));
    }

    SECTION("oracle equals the closed form for resolving detection") {
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> u(0.0, kPi / 2);
        for (int k = 0; k < 1000; ++k) {
            const TransferCoefficients tc = from_angles(u(rng), u(rng));
            if (tc.r_h * tc.r_v == 0 && tc.t_h * tc.t_v == 0) continue;
            const double f_closed = fidelity_closed_form(tc).fidelity;
            const double f_oracle = oracle_coincidence(tc).fidelity;
            REQUIRE(f_oracle == Catch::Approx(f_closed).margin(1e-12));
        }
    }

    SECTION("bucket detection never beats the closed form; equal at balance") {
        std::mt19937_64 rng(29);
        std::uniform_real_distribution<double> u(0.05, kPi / 2 - 0.05);
        for (int k = 0; k < 1000; ++k) {
            const TransferCoefficients tc = from_angles(u(rng), u(rng));
            const double f_closed = fidelity_closed_form(tc).fidelity;
            const double f_bucket =
                oracle_coincidence(tc, {}, DetectionModel::bucket_coincidence).fidelity;
            REQUIRE(f_bucket <= f_closed + 1e-12);
        }
        const double fb =
            oracle_coincidence(balanced(), {}, DetectionModel::bucket_coincidence).fidelity;
        REQUIRE(fb == Catch::Approx(fidelity_closed_form(balanced()).fidelity).margin(1e-14));
    }

    SECTION("bucket-mode error at the paper splits is about 1e-3") {
        const FidelityReport rep =
            oracle_coincidence(paper_point(), {}, DetectionModel::bucket_coincidence);
        REQUIRE(rep.error == Catch::Approx(9.2e-4).epsilon(0.05));
        REQUIRE(rep.error > fidelity_closed_form(paper_point()).error);
    }

    SECTION("heralded density matrices are sane") {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> u(0.05, kPi / 2 - 0.05);
        for (auto det : {DetectionModel::opposite_polarization_resolving,
                         DetectionModel::bucket_coincidence})
            for (int k = 0; k < 300; ++k) {
                const FidelityReport rep = oracle_coincidence(from_angles(u(rng), u(rng)), {}, det);
                const Eigen::Matrix4d& rho = rep.heralded_state;
                REQUIRE(rho.trace() == Catch::Approx(1.0).margin(1e-12));
                REQUIRE((rho - rho.transpose()).norm() < 1e-12);
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(rho);
                REQUIRE(es.eigenvalues().minCoeff() > -1e-12);
            }
    }

    SECTION("scale invariance under common path weights") {
        const TransferCoefficients tc = from_angles(0.9, 0.6);
        const double f0 = oracle_coincidence(tc).fidelity;
        for (double s : {0.9, 0.5, 0.2}) {
            InputWeights w{s, s, s, s};
            const FidelityReport rep = oracle_coincidence(tc, w);
            REQUIRE(rep.fidelity == Catch::Approx(f0).margin(1e-12));
        }
    }

    SECTION("zero coincidence probability is an explicit error") {
        const TransferCoefficients tc{1.0, 0.0, 0.0, 1.0, 1.0, 1.0};
        // t_h = 1, r_v = 1: the H photon always exits port 3 and the V photon
        // always exits port 3 as well -> never a cross-port coincidence.
        REQUIRE_THROWS_AS(oracle_coincidence(tc), numerical_error);
    }
}

TEST_CASE("error_with_coupling") {
    SECTION("common efficiency cancels exactly") {
        const TransferCoefficients tc = paper_point();
        const double e0 = fidelity_closed_form(tc).error;
        for (double eta : {1.0, 0.66, 0.1}) {
            const FidelityReport rep = error_with_coupling(tc, eta, eta);
            REQUIRE(rep.error == Catch::Approx(e0).margin(1e-12));
        }
    }

    SECTION("paper efficiencies keep the error near 2.5e-4") {
        const FidelityReport rep = error_with_coupling(paper_point(), 0.6616, 0.6552);
        REQUIRE(std::abs(rep.error - 2.54e-4) < 1e-4);
        // For opposite-polarization-resolving detection every coincidence
        // pairs one H with one V photon, so per-polarization efficiencies
        // factor out of the heralded state entirely.
        REQUIRE(rep.error ==
                Catch::Approx(fidelity_closed_form(paper_point()).error).margin(1e-12));
    }

    SECTION("one polarization going dark starves the coincidence rate") {
        const TransferCoefficients tc = paper_point();
        const FidelityReport rep = error_with_coupling(tc, 1.0, 1e-6);
        REQUIRE(rep.coincidence_probability < 1e-5);
        REQUIRE(rep.fidelity ==
                Catch::Approx(fidelity_closed_form(tc).fidelity).margin(1e-9));
    }

    SECTION("eta outside (0, 1] is rejected") {
        REQUIRE_THROWS_AS(error_with_coupling(paper_point(), 0.0, 0.5),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(error_with_coupling(paper_point(), 0.5, 1.5),
                          std::invalid_argument);
    }
}
