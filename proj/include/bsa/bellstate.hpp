#pragma once

// Quantum layer: beam-splitter relation, heralded two-ion state, fidelity
// and error, plus a brute-force two-photon Fock-space oracle that also
// covers effects the closed form omits (same-polarization coincidences,
// polarization-dependent input loss).
//
// Two-ion basis order: |up,up>, |up,down>, |down,up>, |down,down>.
// Each ion emits (|up>|V> + |down>|H>)/sqrt(2); photon a enters port 1,
// photon b port 2. The splitter acts per polarization as
//   a^dag = t c^dag + r d^dag,   b^dag = r c^dag - t d^dag.

#include <Eigen/Dense>

#include <array>
#include <cmath>

#include "bsa/core.hpp"
#include "bsa/coupler.hpp"

namespace bsa::bell {

using coupler::TransferCoefficients;

/// What counts as a coincidence between the two output-port detectors.
/// opposite_polarization_resolving accepts only cross-port clicks with
/// opposite polarizations (the model for which Eq.-style closed forms are
/// exact); bucket_coincidence accepts any cross-port click pair.
enum class DetectionModel { opposite_polarization_resolving, bucket_coincidence };

struct FidelityReport {
    double fidelity = 0;
    double error = 0;  // 1 - fidelity, exactly
    double coincidence_probability = 0;
    Eigen::Matrix4d heralded_state = Eigen::Matrix4d::Zero();
};

/// Per-ion per-polarization amplitude scalings applied before the splitter
/// (fiber coupling, collection). Unit weights model the lossless device.
struct InputWeights {
    double a_h = 1.0, a_v = 1.0;
    double b_h = 1.0, b_v = 1.0;
};

inline const Eigen::Vector4d& singlet_state() {
    static const Eigen::Vector4d psi =
        (Eigen::Vector4d() << 0, -1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0).finished();
    return psi;
}

/// Normalized heralded two-ion state of the closed-form model,
/// proportional to r_h r_v |down,up> - t_h t_v |up,down>.
inline Eigen::Vector4d heralded_state_closed_form(const TransferCoefficients& tc) {
    const double rr = tc.r_h * tc.r_v, tt = tc.t_h * tc.t_v;
    const double norm2 = rr * rr + tt * tt;
    if (norm2 <= 0)
        throw numerical_error("heralded_state: both amplitude products vanish, "
                              "no coincidences possible");
    Eigen::Vector4d psi = Eigen::Vector4d::Zero();
    psi[1] = -tt;  // |up,down>
    psi[2] = rr;   // |down,up>
    return psi / std::sqrt(norm2);
}

/// F = (r_h r_v + t_h t_v)^2 / (2 (r_h^2 r_v^2 + t_h^2 t_v^2)), E = 1 - F.
inline FidelityReport fidelity_closed_form(const TransferCoefficients& tc) {
    const double rr = tc.r_h * tc.r_v, tt = tc.t_h * tc.t_v;
    const double norm2 = rr * rr + tt * tt;
    if (norm2 <= 0)
        throw numerical_error("fidelity_closed_form: both amplitude products vanish");
    FidelityReport rep;
    rep.fidelity = 0.5 * square(rr + tt) / norm2;
    rep.error = 1.0 - rep.fidelity;
    const Eigen::Vector4d psi = heralded_state_closed_form(tc);
    rep.heralded_state = psi * psi.transpose();
    rep.coincidence_probability = 0.5 * norm2;
    return rep;
}

/// Exhaustive two-photon enumeration: builds the joint (ion x photon) state,
/// applies the splitter relation to every creation operator, projects onto
/// the detection model's coincidence subspace and traces out the photons.
/// Exact; no sampling.
inline FidelityReport oracle_coincidence(const TransferCoefficients& tc,
                                         const InputWeights& w = {},
                                         DetectionModel detection =
                                             DetectionModel::opposite_polarization_resolving) {
    for (double x : {w.a_h, w.a_v, w.b_h, w.b_v})
        if (x < 0 || x > 1) throw std::invalid_argument("oracle: weights must be in [0, 1]");

    // Output modes 0 = c_h, 1 = c_v, 2 = d_h, 3 = d_v; two-photon occupation
    // basis enumerated as mode pairs (m <= n).
    constexpr int kPairs[10][2] = {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1},
                                   {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}};
    auto pair_index = [&](int m, int n) {
        if (m > n) std::swap(m, n);
        for (int k = 0; k < 10; ++k)
            if (kPairs[k][0] == m && kPairs[k][1] == n) return k;
        return -1;
    };

    const double fh = tc.transmission_factor_te, fv = tc.transmission_factor_tm;
    Eigen::Matrix<double, 4, 10> amp = Eigen::Matrix<double, 4, 10>::Zero();
    for (int sa = 0; sa < 2; ++sa) {      // 0 = up (V photon), 1 = down (H photon)
        for (int sb = 0; sb < 2; ++sb) {
            std::array<double, 4> alpha{}, beta{};
            if (sa == 0) {
                alpha[1] = w.a_v * fv * tc.t_v;
                alpha[3] = w.a_v * fv * tc.r_v;
            } else {
                alpha[0] = w.a_h * fh * tc.t_h;
                alpha[2] = w.a_h * fh * tc.r_h;
            }
            if (sb == 0) {
                beta[1] = w.b_v * fv * tc.r_v;
                beta[3] = -w.b_v * fv * tc.t_v;
            } else {
                beta[0] = w.b_h * fh * tc.r_h;
                beta[2] = -w.b_h * fh * tc.t_h;
            }
            const int ion = 2 * sa + sb;
            for (int m = 0; m < 4; ++m)
                for (int n = 0; n < 4; ++n) {
                    const double a = alpha[m] * beta[n];
                    if (a == 0) continue;
                    // a^dag_m b^dag_n |0>: sqrt(2) for a doubly occupied mode
                    amp(ion, pair_index(m, n)) += 0.5 * (m == n ? a * std::sqrt(2.0) : a);
                }
        }
    }

    // Coincidence subspace: one photon in port 3 (modes 0,1), one in port 4
    // (modes 2,3); the resolving model additionally requires opposite
    // polarizations at the two detectors.
    std::array<int, 4> cross = {pair_index(0, 2), pair_index(0, 3), pair_index(1, 2),
                                pair_index(1, 3)};
    std::array<bool, 10> keep{};
    if (detection == DetectionModel::bucket_coincidence)
        for (int k : cross) keep[static_cast<size_t>(k)] = true;
    else {
        keep[static_cast<size_t>(pair_index(0, 3))] = true;  // (c_h, d_v)
        keep[static_cast<size_t>(pair_index(1, 2))] = true;  // (c_v, d_h)
    }

    Eigen::Matrix4d rho = Eigen::Matrix4d::Zero();
    double prob = 0;
    for (int k = 0; k < 10; ++k) {
        if (!keep[static_cast<size_t>(k)]) continue;
        rho += amp.col(k) * amp.col(k).transpose();
        prob += amp.col(k).squaredNorm();
    }
    if (prob < 1e-300)
        throw numerical_error("oracle_coincidence: zero coincidence probability");
    rho /= prob;

    FidelityReport rep;
    rep.coincidence_probability = prob;
    rep.fidelity = singlet_state().transpose() * rho * singlet_state();
    rep.error = 1.0 - rep.fidelity;
    rep.heralded_state = rho;
    return rep;
}

/// Entanglement error including fiber-coupling efficiencies: amplitude
/// weights sqrt(eta) per polarization on both ions, opposite-polarization
/// resolving detection.
inline FidelityReport error_with_coupling(const TransferCoefficients& tc, double eta_te,
                                          double eta_tm) {
    if (!(eta_te > 0 && eta_te <= 1 && eta_tm > 0 && eta_tm <= 1))
        throw std::invalid_argument("error_with_coupling: eta must be in (0, 1]");
    InputWeights w;
    w.a_h = w.b_h = std::sqrt(eta_te);
    w.a_v = w.b_v = std::sqrt(eta_tm);
    return oracle_coincidence(tc, w, DetectionModel::opposite_polarization_resolving);
}

/// Transfer coefficients from measured/simulated port splittings (fractions
/// of input power; each polarization is renormalized to t^2 + r^2 = 1, which
/// leaves the fidelity unchanged).
inline TransferCoefficients transfer_from_splits(double p3_te, double p4_te, double p3_tm,
                                                 double p4_tm) {
    auto check = [](double p) {
        if (!(p >= 0)) throw std::invalid_argument("transfer_from_splits: negative power");
    };
    check(p3_te);
    check(p4_te);
    check(p3_tm);
    check(p4_tm);
    const double se = p3_te + p4_te, sm = p3_tm + p4_tm;
    if (se <= 0 || sm <= 0)
        throw std::invalid_argument("transfer_from_splits: zero total power");
    TransferCoefficients tc;
    tc.t_h = std::sqrt(p3_te / se);
    tc.r_h = std::sqrt(p4_te / se);
    tc.t_v = std::sqrt(p3_tm / sm);
    tc.r_v = std::sqrt(p4_tm / sm);
    return tc;
}

}  // namespace bsa::bell
