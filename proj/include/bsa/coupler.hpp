#pragma once

// Device-level coupled-mode model: sinusoidal straight-section splitting,
// S-bend accumulated coupling angle, per-polarization transfer coefficients
// and the zeta/delta polarization-dependence metrics.

#include <algorithm>
#include <cmath>
#include <vector>

#include "bsa/core.hpp"
#include "bsa/geometry.hpp"

namespace bsa::coupler {

using geometry::DeviceSpec;
using geometry::SBendProfile;

/// Gap-parameterized supermode splittings with log-linear interpolation.
/// Beyond the largest tabulated gap a least-squares exponential fit takes
/// over, hard-floored to zero at 3 um separation where coupling is dead.
class DeltaNTable {
public:
    struct Entry {
        double gap;       // um
        double delta_te;  // supermode splitting, TE
        double delta_tm;
    };

    static constexpr double kSeparationFloor = 3.0;  // um

    DeltaNTable() = default;
    explicit DeltaNTable(std::vector<Entry> entries) : entries_(std::move(entries)) {
        if (entries_.size() < 2)
            throw std::invalid_argument("DeltaNTable: need at least 2 entries");
        for (size_t k = 0; k < entries_.size(); ++k) {
            if (entries_[k].delta_te <= 0 || entries_[k].delta_tm <= 0)
                throw std::invalid_argument("DeltaNTable: splittings must be positive");
            if (k > 0 && entries_[k].gap <= entries_[k - 1].gap)
                throw std::invalid_argument("DeltaNTable: gaps must be strictly increasing");
        }
        fit_exponential_tail();
    }

    const std::vector<Entry>& entries() const { return entries_; }
    double min_gap() const { return entries_.front().gap; }
    double max_gap() const { return entries_.back().gap; }

    double delta_n(Polarization pol, double gap) const {
        if (gap >= kSeparationFloor) return 0.0;
        if (gap < min_gap() - 1e-12)
            throw std::invalid_argument("DeltaNTable: gap " + fmt_g(gap) +
                                        " um below tabulated range");
        if (gap > max_gap()) {
            const auto& [a, b] = pol == Polarization::TE ? fit_te_ : fit_tm_;
            return std::exp(a + b * gap);
        }
        // log-linear interpolation; exact at the table nodes
        auto it = std::lower_bound(entries_.begin(), entries_.end(), gap,
                                   [](const Entry& e, double g) { return e.gap < g; });
        if (it == entries_.begin()) ++it;
        const Entry& hi = *it;
        const Entry& lo = *(it - 1);
        const double vlo = pol == Polarization::TE ? lo.delta_te : lo.delta_tm;
        const double vhi = pol == Polarization::TE ? hi.delta_te : hi.delta_tm;
        if (gap == lo.gap) return vlo;
        if (gap == hi.gap) return vhi;
        const double t = (gap - lo.gap) / (hi.gap - lo.gap);
        return std::exp((1.0 - t) * std::log(vlo) + t * std::log(vhi));
    }

private:
    std::vector<Entry> entries_;
    std::pair<double, double> fit_te_{0, 0}, fit_tm_{0, 0};  // ln dn = a + b g

    void fit_exponential_tail() {
        auto fit = [&](auto value) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            const double n = static_cast<double>(entries_.size());
            for (const Entry& e : entries_) {
                const double x = e.gap, y = std::log(value(e));
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
            const double denom = n * sxx - sx * sx;
            const double b = denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;
            const double a = (sy - b * sx) / n;
            return std::pair<double, double>{a, b};
        };
        fit_te_ = fit([](const Entry& e) { return e.delta_te; });
        fit_tm_ = fit([](const Entry& e) { return e.delta_tm; });
    }
};

/// Whole-device amplitude transfer per polarization (t into port 3, r into
/// port 4). The lossless coupled-mode core satisfies t^2 + r^2 = 1; bend
/// transmissions ride along as separate amplitude factors and never change
/// the splitting ratio.
struct TransferCoefficients {
    double t_h = 0, r_h = 0;  // horizontal = TE
    double t_v = 0, r_v = 0;  // vertical = TM
    double transmission_factor_te = 1.0;  // amplitude factor of the 2-bend path
    double transmission_factor_tm = 1.0;
};

/// Normalized port powers per polarization (lossless model: P3 + P4 = 1).
struct SplitResult {
    double p3_te = 0, p4_te = 0;
    double p3_tm = 0, p4_tm = 0;
};

/// P3 = cos^2(pi dn Lc / lambda0), P4 = sin^2, normalized to unit input.
inline std::pair<double, double> straight_split(double delta_n, double coupling_length,
                                                double wavelength) {
    if (!(delta_n > 0)) throw std::invalid_argument("straight_split: delta_n must be > 0");
    if (coupling_length < 0)
        throw std::invalid_argument("straight_split: coupling_length must be >= 0");
    const double theta = kPi * delta_n * coupling_length / wavelength;
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * c, s * s};
}

/// Coupling angle accumulated along one S-bend,
/// theta = int_0^Ls pi dn(gap(z)) / lambda0 dz, by composite Simpson rule.
inline double bend_accumulated_angle(const DeltaNTable& table, const SBendProfile& profile,
                                     double wavelength, Polarization pol) {
    profile.validate();
    if (table.min_gap() > profile.end_gap + 1e-12)
        throw std::invalid_argument(
            "bend_accumulated_angle: table does not cover the bend end gap " +
            fmt_g(profile.end_gap) + " um");
    int n = std::max(profile.samples, 16);
    if (n % 2) ++n;
    const double h = profile.bend_length / n;
    auto f = [&](double z) {
        return kPi * table.delta_n(pol, geometry::sbend_gap(z, profile)) / wavelength;
    };
    double acc = f(0.0) + f(profile.bend_length);
    for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(k * h);
    return acc * h / 3.0;
}

/// Total rotation angle of the device for one polarization: both S-bends
/// plus the straight coupling region.
inline double device_angle(const DeviceSpec& device, const DeltaNTable& table,
                           Polarization pol) {
    device.validate();
    if (std::abs(device.sbend.end_gap - device.pair.gap) > 1e-9)
        throw std::invalid_argument("device_transfer: S-bend end gap (" +
                                    fmt_g(device.sbend.end_gap) +
                                    ") does not match the pair gap (" +
                                    fmt_g(device.pair.gap) + ")");
    const double lambda = device.stack.wavelength;
    const double bend = bend_accumulated_angle(table, device.sbend, lambda, pol);
    const double dn = table.delta_n(pol, device.pair.gap);
    return 2.0 * bend + kPi * dn * device.coupling_length / lambda;
}

inline TransferCoefficients device_transfer(const DeviceSpec& device,
                                            const DeltaNTable& table) {
    TransferCoefficients tc;
    const double th = device_angle(device, table, Polarization::TE);
    const double tv = device_angle(device, table, Polarization::TM);
    tc.t_h = std::abs(std::cos(th));
    tc.r_h = std::abs(std::sin(th));
    tc.t_v = std::abs(std::cos(tv));
    tc.r_v = std::abs(std::sin(tv));
    // One S-bend transmits the given power fraction; a port-to-port path
    // crosses two bends, so the amplitude factor equals that fraction.
    tc.transmission_factor_te = device.bend_transmission_te;
    tc.transmission_factor_tm = device.bend_transmission_tm;
    return tc;
}

inline SplitResult split_result(const TransferCoefficients& tc) {
    return {square(tc.t_h), square(tc.r_h), square(tc.t_v), square(tc.r_v)};
}

/// Signed polarization dependence of the port-3 power.
inline double zeta(const SplitResult& split) { return split.p3_te - split.p3_tm; }

/// RMS of zeta over uniformly sampled coupling lengths in [lc_min, lc_max].
inline double delta(const DeviceSpec& device, const DeltaNTable& table, double lc_min = 1.0,
                    double lc_max = 25.0, int samples = 97) {
    if (samples < 2) throw std::invalid_argument("delta: samples must be >= 2");
    // The bend angles are Lc-independent: accumulate them once.
    DeviceSpec d = device;
    d.coupling_length = 0.0;
    const double bend_te = device_angle(d, table, Polarization::TE);
    const double bend_tm = device_angle(d, table, Polarization::TM);
    const double rate_te = kPi * table.delta_n(Polarization::TE, device.pair.gap) /
                           device.stack.wavelength;
    const double rate_tm = kPi * table.delta_n(Polarization::TM, device.pair.gap) /
                           device.stack.wavelength;
    double acc = 0;
    for (double lc : linspace(lc_min, lc_max, samples)) {
        const double z =
            square(std::cos(bend_te + rate_te * lc)) - square(std::cos(bend_tm + rate_tm * lc));
        acc += z * z;
    }
    return std::sqrt(acc / samples);
}

}  // namespace bsa::coupler
