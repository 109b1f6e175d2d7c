#pragma once

// Analytic 1D slab dispersion solvers. These are the independent oracles the
// finite-difference solver is validated against; they share no code with it.

#include <cmath>
#include <vector>

#include "bsa/core.hpp"

namespace bsa::modes {

namespace detail {

inline double bisect(auto&& f, double lo, double hi, double tol = 1e-13) {
    double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((flo < 0) == (fm < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Scan (n_clad, n_core) for sign changes of f and refine each by bisection.
inline std::vector<double> scan_roots(auto&& f, double n_clad, double n_core,
                                      int samples = 6000) {
    std::vector<double> roots;
    const double lo = n_clad + 1e-9, hi = n_core - 1e-9;
    double xp = lo, fp = f(xp);
    for (int i = 1; i <= samples; ++i) {
        const double x = lo + (hi - lo) * i / samples;
        const double fx = f(x);
        if (std::isfinite(fp) && std::isfinite(fx) && (fp < 0) != (fx < 0))
            roots.push_back(bisect(f, xp, x));
        xp = x;
        fp = fx;
    }
    return roots;
}

}  // namespace detail

/// Effective index of mode `order` of the symmetric three-layer slab, from
/// the transcendental dispersion relation
///   kappa t = m pi + 2 atan(q gamma / kappa),  q = 1 (TE), (n_co/n_cl)^2 (TM),
/// solved by bisection to ~1e-12. Throws numerical_error when cut off.
inline double analytic_slab_neff(double n_core, double n_clad, double thickness,
                                 double wavelength, Polarization pol, int order = 0) {
    if (!(n_core > n_clad && n_clad > 0)) throw std::invalid_argument("slab: bad indices");
    if (!(thickness > 0 && wavelength > 0))
        throw std::invalid_argument("slab: bad thickness/wavelength");
    if (order < 0) throw std::invalid_argument("slab: order must be >= 0");
    const double k0 = 2.0 * kPi / wavelength;
    const double q = pol == Polarization::TE ? 1.0 : square(n_core / n_clad);
    auto disp = [&](double n) {
        const double kap = k0 * std::sqrt(square(n_core) - square(n));
        const double gam = k0 * std::sqrt(square(n) - square(n_clad));
        return kap * thickness - order * kPi - 2.0 * std::atan(q * gam / kap);
    };
    const double kap_max = k0 * std::sqrt(square(n_core) - square(n_clad));
    if (kap_max * thickness <= order * kPi)
        throw numerical_error("analytic_slab_neff: mode order " + std::to_string(order) +
                              " is cut off for thickness " + fmt_g(thickness) + " um");
    // disp is monotone decreasing in n: positive at the cladding light line,
    // negative at the core line.
    return detail::bisect(disp, n_clad + 1e-12, n_core - 1e-12);
}

/// Fundamental even/odd effective indices of two identical slabs of
/// `thickness`, separated by `gap` of cladding material (five-layer stack),
/// via the mirror reduction at the gap center. Returns (n_even, n_odd);
/// their difference is the analytic coupled-slab splitting.
inline std::pair<double, double> analytic_coupled_slab_neff(double n_core, double n_clad,
                                                            double thickness, double gap,
                                                            double wavelength,
                                                            Polarization pol) {
    if (!(gap > 0)) throw std::invalid_argument("coupled slab: gap must be > 0");
    const double k0 = 2.0 * kPi / wavelength;
    const double a = gap / 2.0;
    const double q = pol == Polarization::TE ? 1.0 : square(n_core / n_clad);
    auto make_disp = [&](bool even) {
        return [&, even](double n) {
            const double kap = k0 * std::sqrt(square(n_core) - square(n));
            const double gam = k0 * std::sqrt(square(n) - square(n_clad));
            // Field in the gap ~ cosh (even) or sinh (odd) about the mirror
            // plane; amplitudes normalized by the gap-edge value so large
            // gamma*a cannot overflow.
            const double ratio = even ? std::tanh(gam * a) : 1.0 / std::tanh(gam * a);
            const double b = 1.0;
            const double c = q * (gam / kap) * ratio;
            const double s = std::sin(kap * thickness), co = std::cos(kap * thickness);
            return (-b * kap * s + c * kap * co) + q * gam * (b * co + c * s);
        };
    };
    auto even_roots = detail::scan_roots(make_disp(true), n_clad, n_core);
    auto odd_roots = detail::scan_roots(make_disp(false), n_clad, n_core);
    if (even_roots.empty() || odd_roots.empty())
        throw numerical_error("analytic_coupled_slab_neff: no guided supermode pair");
    return {even_roots.back(), odd_roots.back()};
}

inline double analytic_coupled_slab_delta_n(double n_core, double n_clad, double thickness,
                                            double gap, double wavelength,
                                            Polarization pol) {
    auto [ne, no] = analytic_coupled_slab_neff(n_core, n_clad, thickness, gap, wavelength, pol);
    return ne - no;
}

}  // namespace bsa::modes
