#pragma once

// Device geometry: material stack, rib cross-sections, coupled pair and
// S-bend separation profile. All lengths are in micrometers, angles in
// degrees unless stated otherwise.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "bsa/core.hpp"

namespace bsa::geometry {

/// Thin-film stack: core film on a buried oxide, oxide top cladding.
/// Box and cladding share the same index, so the background is uniform.
struct MaterialStack {
    double n_core = 2.34;
    double n_clad = 1.462;
    double film_thickness = 0.300;  // um
    double box_thickness = 2.0;     // um
    double clad_thickness = 2.0;    // um
    double wavelength = 0.49355;    // um

    void validate() const {
        if (!(n_core > n_clad && n_clad > 1.0))
            throw std::invalid_argument("MaterialStack: require n_core > n_clad > 1");
        if (!(film_thickness > 0))
            throw std::invalid_argument("MaterialStack: film_thickness must be > 0");
        if (!(wavelength > 0))
            throw std::invalid_argument("MaterialStack: wavelength must be > 0");
    }
};

/// Partially etched rib. `width` is measured at the rib top; the rib widens
/// going downward with the given sidewall angle.
struct RibWaveguide {
    double width = 0.475;         // um, at rib top
    double etch_depth = 0.110;    // um
    double sidewall_angle = 75.0; // degrees, in (0, 90]

    double slab_thickness(const MaterialStack& stack) const {
        return stack.film_thickness - etch_depth;
    }
    double bottom_width() const {
        return width + 2.0 * etch_depth / std::tan(sidewall_angle * kPi / 180.0);
    }
    void validate(const MaterialStack& stack) const {
        if (!(width > 0)) throw std::invalid_argument("RibWaveguide: width must be > 0");
        if (!(etch_depth > 0 && etch_depth <= stack.film_thickness))
            throw std::invalid_argument("RibWaveguide: require 0 < etch_depth <= film_thickness");
        if (!(sidewall_angle > 0 && sidewall_angle <= 90.0))
            throw std::invalid_argument("RibWaveguide: sidewall_angle must be in (0, 90] degrees");
    }
};

/// Two identical ribs, mirror-symmetric about x = 0. `gap` is edge-to-edge
/// at the rib tops.
struct CoupledPair {
    RibWaveguide rib;
    double gap = 0.065;  // um

    void validate(const MaterialStack& stack) const {
        rib.validate(stack);
        if (!(gap > 0)) throw std::invalid_argument("CoupledPair: gap must be > 0");
    }
};

/// Raised-cosine separation profile of the S-bend region. Separation tapers
/// from `start_separation` down to `end_gap` over `bend_length` with zero
/// slope at both endpoints.
struct SBendProfile {
    double start_separation = 2.0;  // um
    double end_gap = 0.040;         // um
    double bend_length = 30.0;      // um
    int samples = 512;              // default quadrature intervals

    void validate() const {
        if (!(start_separation > 0 && end_gap > 0 && bend_length > 0))
            throw std::invalid_argument("SBendProfile: lengths must be positive");
        if (!(start_separation >= end_gap))
            throw std::invalid_argument("SBendProfile: start_separation must be >= end_gap");
        if (samples < 2) throw std::invalid_argument("SBendProfile: samples must be >= 2");
    }
};

/// gap(z) = g + (y - g) (1 + cos(pi z / L_s)) / 2, z in [0, L_s].
inline double sbend_gap(double z, const SBendProfile& profile) {
    profile.validate();
    if (z < 0 || z > profile.bend_length)
        throw std::invalid_argument("sbend_gap: z outside [0, bend_length]");
    const double y = profile.start_separation, g = profile.end_gap;
    return g + (y - g) * (1.0 + std::cos(kPi * z / profile.bend_length)) / 2.0;
}

/// Complete device: two S-bends feeding a straight coupling region.
/// Bend transmissions are the power transmissions of one full S-bend pair
/// path per polarization (carried through as amplitude factors, see coupler).
struct DeviceSpec {
    MaterialStack stack;
    CoupledPair pair;
    SBendProfile sbend;
    double coupling_length = 13.95;     // um
    double bend_transmission_te = 0.993;
    double bend_transmission_tm = 0.994;

    void validate() const {
        stack.validate();
        pair.validate(stack);
        sbend.validate();
        if (coupling_length < 0)
            throw std::invalid_argument("DeviceSpec: coupling_length must be >= 0");
        auto ok = [](double t) { return t > 0 && t <= 1.0; };
        if (!ok(bend_transmission_te) || !ok(bend_transmission_tm))
            throw std::invalid_argument("DeviceSpec: bend transmissions must be in (0, 1]");
    }

    /// Copy with the coupling gap retuned (pair and S-bend end kept consistent).
    DeviceSpec with_gap(double gap) const {
        DeviceSpec d = *this;
        d.pair.gap = gap;
        d.sbend.end_gap = gap;
        return d;
    }
    DeviceSpec with_coupling_length(double lc) const {
        DeviceSpec d = *this;
        d.coupling_length = lc;
        return d;
    }
};

// --- polygon helpers -------------------------------------------------------

struct Vec2 {
    double x = 0, y = 0;
};
using Polygon = std::vector<Vec2>;

inline double polygon_area(const Polygon& p) {
    double a = 0;
    const size_t n = p.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& u = p[i];
        const Vec2& v = p[(i + 1) % n];
        a += u.x * v.y - v.x * u.y;
    }
    return 0.5 * std::abs(a);
}

/// Closed trapezoid of the rib above the slab, centered on x = center.
/// Vertices counter-clockwise starting at the bottom-left corner; the slab
/// and film layers are handled separately by the rasterizer.
inline Polygon rib_polygon(const RibWaveguide& rib, const MaterialStack& stack,
                           double center = 0.0) {
    rib.validate(stack);
    const double h_slab = rib.slab_thickness(stack);
    const double wb = rib.bottom_width();
    const double wt = rib.width;
    return Polygon{{center - wb / 2, h_slab},
                   {center + wb / 2, h_slab},
                   {center + wt / 2, stack.film_thickness},
                   {center - wt / 2, stack.film_thickness}};
}

/// Sutherland-Hodgman clip of a convex/concave polygon by the axis-aligned
/// rectangle [x0,x1]x[y0,y1]. Returns the clipped polygon (possibly empty).
inline Polygon clip_polygon_rect(const Polygon& poly, double x0, double x1, double y0,
                                 double y1) {
    auto clip_half = [](const Polygon& in, auto inside, auto intersect) {
        Polygon out;
        const size_t n = in.size();
        for (size_t i = 0; i < n; ++i) {
            const Vec2& a = in[i];
            const Vec2& b = in[(i + 1) % n];
            const bool ia = inside(a), ib = inside(b);
            if (ia) {
                out.push_back(a);
                if (!ib) out.push_back(intersect(a, b));
            } else if (ib) {
                out.push_back(intersect(a, b));
            }
        }
        return out;
    };
    auto ix = [](const Vec2& a, const Vec2& b, double x) {
        const double t = (x - a.x) / (b.x - a.x);
        return Vec2{x, a.y + t * (b.y - a.y)};
    };
    auto iy = [](const Vec2& a, const Vec2& b, double y) {
        const double t = (y - a.y) / (b.y - a.y);
        return Vec2{a.x + t * (b.x - a.x), y};
    };
    Polygon p = poly;
    p = clip_half(p, [&](const Vec2& v) { return v.x >= x0; },
                  [&](const Vec2& a, const Vec2& b) { return ix(a, b, x0); });
    if (p.empty()) return p;
    p = clip_half(p, [&](const Vec2& v) { return v.x <= x1; },
                  [&](const Vec2& a, const Vec2& b) { return ix(a, b, x1); });
    if (p.empty()) return p;
    p = clip_half(p, [&](const Vec2& v) { return v.y >= y0; },
                  [&](const Vec2& a, const Vec2& b) { return iy(a, b, y0); });
    if (p.empty()) return p;
    p = clip_half(p, [&](const Vec2& v) { return v.y <= y1; },
                  [&](const Vec2& a, const Vec2& b) { return iy(a, b, y1); });
    return p;
}

}  // namespace bsa::geometry
