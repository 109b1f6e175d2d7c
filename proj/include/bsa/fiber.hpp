#pragma once

// Lensed-fiber Gaussian mode, mode-overlap coupling efficiency, and the
// efficiency-vs-NA sweep for both polarizations.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "bsa/core.hpp"
#include "bsa/modesolver.hpp"
#include "bsa/raster.hpp"

namespace bsa::fiber {

using geometry::GridSpec;
using modes::ModeSolution;

/// Focused spot of the lensed fiber under the paraxial far-field convention
/// w0 = lambda0 / (pi NA). NA values beyond the paper's 0.6 sweep limit are
/// permitted but flagged.
struct GaussianBeam {
    double na = 0.6;
    double wavelength = 0.49355;  // um

    double waist() const { return wavelength / (kPi * na); }
    bool beyond_paper_range() const { return na > 0.6; }
    void validate() const {
        if (!(na > 0)) throw std::invalid_argument("GaussianBeam: NA must be > 0");
        if (!(wavelength > 0)) throw std::invalid_argument("GaussianBeam: wavelength must be > 0");
    }
};

/// Scalar transverse field sampled at the staggered positions of the given
/// polarization's dominant component (Ex for TE, Ey for TM).
struct ScalarField {
    GridSpec grid;
    Polarization polarization = Polarization::TE;
    Eigen::ArrayXXd values;  // (ny, nx)
};

inline ScalarField dominant_component(const ModeSolution& mode, const GridSpec& grid) {
    ScalarField f;
    f.grid = grid;
    f.polarization = mode.polarization;
    f.values = mode.polarization == Polarization::TE ? mode.ex : mode.ey;
    return f;
}

/// Unit-normalized circular Gaussian exp(-((x-cx)^2+(y-cy)^2)/w0^2) on the
/// dominant component positions of `pol`.
inline ScalarField gaussian_field(const GaussianBeam& beam, const GridSpec& grid,
                                  Polarization pol, double center_x, double center_y) {
    beam.validate();
    const double w0 = beam.waist();
    if (grid.width() < 6.0 * w0 || grid.height() < 6.0 * w0)
        throw std::invalid_argument("gaussian_field: window smaller than 6 w0 (w0 = " +
                                    fmt_g(w0) + " um)");
    ScalarField f;
    f.grid = grid;
    f.polarization = pol;
    f.values.resize(grid.ny, grid.nx);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const double x = pol == Polarization::TE ? grid.x_center(i) : grid.x_node(i);
            const double y = pol == Polarization::TE ? grid.y_node(j) : grid.y_center(j);
            f.values(j, i) = std::exp(-(square(x - center_x) + square(y - center_y)) / square(w0));
        }
    f.values /= std::sqrt(f.values.square().sum() * grid.dx * grid.dy);
    return f;
}

/// Butt-coupling efficiency eta = |<a|b>|^2 / (<a|a><b|b>).
inline double overlap(const ScalarField& a, const ScalarField& b) {
    if (!a.grid.same_as(b.grid) || a.polarization != b.polarization)
        throw std::invalid_argument("overlap: fields live on different grids");
    const double num = (a.values * b.values).sum();
    const double den = a.values.square().sum() * b.values.square().sum();
    if (den <= 0) throw std::invalid_argument("overlap: zero-power field");
    return std::min(1.0, num * num / den);
}

/// Area centroid of the LN core column feeding the facet: rib trapezoid plus
/// the slab directly beneath its footprint. The Gaussian is centered here.
inline std::pair<double, double> core_centroid(const geometry::RibWaveguide& rib,
                                               const geometry::MaterialStack& stack) {
    const double h_slab = rib.slab_thickness(stack);
    const double wb = rib.bottom_width(), wt = rib.width, he = rib.etch_depth;
    const double a_slab = wb * h_slab;
    const double y_slab = h_slab / 2.0;
    const double a_rib = 0.5 * (wt + wb) * he;
    const double y_rib = h_slab + he * (wb + 2.0 * wt) / (3.0 * (wb + wt));
    return {0.0, (a_slab * y_slab + a_rib * y_rib) / (a_slab + a_rib)};
}

struct NaSweepPoint {
    double na = 0;
    double eta_te = 0;
    double eta_tm = 0;
};

/// Fundamental TE/TM modes of the single input rib against the lensed-fiber
/// Gaussian over a range of numerical apertures.
inline std::vector<NaSweepPoint> na_sweep(const geometry::RibWaveguide& rib,
                                          const geometry::MaterialStack& stack,
                                          const geometry::RasterParams& grid_params,
                                          double na_min, double na_max, int samples,
                                          const modes::SolverOptions& opts = {}) {
    if (samples < 1) throw std::invalid_argument("na_sweep: samples must be >= 1");
    if (!(na_min > 0 && na_max >= na_min))
        throw std::invalid_argument("na_sweep: bad NA range");
    const geometry::IndexMap map = rasterize(rib, stack, grid_params);
    const auto solved = modes::solve_modes(map, stack.wavelength, 4, {}, opts);
    const ModeSolution* te = nullptr;
    const ModeSolution* tm = nullptr;
    for (const ModeSolution& m : solved) {
        if (m.polarization == Polarization::TE && !te) te = &m;
        if (m.polarization == Polarization::TM && !tm) tm = &m;
    }
    if (!te || !tm)
        throw numerical_error("na_sweep: fundamental TE/TM pair not found for this rib");
    const auto [cx, cy] = core_centroid(rib, stack);
    const ScalarField te_field = dominant_component(*te, map.grid);
    const ScalarField tm_field = dominant_component(*tm, map.grid);

    std::vector<NaSweepPoint> out;
    const auto nas = samples == 1 ? std::vector<double>{na_min}
                                  : linspace(na_min, na_max, samples);
    for (double na : nas) {
        GaussianBeam beam{na, stack.wavelength};
        NaSweepPoint p;
        p.na = na;
        p.eta_te = overlap(te_field, gaussian_field(beam, map.grid, Polarization::TE, cx, cy));
        p.eta_tm = overlap(tm_field, gaussian_field(beam, map.grid, Polarization::TM, cx, cy));
        out.push_back(p);
    }
    return out;
}

}  // namespace bsa::fiber
