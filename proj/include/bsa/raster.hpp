#pragma once

// Rasterization of cross-section geometry into per-cell permittivity maps
// with sub-cell fill fractions from exact polygon clipping.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bsa/core.hpp"
#include "bsa/geometry.hpp"

namespace bsa::geometry {

/// Uniform rectangular grid. Nodes at (x0 + i dx, y0 + j dy), i = 0..nx,
/// j = 0..ny; cell (i, j) spans nodes (i, j)-(i+1, j+1).
struct GridSpec {
    double x0 = 0, y0 = 0;
    double dx = 0.010, dy = 0.010;  // um
    int nx = 0, ny = 0;             // cell counts

    double x_node(int i) const { return x0 + i * dx; }
    double y_node(int j) const { return y0 + j * dy; }
    double x_center(int i) const { return x0 + (i + 0.5) * dx; }
    double y_center(int j) const { return y0 + (j + 0.5) * dy; }
    double width() const { return nx * dx; }
    double height() const { return ny * dy; }
    size_t cells() const { return static_cast<size_t>(nx) * static_cast<size_t>(ny); }
    bool same_as(const GridSpec& o) const {
        return nx == o.nx && ny == o.ny && x0 == o.x0 && y0 == o.y0 && dx == o.dx &&
               dy == o.dy;
    }
};

/// Dominant orientation of the material interface crossing a mixed cell.
enum class Interface : std::uint8_t { none = 0, x_normal = 1, y_normal = 2 };

/// Per-cell relative permittivity with interface metadata. Mixed cells carry
/// the core fill fraction so the mode solver can pick tangential (arithmetic)
/// or normal (harmonic) averaging per field component.
struct IndexMap {
    GridSpec grid;
    double n2_core = 0, n2_clad = 0;
    std::vector<double> n2;        // arithmetically mixed, size nx*ny, row-major j*nx+i
    std::vector<double> fill;      // core fill fraction in [0, 1]
    std::vector<Interface> iface;  // orientation of the interface in mixed cells
    bool mirror_symmetric = false; // pair maps built mirror-exact about x = 0
    bool x_uniform = false;        // layer-only maps: no lateral core boundary

    size_t idx(int i, int j) const { return static_cast<size_t>(j) * grid.nx + i; }

    double fill_at(int i, int j) const {
        if (i < 0 || j < 0 || i >= grid.nx || j >= grid.ny) return 0.0;
        return fill[idx(i, j)];
    }
    Interface iface_at(int i, int j) const {
        if (i < 0 || j < 0 || i >= grid.nx || j >= grid.ny) return Interface::none;
        return iface[idx(i, j)];
    }

    double mix_arithmetic(double f) const { return f * n2_core + (1.0 - f) * n2_clad; }
    double mix_harmonic(double f) const {
        return 1.0 / (f / n2_core + (1.0 - f) / n2_clad);
    }

    // Permittivity a given E component sees in one cell: harmonic across the
    // interface it is normal to, arithmetic otherwise.
    double eps_for_ex(int i, int j) const {
        const double f = fill_at(i, j);
        if (f <= 0) return n2_clad;
        if (f >= 1) return n2_core;
        return iface_at(i, j) == Interface::x_normal ? mix_harmonic(f) : mix_arithmetic(f);
    }
    double eps_for_ey(int i, int j) const {
        const double f = fill_at(i, j);
        if (f <= 0) return n2_clad;
        if (f >= 1) return n2_core;
        return iface_at(i, j) == Interface::y_normal ? mix_harmonic(f) : mix_arithmetic(f);
    }
    double eps_for_ez(int i, int j) const {
        const double f = fill_at(i, j);
        return mix_arithmetic(f);
    }

    double core_area() const {
        double a = 0;
        for (double f : fill) a += f;
        return a * grid.dx * grid.dy;
    }
};

/// Grid construction parameters for rasterize(). The window is auto-sized to
/// the core extent plus the margins unless explicit extents are given.
struct RasterParams {
    double dx = 0.010, dy = 0.010;     // um
    double margin = 1.5;               // um, cladding on each side of the core
    std::optional<double> window_width;   // um, overrides auto width (centered)
    std::optional<double> window_height;  // um, overrides auto height
};

/// Uniform horizontal layer of core material, used for slab-limit studies.
struct LayerStack {
    MaterialStack stack;
    std::vector<std::pair<double, double>> core_layers;  // (y_lo, y_hi) in um
};

namespace detail {

inline void check_margin(double lo, double hi, double core_lo, double core_hi,
                         double margin, const std::string& axis) {
    if (core_lo - lo < margin - 1e-12 || hi - core_hi < margin - 1e-12)
        throw std::invalid_argument(
            "rasterize: window too small along " + axis + " (core [" + fmt_g(core_lo) +
            ", " + fmt_g(core_hi) + "] um needs >= " + fmt_g(margin) +
            " um cladding margin inside window [" + fmt_g(lo) + ", " + fmt_g(hi) + "])");
}

// Window centered on x = 0 with the mid-plane (or rib center) on a grid node.
inline GridSpec make_window(double core_half_width, double film_thickness,
                            const RasterParams& p) {
    if (p.margin < 1.5 - 1e-12)
        throw std::invalid_argument("rasterize: cladding margin must be >= 1.5 um");
    GridSpec g;
    g.dx = p.dx;
    g.dy = p.dy;
    double width = p.window_width.value_or(2.0 * (core_half_width + p.margin));
    int half_cells = static_cast<int>(std::ceil(width / 2.0 / p.dx - 1e-9));
    g.nx = 2 * half_cells;
    g.x0 = -half_cells * p.dx;
    double height = p.window_height.value_or(film_thickness + 2.0 * p.margin);
    double below = (height - film_thickness) / 2.0;
    int below_cells = static_cast<int>(std::ceil(below / p.dy - 1e-9));
    g.y0 = -below_cells * p.dy;
    g.ny = below_cells + static_cast<int>(std::ceil((height - below) / p.dy - 1e-9));
    check_margin(g.x0, g.x0 + g.width(), -core_half_width, core_half_width, p.margin, "x");
    check_margin(g.y0, g.y0 + g.height(), 0.0, film_thickness, p.margin, "y");
    return g;
}

// Fraction of cell (i, j) covered by the horizontal band [y_lo, y_hi].
inline double band_fill(const GridSpec& g, int j, double y_lo, double y_hi) {
    const double c0 = g.y_node(j), c1 = g.y_node(j + 1);
    const double ov = std::min(c1, y_hi) - std::max(c0, y_lo);
    return std::clamp(ov / g.dy, 0.0, 1.0);
}

inline void classify_interfaces(IndexMap& map) {
    const GridSpec& g = map.grid;
    map.iface.assign(map.fill.size(), Interface::none);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double f = map.fill[map.idx(i, j)];
            if (f <= 0.0 || f >= 1.0) continue;
            const double gx = map.fill_at(i + 1, j) - map.fill_at(i - 1, j);
            const double gy = map.fill_at(i, j + 1) - map.fill_at(i, j - 1);
            map.iface[map.idx(i, j)] =
                std::abs(gx) >= std::abs(gy) ? Interface::x_normal : Interface::y_normal;
        }
}

inline void finalize(IndexMap& map) {
    map.n2.resize(map.fill.size());
    for (size_t k = 0; k < map.fill.size(); ++k) map.n2[k] = map.mix_arithmetic(map.fill[k]);
    classify_interfaces(map);
}

}  // namespace detail

/// Rasterize one or two ribs (centers given) on the film/slab layer stack.
/// Pair maps (two centers, symmetric) are built by mirroring the right half
/// so the permittivity field is exactly mirror-symmetric about x = 0.
inline IndexMap rasterize_ribs(const RibWaveguide& rib, const MaterialStack& stack,
                               const std::vector<double>& centers, const RasterParams& p) {
    stack.validate();
    rib.validate(stack);
    double half_extent = 0;
    for (double c : centers)
        half_extent = std::max(half_extent, std::abs(c) + rib.bottom_width() / 2.0);
    IndexMap map;
    map.grid = detail::make_window(half_extent, stack.film_thickness, p);
    map.n2_core = square(stack.n_core);
    map.n2_clad = square(stack.n_clad);
    const GridSpec& g = map.grid;
    map.fill.assign(g.cells(), 0.0);

    const double h_slab = rib.slab_thickness(stack);
    std::vector<Polygon> polys;
    for (double c : centers) polys.push_back(rib_polygon(rib, stack, c));

    const double cell_area = g.dx * g.dy;
    // Fill the right half (i >= nx/2; mid-plane on the node x = 0), mirror left.
    for (int j = 0; j < g.ny; ++j) {
        for (int i = g.nx / 2; i < g.nx; ++i) {
            double f = h_slab > 0 ? detail::band_fill(g, j, 0.0, h_slab) : 0.0;
            const double cx0 = g.x_node(i), cx1 = g.x_node(i + 1);
            const double cy0 = g.y_node(j), cy1 = g.y_node(j + 1);
            for (const Polygon& poly : polys) {
                const Polygon clipped = clip_polygon_rect(poly, cx0, cx1, cy0, cy1);
                if (clipped.size() >= 3) f += polygon_area(clipped) / cell_area;
            }
            f = std::clamp(f, 0.0, 1.0);
            map.fill[map.idx(i, j)] = f;
            map.fill[map.idx(g.nx - 1 - i, j)] = f;
        }
    }
    map.mirror_symmetric = true;
    detail::finalize(map);
    return map;
}

inline IndexMap rasterize(const RibWaveguide& rib, const MaterialStack& stack,
                          const RasterParams& p) {
    return rasterize_ribs(rib, stack, {0.0}, p);
}

inline IndexMap rasterize(const CoupledPair& pair, const MaterialStack& stack,
                          const RasterParams& p) {
    pair.validate(stack);
    const double c = (pair.gap + pair.rib.width) / 2.0;  // gap measured at rib tops
    return rasterize_ribs(pair.rib, stack, {-c, c}, p);
}

/// Rasterize horizontal core layers only (x-uniform), e.g. the symmetric-slab
/// and coupled-slab validation limits. Lateral margins do not apply.
inline IndexMap rasterize(const LayerStack& layers, const RasterParams& p, int nx = 16) {
    layers.stack.validate();
    IndexMap map;
    GridSpec g;
    g.dx = p.dx;
    g.dy = p.dy;
    g.nx = nx;
    g.x0 = -nx * p.dx / 2.0;
    double y_lo = 0, y_hi = 0;
    for (auto& [a, b] : layers.core_layers) {
        y_lo = std::min(y_lo, a);
        y_hi = std::max(y_hi, b);
    }
    int below = static_cast<int>(std::ceil((p.margin - 1e-9) / p.dy));
    g.y0 = y_lo - below * p.dy;
    g.ny = below + static_cast<int>(std::ceil((y_hi - y_lo + p.margin - 1e-9) / p.dy));
    if (!layers.core_layers.empty())
        detail::check_margin(g.y0, g.y0 + g.height(), y_lo, y_hi, p.margin, "y");
    map.grid = g;
    map.n2_core = square(layers.stack.n_core);
    map.n2_clad = square(layers.stack.n_clad);
    map.fill.assign(g.cells(), 0.0);
    for (int j = 0; j < g.ny; ++j) {
        double f = 0;
        for (auto& [a, b] : layers.core_layers) f += detail::band_fill(g, j, a, b);
        f = std::clamp(f, 0.0, 1.0);
        for (int i = 0; i < g.nx; ++i) map.fill[map.idx(i, j)] = f;
    }
    map.mirror_symmetric = true;
    map.x_uniform = true;
    detail::finalize(map);
    return map;
}

}  // namespace bsa::geometry
