#pragma once

// Design-space exploration: xi maps and the xi = 1 contour, delta(g) and
// E(Lc) minimization, golden-section search, and the memoized coupling
// cache that makes the device sweeps tractable.

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "bsa/bellstate.hpp"
#include "bsa/coupler.hpp"
#include "bsa/core.hpp"
#include "bsa/modesolver.hpp"

namespace bsa::sweep {

using coupler::DeltaNTable;
using geometry::CoupledPair;
using geometry::DeviceSpec;
using geometry::MaterialStack;
using geometry::RasterParams;
using modes::CouplingStrength;

/// Memoized coupling_strength keyed on geometry + grid. Reads are lock-free
/// once written; writes are serialized, so parallel sweeps stay coherent.
class CouplingCache {
public:
    CouplingStrength get(const CoupledPair& pair, const MaterialStack& stack,
                         const RasterParams& grid, const modes::SolverOptions& opts = {}) {
        const std::string key = make_key(pair, stack, grid);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        const CouplingStrength value = modes::coupling_strength(pair, stack, grid, opts);
        std::lock_guard<std::mutex> lock(mutex_);
        return cache_.emplace(key, value).first->second;
    }

    size_t size() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return cache_.size();
    }

private:
    mutable std::mutex mutex_;
    std::map<std::string, CouplingStrength> cache_;

    static std::string make_key(const CoupledPair& pair, const MaterialStack& stack,
                                const RasterParams& grid) {
        std::string k;
        for (double v : {pair.rib.width, pair.rib.etch_depth, pair.rib.sidewall_angle,
                         pair.gap, stack.n_core, stack.n_clad, stack.film_thickness,
                         stack.wavelength, grid.dx, grid.dy, grid.margin,
                         grid.window_width.value_or(-1.0), grid.window_height.value_or(-1.0)})
            k += fmt_g(v, 17) + "|";
        return k;
    }
};

/// Build the gap-parameterized splitting table from solver runs at the given
/// gaps (ascending).
inline DeltaNTable build_delta_n_table(const geometry::RibWaveguide& rib,
                                       const MaterialStack& stack,
                                       const std::vector<double>& gaps,
                                       const RasterParams& grid, CouplingCache& cache,
                                       const modes::SolverOptions& opts = {}) {
    std::vector<DeltaNTable::Entry> entries;
    entries.reserve(gaps.size());
    for (double g : gaps) {
        const CouplingStrength cs = cache.get(CoupledPair{rib, g}, stack, grid, opts);
        entries.push_back({g, cs.delta_n_te, cs.delta_n_tm});
    }
    return DeltaNTable(std::move(entries));
}

// --- xi map and contour -----------------------------------------------------

struct XiMap {
    std::vector<double> widths;       // um
    std::vector<double> etch_depths;  // um
    Eigen::ArrayXXd xi;               // (etch_depths.size(), widths.size()), NaN on failure
};

/// xi(w, h_e) at fixed gap. Per-cell solver failures are recorded as NaN.
inline XiMap xi_map(const std::vector<double>& widths, const std::vector<double>& etch_depths,
                    double gap, const geometry::RibWaveguide& rib_template,
                    const MaterialStack& stack, const RasterParams& grid,
                    CouplingCache& cache, const modes::SolverOptions& opts = {}) {
    XiMap out;
    out.widths = widths;
    out.etch_depths = etch_depths;
    out.xi.setConstant(static_cast<long>(etch_depths.size()),
                       static_cast<long>(widths.size()),
                       std::numeric_limits<double>::quiet_NaN());
    for (size_t r = 0; r < etch_depths.size(); ++r)
        for (size_t c = 0; c < widths.size(); ++c) {
            geometry::RibWaveguide rib = rib_template;
            rib.width = widths[c];
            rib.etch_depth = etch_depths[r];
            try {
                out.xi(static_cast<long>(r), static_cast<long>(c)) =
                    cache.get(CoupledPair{rib, gap}, stack, grid, opts).xi;
            } catch (const numerical_error&) {
                // leave NaN; the cell is reported as missing, not fatal
            }
        }
    return out;
}

using ContourPoint = geometry::Vec2;          // x = width, y = etch depth (um)
using Polyline = std::vector<ContourPoint>;

/// Marching-squares contour of the map at the given level (linear
/// interpolation along cell edges; cells touching NaN are skipped). Segments
/// are chained into polylines.
inline std::vector<Polyline> contour_lines(const XiMap& map, double level) {
    std::vector<std::pair<ContourPoint, ContourPoint>> segs;
    const long nr = map.xi.rows(), nc = map.xi.cols();
    auto interp = [&](double a, double b, double pa, double pb) {
        const double t = (level - a) / (b - a);
        return pa + t * (pb - pa);
    };
    for (long r = 0; r + 1 < nr; ++r)
        for (long c = 0; c + 1 < nc; ++c) {
            const double v00 = map.xi(r, c), v10 = map.xi(r, c + 1);
            const double v01 = map.xi(r + 1, c), v11 = map.xi(r + 1, c + 1);
            if (std::isnan(v00) || std::isnan(v10) || std::isnan(v01) || std::isnan(v11))
                continue;
            const double x0 = map.widths[static_cast<size_t>(c)];
            const double x1 = map.widths[static_cast<size_t>(c) + 1];
            const double y0 = map.etch_depths[static_cast<size_t>(r)];
            const double y1 = map.etch_depths[static_cast<size_t>(r) + 1];
            std::vector<ContourPoint> hits;
            auto edge = [&](double va, double vb, ContourPoint pa, ContourPoint pb) {
                if ((va < level) != (vb < level))
                    hits.push_back(va == vb ? pa
                                            : ContourPoint{interp(va, vb, pa.x, pb.x),
                                                           interp(va, vb, pa.y, pb.y)});
            };
            edge(v00, v10, {x0, y0}, {x1, y0});
            edge(v10, v11, {x1, y0}, {x1, y1});
            edge(v11, v01, {x1, y1}, {x0, y1});
            edge(v01, v00, {x0, y1}, {x0, y0});
            if (hits.size() == 2) segs.push_back({hits[0], hits[1]});
            else if (hits.size() == 4) {  // saddle: pair edges arbitrarily but stably
                segs.push_back({hits[0], hits[1]});
                segs.push_back({hits[2], hits[3]});
            }
        }

    // Chain segments whose endpoints coincide.
    std::vector<Polyline> lines;
    std::vector<bool> used(segs.size(), false);
    auto close = [](const ContourPoint& a, const ContourPoint& b) {
        return std::abs(a.x - b.x) < 1e-12 && std::abs(a.y - b.y) < 1e-12;
    };
    for (size_t s = 0; s < segs.size(); ++s) {
        if (used[s]) continue;
        used[s] = true;
        Polyline line{segs[s].first, segs[s].second};
        bool grew = true;
        while (grew) {
            grew = false;
            for (size_t t = 0; t < segs.size(); ++t) {
                if (used[t]) continue;
                if (close(line.back(), segs[t].first)) {
                    line.push_back(segs[t].second);
                } else if (close(line.back(), segs[t].second)) {
                    line.push_back(segs[t].first);
                } else if (close(line.front(), segs[t].second)) {
                    line.insert(line.begin(), segs[t].first);
                } else if (close(line.front(), segs[t].first)) {
                    line.insert(line.begin(), segs[t].second);
                } else {
                    continue;
                }
                used[t] = true;
                grew = true;
            }
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

// --- 1D minimization ---------------------------------------------------------

struct OptimizationReport {
    double argmin = 0;
    double min_value = 0;
    int samples_evaluated = 0;
    double bracket = 0;            // final uncertainty interval width
    bool boundary_minimum = false; // no interior minimum was bracketed
};

/// Golden-section reduction of [a, b] until the bracket is below tol.
inline OptimizationReport golden_section(const std::function<double(double)>& objective,
                                         double a, double b, double tol) {
    if (!(a < b)) throw std::invalid_argument("golden_section: require a < b");
    if (!(tol > 0)) throw std::invalid_argument("golden_section: require tol > 0");
    auto eval = [&](double x) {
        const double v = objective(x);
        if (!std::isfinite(v))
            throw numerical_error("golden_section: non-finite objective at x = " + fmt_g(x));
        return v;
    };
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    int evals = 2;
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2);
        }
        ++evals;
    }
    OptimizationReport rep;
    rep.argmin = f1 <= f2 ? x1 : x2;
    rep.min_value = std::min(f1, f2);
    rep.samples_evaluated = evals;
    rep.bracket = b - a;
    return rep;
}

/// 11-point coarse scan followed by golden-section refinement around the
/// best sample; guards against capturing a non-global minimum. A best sample
/// on the range boundary is reported with the boundary flag set.
inline OptimizationReport minimize_scalar(const std::function<double(double)>& objective,
                                          double a, double b, double tol,
                                          int coarse_points = 11) {
    if (coarse_points < 3) throw std::invalid_argument("minimize_scalar: need >= 3 points");
    const auto xs = linspace(a, b, coarse_points);
    int best = 0;
    std::vector<double> fs(xs.size());
    for (size_t k = 0; k < xs.size(); ++k) {
        fs[k] = objective(xs[k]);
        if (!std::isfinite(fs[k]))
            throw numerical_error("minimize_scalar: non-finite objective at x = " +
                                  fmt_g(xs[k]));
        if (fs[k] < fs[static_cast<size_t>(best)]) best = static_cast<int>(k);
    }
    if (best == 0 || best == static_cast<int>(xs.size()) - 1) {
        OptimizationReport rep;
        rep.argmin = xs[static_cast<size_t>(best)];
        rep.min_value = fs[static_cast<size_t>(best)];
        rep.samples_evaluated = coarse_points;
        rep.bracket = xs[1] - xs[0];
        rep.boundary_minimum = true;
        return rep;
    }
    OptimizationReport rep = golden_section(objective, xs[static_cast<size_t>(best) - 1],
                                            xs[static_cast<size_t>(best) + 1], tol);
    rep.samples_evaluated += coarse_points;
    return rep;
}

// --- device-level objectives --------------------------------------------------

/// delta(g) minimization over the gap range (paper: interior minimum at 40 nm).
inline OptimizationReport minimize_delta_over_gap(const DeviceSpec& device,
                                                  const DeltaNTable& table, double g_min,
                                                  double g_max, double tol,
                                                  double lc_min = 1.0, double lc_max = 25.0,
                                                  int lc_samples = 97) {
    auto objective = [&](double g) {
        return coupler::delta(device.with_gap(g), table, lc_min, lc_max, lc_samples);
    };
    return minimize_scalar(objective, g_min, g_max, tol);
}

/// E(Lc) minimization in a coupling-length window (paper: 2.48e-4 at 13.95 um).
inline OptimizationReport minimize_error_over_lc(const DeviceSpec& device,
                                                 const DeltaNTable& table, double lc_min,
                                                 double lc_max, double tol) {
    auto objective = [&](double lc) {
        DeviceSpec d = device;
        d.coupling_length = lc;
        return bell::fidelity_closed_form(coupler::device_transfer(d, table)).error;
    };
    return minimize_scalar(objective, lc_min, lc_max, tol);
}

}  // namespace bsa::sweep
