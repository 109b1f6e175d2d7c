#pragma once

// Full-vectorial finite-difference mode solver on the 2D cross-section.
//
// The transverse-E eigenproblem is discretized on a staggered (Yee) lattice:
// Ex at ((i+1/2) dx, j dy), Ey at (i dx, (j+1/2) dy), with the longitudinal
// fields eliminated. Writing first-difference operators DEX/DEY (forward,
// E to H positions) and DHX/DHY (backward), the operator factors as
//
//   M [Ex; Ey] = n_eff^2 [Ex; Ey],   M = -A B,
//   A = [ DEX Z DHY        -(I + DEX Z DHX) ]      Z = diag(1/eps_zz)
//       [ I + DEY Z DHY    -(DEY Z DHX)     ]
//   B = [ DHX DEY          -(eps_yy + DHX DEX) ]
//       [ eps_xx + DHY DEY -(DHY DEX)          ]
//
// with all lengths normalized by 1/k0, so eigenvalues are n_eff^2 directly.
// Permittivities are sampled at the component positions with tangential
// (arithmetic) / normal (harmonic) interface averaging from the IndexMap.
// Guided eigenpairs are found by shift-invert Arnoldi about n_guess^2.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <complex>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "bsa/core.hpp"
#include "bsa/raster.hpp"

namespace bsa::modes {

using geometry::GridSpec;
using geometry::IndexMap;

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

enum class Wall { pec, pmc };
enum class Symmetry { symmetric, antisymmetric, none };

inline const char* to_string(Symmetry s) {
    switch (s) {
        case Symmetry::symmetric: return "symmetric";
        case Symmetry::antisymmetric: return "antisymmetric";
        default: return "none";
    }
}

struct SolverOptions {
    std::optional<double> n_guess;  // default n_core - 0.05
    double residual_tol = 1e-9;
    int max_krylov = 300;
    double edge_power_tol = 1e-3;  // reject window-filling (slab-box) modes
    double edge_band = 0.5;        // um, band next to the walls for the test
    double degeneracy_tol = 1e-9;  // eigenvalue spacing for symmetrized classification
    Wall wall_left = Wall::pec, wall_right = Wall::pec;
    Wall wall_bottom = Wall::pec, wall_top = Wall::pec;
};

/// One guided eigenmode. Field arrays are indexed (j, i) = (row, column) at
/// the staggered component positions and normalized so that
/// sum(|Ex|^2 + |Ey|^2) dx dy = 1.
struct ModeSolution {
    double n_eff = 0;
    Eigen::ArrayXXd ex, ey;  // (ny, nx)
    double polarization_fraction = 0;  // power fraction in the dominant component
    Polarization polarization = Polarization::TE;
    Symmetry symmetry = Symmetry::none;
    double mirror_correlation = 0;
    double residual = 0;
    double edge_power = 0;
};

struct ModeClassification {
    Polarization polarization = Polarization::TE;
    double polarization_fraction = 0;
    Symmetry symmetry = Symmetry::none;
    double correlation = 0;
    bool hybridized_warning = false;  // |correlation| < 0.9 on a symmetric map
};

/// Per-polarization supermode splitting of a coupled pair at one gap.
struct CouplingStrength {
    double delta_n_te = 0;
    double delta_n_tm = 0;
    double xi = 0;  // delta_n_te / delta_n_tm
    double gap = 0; // um
};

namespace detail {

// Forward difference, E positions -> H positions. The ghost value past the
// right wall is 0 for PEC (tangential E vanishes) and a copy for PMC.
inline SpMat d_forward(int n, double h, Wall right) {
    SpMat d(n, n);
    std::vector<Triplet> t;
    t.reserve(2 * n);
    for (int i = 0; i < n; ++i) {
        if (i + 1 < n) {
            t.emplace_back(i, i, -1.0 / h);
            t.emplace_back(i, i + 1, 1.0 / h);
        } else if (right == Wall::pec) {
            t.emplace_back(i, i, -1.0 / h);
        }
        // PMC right: ghost copy cancels the last row entirely.
    }
    d.setFromTriplets(t.begin(), t.end());
    return d;
}

// Backward difference, H positions -> E positions. The ghost before the left
// wall mirrors the first value: even for PEC (row vanishes), odd for PMC.
inline SpMat d_backward(int n, double h, Wall left) {
    SpMat d(n, n);
    std::vector<Triplet> t;
    t.reserve(2 * n);
    for (int i = 0; i < n; ++i) {
        if (i > 0) {
            t.emplace_back(i, i, 1.0 / h);
            t.emplace_back(i, i - 1, -1.0 / h);
        } else if (left == Wall::pmc) {
            t.emplace_back(i, i, 2.0 / h);
        }
    }
    d.setFromTriplets(t.begin(), t.end());
    return d;
}

// kron(I_ny, Dx): apply a 1D x-operator across all rows.
inline SpMat kron_x(const SpMat& dx, int nx, int ny) {
    SpMat out(static_cast<long>(nx) * ny, static_cast<long>(nx) * ny);
    std::vector<Triplet> t;
    t.reserve(static_cast<size_t>(dx.nonZeros()) * ny);
    for (int k = 0; k < dx.outerSize(); ++k)
        for (SpMat::InnerIterator it(dx, k); it; ++it)
            for (int j = 0; j < ny; ++j)
                t.emplace_back(it.row() + static_cast<long>(nx) * j,
                               it.col() + static_cast<long>(nx) * j, it.value());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

// kron(Dy, I_nx): apply a 1D y-operator down all columns.
inline SpMat kron_y(const SpMat& dy, int nx, int ny) {
    SpMat out(static_cast<long>(nx) * ny, static_cast<long>(nx) * ny);
    std::vector<Triplet> t;
    t.reserve(static_cast<size_t>(dy.nonZeros()) * nx);
    for (int k = 0; k < dy.outerSize(); ++k)
        for (SpMat::InnerIterator it(dy, k); it; ++it)
            for (int i = 0; i < nx; ++i)
                t.emplace_back(static_cast<long>(nx) * it.row() + i,
                               static_cast<long>(nx) * it.col() + i, it.value());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

inline SpMat diagonal(const Eigen::VectorXd& v) {
    SpMat d(v.size(), v.size());
    std::vector<Triplet> t;
    t.reserve(static_cast<size_t>(v.size()));
    for (long i = 0; i < v.size(); ++i) t.emplace_back(i, i, v[i]);
    d.setFromTriplets(t.begin(), t.end());
    return d;
}

}  // namespace detail

class ModeSolver {
public:
    ModeSolver(const IndexMap& map, double wavelength, SolverOptions opts = {})
        : map_(map), wavelength_(wavelength), opts_(opts) {
        if (!(wavelength > 0)) throw std::invalid_argument("ModeSolver: wavelength <= 0");
        n_core_ = std::sqrt(map.n2_core);
        n_clad_ = std::sqrt(map.n2_clad);
        if (map.n2_core > map.n2_clad + 1e-15) assemble();
    }

    const IndexMap& map() const { return map_; }

    /// Up to `count` guided modes sorted by descending n_eff. Window-filling
    /// background (slab-box) states are not guided modes and are filtered by
    /// their edge-power fraction.
    std::vector<ModeSolution> solve(int count, std::optional<double> n_guess = {}) {
        if (count < 1) throw std::invalid_argument("solve_modes: count must be >= 1");
        if (map_.n2_core <= map_.n2_clad + 1e-15) return {};
        const double guess = n_guess.value_or(opts_.n_guess.value_or(n_core_ - 0.05));
        if (!(guess > n_clad_ && guess < n_core_))
            throw std::invalid_argument("solve_modes: n_guess must lie in (n_clad, n_core)");
        const double sigma = square(guess);
        factorize(sigma);

        int m = std::clamp(6 * (count + 4), 48, opts_.max_krylov);
        double last_bad_residual = 0;
        std::vector<ModeSolution> guided;
        while (true) {
            auto [cands, bad_residual] = arnoldi_candidates(sigma, m);
            last_bad_residual = bad_residual;
            guided = build_modes(cands);
            if (static_cast<int>(guided.size()) >= count || m >= opts_.max_krylov) break;
            m = std::min(opts_.max_krylov, m + m / 2 + 8);
        }
        if (guided.empty() && last_bad_residual > 0)
            throw numerical_error(
                "solve_modes: eigen iteration did not converge within the Krylov budget; "
                "last residual " + fmt_g(last_bad_residual));
        if (static_cast<int>(guided.size()) > count) guided.resize(count);
        return guided;
    }

    /// Apply the exact vector mirror about x = 0 to a mode's fields.
    static void mirror_fields(const Eigen::ArrayXXd& ex, const Eigen::ArrayXXd& ey,
                              Eigen::ArrayXXd& mex, Eigen::ArrayXXd& mey) {
        const long ny = ex.rows(), nx = ex.cols();
        mex.resize(ny, nx);
        mey.resize(ny, nx);
        for (long i = 0; i < nx; ++i) mex.col(i) = -ex.col(nx - 1 - i);
        mey.col(0) = 0.0;  // partner column is the wall ghost
        for (long i = 1; i < nx; ++i) mey.col(i) = ey.col(nx - i);
    }

private:
    const IndexMap& map_;
    double wavelength_;
    SolverOptions opts_;
    double n_core_ = 0, n_clad_ = 0;
    long n_ = 0;  // unknowns per component
    SpMat m_;     // 2n x 2n operator
    std::unique_ptr<Eigen::SparseLU<SpMat>> lu_;
    double factored_sigma_ = std::numeric_limits<double>::quiet_NaN();

    void assemble() {
        const GridSpec& g = map_.grid;
        const long nx = g.nx, ny = g.ny;
        n_ = nx * ny;
        const double k0 = 2.0 * kPi / wavelength_;
        const double hx = k0 * g.dx, hy = k0 * g.dy;

        const SpMat dex = detail::kron_x(detail::d_forward(g.nx, hx, opts_.wall_right), g.nx, g.ny);
        const SpMat dhx = detail::kron_x(detail::d_backward(g.nx, hx, opts_.wall_left), g.nx, g.ny);
        const SpMat dey = detail::kron_y(detail::d_forward(g.ny, hy, opts_.wall_top), g.nx, g.ny);
        const SpMat dhy = detail::kron_y(detail::d_backward(g.ny, hy, opts_.wall_bottom), g.nx, g.ny);

        Eigen::VectorXd er_xx(n_), er_yy(n_), er_zz_inv(n_);
        for (long j = 0; j < ny; ++j)
            for (long i = 0; i < nx; ++i) {
                const long k = j * nx + i;
                er_xx[k] = 0.5 * (map_.eps_for_ex(i, j - 1) + map_.eps_for_ex(i, j));
                er_yy[k] = 0.5 * (map_.eps_for_ey(i - 1, j) + map_.eps_for_ey(i, j));
                er_zz_inv[k] = 4.0 / (map_.eps_for_ez(i - 1, j - 1) + map_.eps_for_ez(i, j - 1) +
                                      map_.eps_for_ez(i - 1, j) + map_.eps_for_ez(i, j));
            }
        const SpMat exx = detail::diagonal(er_xx);
        const SpMat eyy = detail::diagonal(er_yy);
        const SpMat zin = detail::diagonal(er_zz_inv);
        SpMat eye(n_, n_);
        eye.setIdentity();

        const SpMat a11 = dex * zin * dhy;
        const SpMat a12 = -(eye + SpMat(dex * zin * dhx));
        const SpMat a21 = eye + SpMat(dey * zin * dhy);
        const SpMat a22 = -(dey * zin * dhx);
        const SpMat b11 = dhx * dey;
        const SpMat b12 = -(eyy + SpMat(dhx * dex));
        const SpMat b21 = exx + SpMat(dhy * dey);
        const SpMat b22 = -(dhy * dex);

        const SpMat m11 = -(a11 * b11 + a12 * b21);
        const SpMat m12 = -(a11 * b12 + a12 * b22);
        const SpMat m21 = -(a21 * b11 + a22 * b21);
        const SpMat m22 = -(a21 * b12 + a22 * b22);

        m_.resize(2 * n_, 2 * n_);
        std::vector<Triplet> t;
        t.reserve(static_cast<size_t>(m11.nonZeros()) + m12.nonZeros() + m21.nonZeros() +
                  m22.nonZeros());
        auto add_block = [&](const SpMat& blk, long ro, long co) {
            for (int k = 0; k < blk.outerSize(); ++k)
                for (SpMat::InnerIterator it(blk, k); it; ++it)
                    t.emplace_back(it.row() + ro, it.col() + co, it.value());
        };
        add_block(m11, 0, 0);
        add_block(m12, 0, n_);
        add_block(m21, n_, 0);
        add_block(m22, n_, n_);
        m_.setFromTriplets(t.begin(), t.end());
    }

    void factorize(double sigma) {
        if (lu_ && factored_sigma_ == sigma) return;
        SpMat shifted = m_;
        SpMat eye(2 * n_, 2 * n_);
        eye.setIdentity();
        shifted -= sigma * eye;
        lu_ = std::make_unique<Eigen::SparseLU<SpMat>>();
        lu_->compute(shifted);
        if (lu_->info() != Eigen::Success)
            throw numerical_error("solve_modes: sparse factorization of the shifted operator failed");
        factored_sigma_ = sigma;
    }

    struct Candidate {
        double lambda = 0;  // n_eff^2
        Eigen::VectorXd v;
        double residual = 0;
    };

    // One Arnoldi sweep with m vectors on (M - sigma I)^{-1}; returns the
    // residual-converged in-band candidates plus the worst residual among
    // in-band Ritz pairs that failed the check.
    std::pair<std::vector<Candidate>, double> arnoldi_candidates(double sigma, int m) {
        const long dim = 2 * n_;
        m = static_cast<int>(std::min<long>(m, dim - 2));
        Eigen::MatrixXd v(dim, m + 1);
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);

        std::mt19937_64 rng(0x5eedULL);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (long i = 0; i < dim; ++i) v(i, 0) = uni(rng);
        v.col(0).normalize();

        int steps = m;
        for (int k = 0; k < m; ++k) {
            Eigen::VectorXd w = lu_->solve(v.col(k));
            for (int pass = 0; pass < 2; ++pass)
                for (int j = 0; j <= k; ++j) {
                    const double c = v.col(j).dot(w);
                    h(j, k) += c;
                    w -= c * v.col(j);
                }
            const double nrm = w.norm();
            h(k + 1, k) = nrm;
            if (nrm < 1e-12) {  // invariant subspace found
                steps = k + 1;
                break;
            }
            v.col(k + 1) = w / nrm;
        }

        Eigen::MatrixXd hm = h.topLeftCorner(steps, steps);
        Eigen::EigenSolver<Eigen::MatrixXd> es(hm);
        if (es.info() != Eigen::Success)
            throw numerical_error("solve_modes: dense Hessenberg eigensolve failed");

        const double band_lo = map_.n2_clad * (1.0 + 1e-12);
        const double band_hi = map_.n2_core * (1.0 - 1e-12);
        std::vector<Candidate> out;
        double worst_bad = 0;
        for (int k = 0; k < steps; ++k) {
            const std::complex<double> mu = es.eigenvalues()[k];
            if (std::abs(mu) < 1e-14) continue;
            const std::complex<double> lam = sigma + 1.0 / mu;
            if (std::abs(lam.imag()) > 1e-8 * (1.0 + std::abs(lam.real()))) continue;
            const double lr = lam.real();
            if (lr <= band_lo || lr >= band_hi) continue;
            Eigen::VectorXd x = (v.leftCols(steps) * es.eigenvectors().col(k).real());
            const double xn = x.norm();
            if (xn < 1e-14) continue;
            x /= xn;
            const double res = (m_ * x - lr * x).norm();
            if (res < opts_.residual_tol * (1.0 + std::abs(lr))) {
                // Drop duplicates (conjugate-pair copies converge to the same vector).
                bool dup = false;
                for (const Candidate& c : out)
                    if (std::abs(c.lambda - lr) < 1e-13 * (1.0 + std::abs(lr)) &&
                        std::abs(std::abs(c.v.dot(x)) - 1.0) < 1e-6)
                        dup = true;
                if (!dup) out.push_back({lr, std::move(x), res});
            } else {
                worst_bad = std::max(worst_bad, res);
            }
        }
        std::sort(out.begin(), out.end(),
                  [](const Candidate& a, const Candidate& b) { return a.lambda > b.lambda; });
        return {std::move(out), worst_bad};
    }

    std::vector<ModeSolution> build_modes(std::vector<Candidate>& cands) {
        // Near-degenerate pairs on mirror-symmetric maps are replaced by their
        // symmetrized/antisymmetrized combinations before classification.
        if (map_.mirror_symmetric) {
            for (size_t k = 0; k + 1 < cands.size(); ++k) {
                if (std::abs(cands[k].lambda - cands[k + 1].lambda) >
                    opts_.degeneracy_tol * (1.0 + std::abs(cands[k].lambda)))
                    continue;
                symmetrize_pair(cands[k], cands[k + 1]);
            }
        }
        std::vector<ModeSolution> out;
        for (Candidate& c : cands) {
            ModeSolution mode = to_mode(c);
            if (mode.edge_power > opts_.edge_power_tol) continue;
            out.push_back(std::move(mode));
        }
        std::sort(out.begin(), out.end(),
                  [](const ModeSolution& a, const ModeSolution& b) { return a.n_eff > b.n_eff; });
        return out;
    }

    Eigen::VectorXd mirror_vector(const Eigen::VectorXd& x) const {
        const long nx = map_.grid.nx, ny = map_.grid.ny;
        Eigen::VectorXd out(2 * n_);
        for (long j = 0; j < ny; ++j)
            for (long i = 0; i < nx; ++i) {
                out[j * nx + (nx - 1 - i)] = -x[j * nx + i];
                const long im = (nx - i) % nx;  // i = 0 pairs with the wall ghost
                out[n_ + j * nx + im] = i == 0 ? 0.0 : x[n_ + j * nx + i];
            }
        return out;
    }

    void symmetrize_pair(Candidate& a, Candidate& b) {
        Eigen::VectorXd ma = mirror_vector(a.v);
        Eigen::VectorXd p = a.v + ma, q = a.v - ma;
        if (p.norm() < 1e-8 || q.norm() < 1e-8) {
            // a is already parity-pure; use b for the complementary branch.
            Eigen::VectorXd mb = mirror_vector(b.v);
            p = a.v + ma;
            q = b.v + mb;
            if (q.norm() < 1e-8) q = b.v - mb;
            if (p.norm() < 1e-8) p = a.v - ma;
        }
        p.normalize();
        q.normalize();
        const double lp = p.dot(m_ * p);
        const double lq = q.dot(m_ * q);
        const double rp = (m_ * p - lp * p).norm();
        const double rq = (m_ * q - lq * q).norm();
        Candidate first{std::max(lp, lq), lp >= lq ? p : q, lp >= lq ? rp : rq};
        Candidate second{std::min(lp, lq), lp >= lq ? q : p, lp >= lq ? rq : rp};
        a = std::move(first);
        b = std::move(second);
    }

    ModeSolution to_mode(const Candidate& c) const {
        const GridSpec& g = map_.grid;
        ModeSolution mode;
        mode.n_eff = std::sqrt(c.lambda);
        mode.residual = c.residual;
        mode.ex.resize(g.ny, g.nx);
        mode.ey.resize(g.ny, g.nx);
        for (long j = 0; j < g.ny; ++j)
            for (long i = 0; i < g.nx; ++i) {
                mode.ex(j, i) = c.v[j * g.nx + i];
                mode.ey(j, i) = c.v[n_ + j * g.nx + i];
            }
        // Normalize power to 1 and fix the overall sign deterministically.
        const double power = (mode.ex.square().sum() + mode.ey.square().sum()) * g.dx * g.dy;
        const double scale = 1.0 / std::sqrt(power);
        mode.ex *= scale;
        mode.ey *= scale;
        double peak = 0;
        int sign = 1;
        auto scan = [&](const Eigen::ArrayXXd& f) {
            for (long j = 0; j < f.rows(); ++j)
                for (long i = 0; i < f.cols(); ++i)
                    if (std::abs(f(j, i)) > peak) {
                        peak = std::abs(f(j, i));
                        sign = f(j, i) >= 0 ? 1 : -1;
                    }
        };
        scan(mode.ex);
        scan(mode.ey);
        if (sign < 0) {
            mode.ex = -mode.ex;
            mode.ey = -mode.ey;
        }

        const double px = mode.ex.square().sum(), py = mode.ey.square().sum();
        mode.polarization = px >= py ? Polarization::TE : Polarization::TM;
        mode.polarization_fraction = std::max(px, py) / (px + py);
        mode.edge_power = edge_power_fraction(mode);
        if (map_.mirror_symmetric) classify_symmetry(mode);
        return mode;
    }

    double edge_power_fraction(const ModeSolution& mode) const {
        const GridSpec& g = map_.grid;
        const int bx = map_.x_uniform
                           ? 0
                           : std::min(g.nx / 4, static_cast<int>(std::ceil(opts_.edge_band / g.dx)));
        const int by = std::min(g.ny / 4, static_cast<int>(std::ceil(opts_.edge_band / g.dy)));
        double edge = 0, total = 0;
        for (long j = 0; j < g.ny; ++j)
            for (long i = 0; i < g.nx; ++i) {
                const double p = square(mode.ex(j, i)) + square(mode.ey(j, i));
                total += p;
                if (i < bx || i >= g.nx - bx || j < by || j >= g.ny - by) edge += p;
            }
        return total > 0 ? edge / total : 0.0;
    }

    void classify_symmetry(ModeSolution& mode) const {
        const long nx = map_.grid.nx, ny = map_.grid.ny;
        const bool te = mode.polarization == Polarization::TE;
        const Eigen::ArrayXXd& f = te ? mode.ex : mode.ey;
        double num = 0, den = 0;
        for (long j = 0; j < ny; ++j)
            for (long i = 0; i < nx; ++i) {
                const long im = te ? nx - 1 - i : nx - i;
                if (im < 0 || im >= nx) continue;
                num += f(j, i) * f(j, im);
                den += square(f(j, i));
            }
        mode.mirror_correlation = den > 0 ? num / den : 0.0;
        if (mode.mirror_correlation >= 0.9)
            mode.symmetry = Symmetry::symmetric;
        else if (mode.mirror_correlation <= -0.9)
            mode.symmetry = Symmetry::antisymmetric;
        else
            mode.symmetry = Symmetry::none;
    }
};

/// Spec-level entry point: guided modes of a cross-section map.
inline std::vector<ModeSolution> solve_modes(const IndexMap& map, double wavelength,
                                             int count, std::optional<double> n_guess = {},
                                             const SolverOptions& opts = {}) {
    ModeSolver solver(map, wavelength, opts);
    return solver.solve(count, n_guess);
}

/// Re-derive polarization and (for mirror-symmetric maps) symmetry labels of
/// an already-solved mode. Correlation magnitudes below 0.9 flag a
/// hybridized/degenerate mode and yield symmetry "none".
inline ModeClassification classify_mode(const ModeSolution& mode, const IndexMap& map) {
    ModeClassification c;
    c.polarization = mode.polarization;
    c.polarization_fraction = mode.polarization_fraction;
    if (map.mirror_symmetric) {
        c.symmetry = mode.symmetry;
        c.correlation = mode.mirror_correlation;
        c.hybridized_warning = std::abs(c.correlation) < 0.9;
    }
    return c;
}

/// Solve the coupled pair and extract the per-polarization supermode
/// splittings. Throws numerical_error when a full (symmetric, antisymmetric)
/// pair per polarization cannot be identified.
inline CouplingStrength coupling_strength(const geometry::CoupledPair& pair,
                                          const geometry::MaterialStack& stack,
                                          const geometry::RasterParams& grid,
                                          SolverOptions opts = {}) {
    const IndexMap map = rasterize(pair, stack, grid);
    ModeSolver solver(map, stack.wavelength, opts);
    CouplingStrength out;
    out.gap = pair.gap;
    for (int count : {8, 14, 22}) {
        const auto modes = solver.solve(count);
        double n_sym[2] = {0, 0}, n_anti[2] = {0, 0};
        for (const ModeSolution& m : modes) {
            const int p = m.polarization == Polarization::TE ? 0 : 1;
            if (m.symmetry == Symmetry::symmetric && n_sym[p] == 0) n_sym[p] = m.n_eff;
            if (m.symmetry == Symmetry::antisymmetric && n_anti[p] == 0) n_anti[p] = m.n_eff;
        }
        if (n_sym[0] > 0 && n_anti[0] > 0 && n_sym[1] > 0 && n_anti[1] > 0) {
            out.delta_n_te = n_sym[0] - n_anti[0];
            out.delta_n_tm = n_sym[1] - n_anti[1];
            if (out.delta_n_te <= 0 || out.delta_n_tm <= 0)
                throw numerical_error(
                    "coupling_strength: supermode ordering violated (n_sym <= n_anti)");
            out.xi = out.delta_n_te / out.delta_n_tm;
            return out;
        }
        if (static_cast<int>(modes.size()) < count) break;  // spectrum exhausted
    }
    throw numerical_error(
        "coupling_strength: fewer than 4 guided supermodes found at gap " +
        fmt_g(pair.gap) + " um; geometry outside coupled-mode validity");
}

/// Interpolate both components to cell centers (for CSV export/plotting).
inline void cell_centered_fields(const ModeSolution& mode, Eigen::ArrayXXd& ex_cc,
                                 Eigen::ArrayXXd& ey_cc) {
    const long ny = mode.ex.rows(), nx = mode.ex.cols();
    ex_cc.setZero(ny, nx);
    ey_cc.setZero(ny, nx);
    for (long j = 0; j < ny; ++j)
        for (long i = 0; i < nx; ++i) {
            const double exn = j + 1 < ny ? mode.ex(j + 1, i) : 0.0;
            const double eyn = i + 1 < nx ? mode.ey(j, i + 1) : 0.0;
            ex_cc(j, i) = 0.5 * (mode.ex(j, i) + exn);
            ey_cc(j, i) = 0.5 * (mode.ey(j, i) + eyn);
        }
}

}  // namespace bsa::modes
