#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "psidolab/fourier.hpp"
#include "psidolab/grid.hpp"

namespace psidolab {

// A point xi = (x, p) of phase space. On-lattice means x is a multiple of h
// and p a multiple of pi/L per axis; those Weyl operators are exact
// permutation-times-diagonal unitaries.
struct PhasePoint {
    std::vector<double> x;
    std::vector<double> p;

    PhasePoint() = default;
    PhasePoint(std::vector<double> xx, std::vector<double> pp)
        : x(std::move(xx)), p(std::move(pp)) {
        if (x.size() != p.size())
            throw std::invalid_argument("PhasePoint: x and p must have equal dimension");
    }
    PhasePoint(double xx, double pp) : x{xx}, p{pp} {}

    int dim() const { return static_cast<int>(x.size()); }

    bool on_lattice(const GridSpec& grid) const {
        const double h = grid.spacing();
        const double dp = grid.dual_spacing();
        for (double xi : x)
            if (std::abs(xi / h - std::round(xi / h)) > 1e-9) return false;
        for (double pi : p)
            if (std::abs(pi / dp - std::round(pi / dp)) > 1e-9) return false;
        return true;
    }

    PhasePoint operator+(const PhasePoint& o) const {
        PhasePoint r = *this;
        for (int a = 0; a < dim(); ++a) {
            r.x[a] += o.x[a];
            r.p[a] += o.p[a];
        }
        return r;
    }
    PhasePoint operator-() const {
        PhasePoint r = *this;
        for (int a = 0; a < dim(); ++a) {
            r.x[a] = -r.x[a];
            r.p[a] = -r.p[a];
        }
        return r;
    }
};

// sigma((x,p),(y,k)) = <y,p> - <x,k>
inline double symplectic_form(const PhasePoint& xi, const PhasePoint& eta) {
    double s = 0.0;
    for (int a = 0; a < xi.dim(); ++a) s += eta.x[a] * xi.p[a] - xi.x[a] * eta.p[a];
    return s;
}

// W(xi) psi = e^{i<.-x/2, p>} psi(. - x). The translation is circular for
// on-lattice x and trigonometric interpolation otherwise; the half phase is
// applied in the position domain after the shift.
inline SampledFunction weyl_apply(const PhasePoint& xi, const SampledFunction& psi) {
    if (psi.tag.space != Space::X) throw std::invalid_argument("weyl_apply: psi must live on X");
    if (xi.dim() != psi.grid.dim)
        throw std::invalid_argument("weyl_apply: phase point dimension mismatch");
    const int dim = psi.grid.dim;
    const int n = psi.grid.samples_per_axis;
    const double h = psi.grid.spacing();
    SampledFunction out = psi;
    for (int a = 0; a < dim; ++a)
        detail::shift_axis(out.values, dim, static_cast<std::size_t>(n), a, xi.x[a], h);
    double half = 0.0;
    for (int a = 0; a < dim; ++a) half += 0.5 * xi.x[a] * xi.p[a];
    std::vector<int> idx(dim);
    for (std::size_t flat = 0; flat < out.values.size(); ++flat) {
        detail::decode_index(flat, dim, n, idx.data());
        double yp = 0.0;
        for (int a = 0; a < dim; ++a) yp += psi.grid.coord(idx[a]) * xi.p[a];
        out.values[flat] *= std::polar(1.0, yp - half);
    }
    return out;
}

// Dense action matrix of W(xi) on value vectors (the operator itself, not a
// kernel). Permutation-times-diagonal for on-lattice xi.
inline Eigen::MatrixXcd weyl_action_matrix(const PhasePoint& xi, const GridSpec& grid) {
    const int dim = grid.dim;
    const int n = grid.samples_per_axis;
    const std::size_t m = grid.points(dim);
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m),
                                                static_cast<Eigen::Index>(m));
    const double h = grid.spacing();
    bool lattice = xi.on_lattice(grid);
    if (lattice) {
        double half = 0.0;
        for (int a = 0; a < dim; ++a) half += 0.5 * xi.x[a] * xi.p[a];
        std::vector<int> shift(dim), idx(dim), src(dim);
        for (int a = 0; a < dim; ++a) {
            int s = static_cast<int>(std::llround(xi.x[a] / h)) % n;
            shift[a] = (s + n) % n;
        }
        for (std::size_t row = 0; row < m; ++row) {
            detail::decode_index(row, dim, n, idx.data());
            double yp = 0.0;
            for (int a = 0; a < dim; ++a) {
                yp += grid.coord(idx[a]) * xi.p[a];
                src[a] = (idx[a] - shift[a] % n + n) % n;
            }
            w(static_cast<Eigen::Index>(row),
              static_cast<Eigen::Index>(detail::encode_index(src.data(), dim, n))) =
                std::polar(1.0, yp - half);
        }
        return w;
    }
    SampledFunction basis = zeros_like(SpaceTag::x(), grid);
    for (std::size_t col = 0; col < m; ++col) {
        basis.values.assign(m, cplx{0.0, 0.0});
        basis.values[col] = 1.0;
        const SampledFunction img = weyl_apply(xi, basis);
        for (std::size_t row = 0; row < m; ++row)
            w(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = img.values[row];
    }
    return w;
}

// Relative residual of W(xi) W(eta) = e^{(i/2) sigma(xi,eta)} W(xi+eta)
// on a test vector.
inline double composition_defect(const PhasePoint& xi, const PhasePoint& eta,
                                 const SampledFunction& psi) {
    const double nrm = lp_norm(psi, 2.0);
    if (nrm == 0.0) throw std::domain_error("composition_defect: test vector must be nonzero");
    const SampledFunction lhs = weyl_apply(xi, weyl_apply(eta, psi));
    SampledFunction rhs = weyl_apply(xi + eta, psi);
    const cplx phase = std::polar(1.0, 0.5 * symplectic_form(xi, eta));
    SampledFunction diff = lhs;
    for (std::size_t i = 0; i < diff.values.size(); ++i)
        diff.values[i] -= phase * rhs.values[i];
    return lp_norm(diff, 2.0) / nrm;
}

// w(xi) = (phi, W(xi) psi) sampled at the lattice points of phase_grid.
// The quadrature grid may differ from the state grid; for each x node the
// dual row is computed in one batch.
inline SampledFunction matrix_coefficient(const SampledFunction& phi, const SampledFunction& psi,
                                          const GridSpec& phase_grid) {
    require_same_layout(phi, psi, "matrix_coefficient");
    if (phi.tag.space != Space::X)
        throw std::invalid_argument("matrix_coefficient: states must live on X");
    if (phase_grid.dim != phi.grid.dim)
        throw std::invalid_argument("matrix_coefficient: phase grid dimension mismatch");

    const int dim = phi.grid.dim;
    const int ns = phi.grid.samples_per_axis;
    const int nq = phase_grid.samples_per_axis;
    const double hs = phi.grid.spacing();
    const double weight = std::pow(hs, dim);
    const bool canonical = phase_grid == phi.grid;

    SampledFunction out = zeros_like(SpaceTag::phase(dim), phase_grid);
    const std::size_t xnodes = phase_grid.points(dim);
    const std::size_t pnodes = xnodes;
    std::vector<int> xi_idx(dim), pi_idx(dim), yi_idx(dim);

    for (std::size_t xflat = 0; xflat < xnodes; ++xflat) {
        detail::decode_index(xflat, dim, nq, xi_idx.data());
        std::vector<double> xv(dim);
        for (int a = 0; a < dim; ++a) xv[a] = phase_grid.coord(xi_idx[a]);

        // g = conj(phi) . (T_x psi) on the state grid
        SampledFunction g = psi;
        for (int a = 0; a < dim; ++a)
            detail::shift_axis(g.values, dim, static_cast<std::size_t>(ns), a, xv[a], hs);
        for (std::size_t i = 0; i < g.values.size(); ++i)
            g.values[i] *= std::conj(phi.values[i]);

        if (canonical) {
            SampledFunction row = fourier_x(g, FourierSign::Conjugate);
            for (std::size_t pflat = 0; pflat < pnodes; ++pflat) {
                detail::decode_index(pflat, dim, nq, pi_idx.data());
                double xp = 0.0;
                for (int a = 0; a < dim; ++a) xp += xv[a] * phase_grid.dual_coord(pi_idx[a]);
                out.values[xflat * pnodes + pflat] = std::polar(1.0, -0.5 * xp) *
                                                     row.values[pflat];
            }
        } else {
            for (std::size_t pflat = 0; pflat < pnodes; ++pflat) {
                detail::decode_index(pflat, dim, nq, pi_idx.data());
                std::vector<double> pv(dim);
                double xp = 0.0;
                for (int a = 0; a < dim; ++a) {
                    pv[a] = phase_grid.dual_coord(pi_idx[a]);
                    xp += xv[a] * pv[a];
                }
                std::vector<cplx> terms(g.values.size());
                for (std::size_t y = 0; y < g.values.size(); ++y) {
                    detail::decode_index(y, dim, ns, yi_idx.data());
                    double yp = 0.0;
                    for (int a = 0; a < dim; ++a) yp += phi.grid.coord(yi_idx[a]) * pv[a];
                    terms[y] = g.values[y] * std::polar(1.0, yp);
                }
                out.values[xflat * pnodes + pflat] =
                    std::polar(1.0, -0.5 * xp) * weight *
                    detail::pairwise_sum(terms.data(), terms.size());
            }
        }
    }
    return out;
}

// | ||w||_2^2 - ||phi||^2 ||psi||^2 | / (||phi||^2 ||psi||^2) with the
// xi integral realized on phase_grid. The truncation box is the experiment
// parameter; on the canonical grid the identity is exact to rounding.
inline double parseval_defect(const SampledFunction& phi, const SampledFunction& psi,
                              const GridSpec& phase_grid) {
    const double np = lp_norm(phi, 2.0);
    const double nq = lp_norm(psi, 2.0);
    if (np == 0.0 || nq == 0.0)
        throw std::domain_error("parseval_defect: states must be nonzero");
    const SampledFunction w = matrix_coefficient(phi, psi, phase_grid);
    const double lhs = std::pow(lp_norm(w, 2.0), 2.0);
    const double rhs = np * np * nq * nq;
    return std::abs(lhs - rhs) / rhs;
}

}  // namespace psidolab
