#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "psidolab/fourier.hpp"
#include "psidolab/grid.hpp"

namespace psidolab {

// Scalar tau quantization context. tau = 0 is the Kohn-Nirenberg ordering,
// tau = 1/2 the Weyl (symmetric) one.
struct QuantizationParams {
    double tau = 0.5;
    GridSpec grid;
    std::vector<int> decomposition;

    QuantizationParams() = default;
    QuantizationParams(double t, GridSpec g)
        : tau(t), grid(g), decomposition{g.dim} {
        if (!std::isfinite(tau)) throw std::invalid_argument("QuantizationParams: tau not finite");
    }
    QuantizationParams(double t, GridSpec g, std::vector<int> blocks)
        : tau(t), grid(g), decomposition(std::move(blocks)) {
        if (!std::isfinite(tau)) throw std::invalid_argument("QuantizationParams: tau not finite");
        SpaceTag::phase(decomposition).validate(grid.dim);
    }
};

// Dense kernel K(x_i, y_j) of an operator on the h^n-weighted lattice space;
// the operator action is psi -> h^n * K * psi.
struct OperatorKernel {
    GridSpec grid;
    Eigen::MatrixXcd values;

    double measure_weight() const { return std::pow(grid.spacing(), grid.dim); }
    // matrix that acts directly on value vectors
    Eigen::MatrixXcd action_matrix() const { return measure_weight() * values; }

    SampledFunction apply(const SampledFunction& psi) const {
        if (psi.tag.space != Space::X || !(psi.grid == grid))
            throw std::invalid_argument("OperatorKernel::apply: state grid mismatch");
        Eigen::Map<const Eigen::VectorXcd> v(psi.values.data(),
                                             static_cast<Eigen::Index>(psi.values.size()));
        Eigen::VectorXcd out = measure_weight() * (values * v);
        SampledFunction res = psi;
        for (std::size_t i = 0; i < res.values.size(); ++i)
            res.values[i] = out(static_cast<Eigen::Index>(i));
        return res;
    }
};

inline OperatorKernel kernel_from_action(const GridSpec& grid, const Eigen::MatrixXcd& action) {
    return OperatorKernel{grid, action / std::pow(grid.spacing(), grid.dim)};
}

namespace detail {

inline void require_phase_match(const SampledFunction& a, const GridSpec& grid,
                                const char* where) {
    if (a.tag.space != Space::Phase)
        throw std::invalid_argument(std::string(where) + ": symbol must live on phase space");
    if (!(a.grid == grid))
        throw std::invalid_argument(std::string(where) + ": symbol grid does not match params");
}

}  // namespace detail

// Kernel of the tau-quantized operator: invert the Fourier transform in the
// momentum slot, then evaluate at ((1-tau) x + tau y, x - y). The second
// argument is always on-lattice; the first is read off a translated copy of
// each difference diagonal, so tau in {0,1} is exact and other tau are exact
// on band-limited symbols.
inline OperatorKernel kernel_from_symbol(const SampledFunction& a,
                                         const QuantizationParams& params) {
    detail::require_phase_match(a, params.grid, "kernel_from_symbol");
    const int dim = params.grid.dim;
    const int axes = 2 * dim;
    const int n = params.grid.samples_per_axis;
    const double h = params.grid.spacing();
    const std::size_t m = params.grid.points(dim);

    // b = (id (x) F_X^{-1}) a on the x (x) x lattice
    std::vector<cplx> b = a.values;
    for (int ax = dim; ax < axes; ++ax)
        detail::centered_axis_transform(b, axes, static_cast<std::size_t>(n), ax, +1,
                                        1.0 / (2.0 * params.grid.half_width));

    OperatorKernel ker{params.grid,
                       Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m),
                                              static_cast<Eigen::Index>(m))};
    std::vector<int> didx(dim), iidx(dim), jidx(dim);
    std::vector<cplx> slice(m);
    for (std::size_t dflat = 0; dflat < m; ++dflat) {
        detail::decode_index(dflat, dim, n, didx.data());
        // wrapped difference coordinate and its array index in the v slot
        std::vector<int> vidx(dim);
        std::vector<double> vc(dim);
        for (int a2 = 0; a2 < dim; ++a2) {
            const int centered = ((didx[a2] + n / 2) % n) - n / 2;
            vc[a2] = centered * h;
            vidx[a2] = centered + n / 2;
        }
        for (std::size_t u = 0; u < m; ++u) {
            detail::decode_index(u, dim, n, iidx.data());
            std::vector<int> full(axes);
            for (int a2 = 0; a2 < dim; ++a2) {
                full[a2] = iidx[a2];
                full[dim + a2] = vidx[a2];
            }
            slice[u] = b[detail::encode_index(full.data(), axes, n)];
        }
        for (int a2 = 0; a2 < dim; ++a2)
            detail::shift_axis(slice, dim, static_cast<std::size_t>(n), a2,
                               params.tau * vc[a2], h);
        for (std::size_t i = 0; i < m; ++i) {
            detail::decode_index(i, dim, n, iidx.data());
            for (int a2 = 0; a2 < dim; ++a2) jidx[a2] = (iidx[a2] - didx[a2] + n) % n;
            ker.values(static_cast<Eigen::Index>(i),
                       static_cast<Eigen::Index>(detail::encode_index(jidx.data(), dim, n))) =
                slice[i];
        }
    }
    return ker;
}

// Exact inverse of kernel_from_symbol on band-limited symbols.
inline SampledFunction symbol_from_kernel(const OperatorKernel& k,
                                          const QuantizationParams& params) {
    if (!(k.grid == params.grid))
        throw std::invalid_argument("symbol_from_kernel: kernel grid does not match params");
    const int dim = params.grid.dim;
    const int axes = 2 * dim;
    const int n = params.grid.samples_per_axis;
    const double h = params.grid.spacing();
    const std::size_t m = params.grid.points(dim);

    std::vector<cplx> b(m * m);
    std::vector<int> didx(dim), iidx(dim), jidx(dim);
    std::vector<cplx> slice(m);
    for (std::size_t dflat = 0; dflat < m; ++dflat) {
        detail::decode_index(dflat, dim, n, didx.data());
        std::vector<int> vidx(dim);
        std::vector<double> vc(dim);
        for (int a2 = 0; a2 < dim; ++a2) {
            const int centered = ((didx[a2] + n / 2) % n) - n / 2;
            vc[a2] = centered * h;
            vidx[a2] = centered + n / 2;
        }
        for (std::size_t i = 0; i < m; ++i) {
            detail::decode_index(i, dim, n, iidx.data());
            for (int a2 = 0; a2 < dim; ++a2) jidx[a2] = (iidx[a2] - didx[a2] + n) % n;
            slice[i] = k.values(static_cast<Eigen::Index>(i),
                                static_cast<Eigen::Index>(
                                    detail::encode_index(jidx.data(), dim, n)));
        }
        for (int a2 = 0; a2 < dim; ++a2)
            detail::shift_axis(slice, dim, static_cast<std::size_t>(n), a2,
                               -params.tau * vc[a2], h);
        for (std::size_t u = 0; u < m; ++u) {
            detail::decode_index(u, dim, n, iidx.data());
            std::vector<int> full(axes);
            for (int a2 = 0; a2 < dim; ++a2) {
                full[a2] = iidx[a2];
                full[dim + a2] = vidx[a2];
            }
            b[detail::encode_index(full.data(), axes, n)] = slice[u];
        }
    }
    for (int ax = dim; ax < axes; ++ax)
        detail::centered_axis_transform(b, axes, static_cast<std::size_t>(n), ax, -1, h);
    SampledFunction out{SpaceTag::phase(params.decomposition.empty()
                                            ? std::vector<int>{dim}
                                            : params.decomposition),
                        params.grid, std::move(b)};
    return out;
}

// Symbol of the same operator in a different ordering: multiply the
// symplectic transform by e^{i (tau_to - tau_from) <x,p>}.
inline SampledFunction convert_tau(const SampledFunction& a, double tau_from, double tau_to) {
    if (!std::isfinite(tau_from) || !std::isfinite(tau_to))
        throw std::invalid_argument("convert_tau: tau values must be finite");
    if (tau_from == tau_to) return a;
    const double c = tau_to - tau_from;
    const int dim = a.grid.dim;
    return phase_multiplier(a, [c, dim](std::span<const double> pt) {
        double xp = 0.0;
        for (int i = 0; i < dim; ++i) xp += pt[i] * pt[dim + i];
        return std::polar(1.0, c * xp);
    });
}

// tau-composition product realized through kernels: quantize both symbols,
// multiply the operators, read the symbol back.
inline SampledFunction compose_symbols(const SampledFunction& a, const SampledFunction& b,
                                       const QuantizationParams& params) {
    require_same_layout(a, b, "compose_symbols");
    const OperatorKernel ka = kernel_from_symbol(a, params);
    const OperatorKernel kb = kernel_from_symbol(b, params);
    OperatorKernel kc{params.grid, ka.measure_weight() * (ka.values * kb.values)};
    return symbol_from_kernel(kc, params);
}

}  // namespace psidolab
