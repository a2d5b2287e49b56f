#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "psidolab/fourier.hpp"
#include "psidolab/grid.hpp"
#include "psidolab/schatten.hpp"

namespace psidolab {

// Trace-class thresholds for the separable Bessel symbols: the quantization
// of psi_t (x) chi_s extends to a trace-class operator once the exponents
// exceed dim/2 for the Kohn-Nirenberg ordering and dim for general tau.
inline double cordes_threshold(int block_dim, bool tau_zero) {
    return tau_zero ? 0.5 * block_dim : static_cast<double>(block_dim);
}

inline bool cordes_exponents_valid(const std::vector<double>& t, const std::vector<double>& s,
                                   const std::vector<int>& blocks, bool tau_zero) {
    for (std::size_t j = 0; j < blocks.size(); ++j)
        if (t[j] <= cordes_threshold(blocks[j], tau_zero) ||
            s[j] <= cordes_threshold(blocks[j], tau_zero))
            return false;
    return true;
}

// Bessel potential kernel: the inverse transform of <.>^{-s}, sampled on the
// primal grid for which = X and on the dual grid for which = Xstar. Real and
// even to rounding; unit mass exactly in the discrete quadrature.
inline SampledFunction bessel_kernel(double s, const GridSpec& grid, Space which) {
    if (!(s > 0.0)) throw std::domain_error("bessel_kernel: order s must be positive");
    if (which == Space::X) {
        SampledFunction mult = sample(
            [s](std::span<const double> p) {
                double z2 = 0.0;
                for (double v : p) z2 += v * v;
                return cplx{std::pow(1.0 + z2, -0.5 * s), 0.0};
            },
            grid, SpaceTag::xstar());
        return fourier_xstar(mult, FourierSign::Conjugate);
    }
    if (which == Space::Xstar) {
        SampledFunction mult = sample(
            [s](std::span<const double> x) {
                double z2 = 0.0;
                for (double v : x) z2 += v * v;
                return cplx{std::pow(1.0 + z2, -0.5 * s), 0.0};
            },
            grid, SpaceTag::x());
        return fourier_x(mult, FourierSign::Conjugate);
    }
    throw std::invalid_argument("bessel_kernel: which must be X or Xstar");
}

// Block tensor variant psi_{s_1} (x) ... (x) psi_{s_k} over an orthogonal
// decomposition; blocks are contiguous axis groups.
inline SampledFunction bessel_kernel_blocks(const std::vector<double>& s, const GridSpec& grid,
                                            const std::vector<int>& blocks, Space which) {
    SpaceTag::phase(blocks).validate(grid.dim);
    if (s.size() != blocks.size())
        throw std::invalid_argument("bessel_kernel_blocks: order count must match block count");
    SampledFunction out{which == Space::X ? SpaceTag::x() : SpaceTag::xstar(), grid, {}};
    out.values.assign(grid.points(grid.dim), cplx{1.0, 0.0});
    std::vector<SampledFunction> factors;
    for (std::size_t j = 0; j < blocks.size(); ++j)
        factors.push_back(bessel_kernel(s[j], GridSpec(blocks[j], grid.samples_per_axis,
                                                       grid.half_width),
                                        which));
    const int n = grid.samples_per_axis;
    std::vector<int> idx(grid.dim);
    for (std::size_t flat = 0; flat < out.values.size(); ++flat) {
        detail::decode_index(flat, grid.dim, n, idx.data());
        cplx v{1.0, 0.0};
        int ax = 0;
        for (std::size_t j = 0; j < blocks.size(); ++j) {
            v *= factors[j].values[detail::encode_index(idx.data() + ax, blocks[j], n)];
            ax += blocks[j];
        }
        out.values[flat] = v;
    }
    return out;
}

// Separable trace-class seed g(x,p) = prod_j psi_{t_j}(x_j) chi_{s_j}(p_j)
// assembled on the phase grid in x-blocks-then-p-blocks order.
inline SampledFunction cordes_symbol(const std::vector<double>& t, const std::vector<double>& s,
                                     const GridSpec& grid, const std::vector<int>& blocks) {
    SpaceTag::phase(blocks).validate(grid.dim);
    if (t.size() != blocks.size() || s.size() != blocks.size())
        throw std::invalid_argument("cordes_symbol: exponent count must match block count");
    for (double v : t)
        if (!(v > 0.0)) throw std::domain_error("cordes_symbol: exponents must be positive");
    for (double v : s)
        if (!(v > 0.0)) throw std::domain_error("cordes_symbol: exponents must be positive");

    const SampledFunction psi = bessel_kernel_blocks(t, grid, blocks, Space::X);
    const SampledFunction chi = bessel_kernel_blocks(s, grid, blocks, Space::Xstar);
    SampledFunction out = zeros_like(SpaceTag::phase(blocks), grid);
    const std::size_t m = grid.points(grid.dim);
    for (std::size_t ix = 0; ix < m; ++ix)
        for (std::size_t ip = 0; ip < m; ++ip)
            out.values[ix * m + ip] = psi.values[ix] * chi.values[ip];
    return out;
}

// Schatten-1 sums of the quantized symbol across a refinement ladder. The
// symbol is regenerated per grid by the supplied sampler; callers judge
// stabilization of the sequence.
inline std::vector<double> trace_class_probe(
    const std::function<SampledFunction(const GridSpec&)>& symbol_on, double tau,
    const std::vector<GridSpec>& refinements) {
    std::vector<double> sums;
    sums.reserve(refinements.size());
    for (const GridSpec& g : refinements) {
        const SampledFunction sym = symbol_on(g);
        const OperatorKernel k =
            kernel_from_symbol(sym, QuantizationParams(tau, g, sym.tag.blocks));
        sums.push_back(schatten_norm(k, 1.0));
    }
    return sums;
}

}  // namespace psidolab
