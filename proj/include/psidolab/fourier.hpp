#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "psidolab/grid.hpp"

namespace psidolab {

enum class FourierSign {
    Forward,    // kernel e^{-i<x,p>}
    Conjugate,  // kernel e^{+i<x,p>}
};

namespace detail {

inline int sign_of(FourierSign s) { return s == FourierSign::Forward ? -1 : +1; }

inline void require_pow2(int n) {
    if (!is_pow2(static_cast<std::size_t>(n)))
        throw std::invalid_argument("fourier: samples_per_axis must be a power of two, got " +
                                    std::to_string(n));
}

}  // namespace detail

// F_X u(p) = integral over X of e^{-i<x,p>} u(x) dx, realized with weight h
// per axis and centered frequencies; Conjugate flips the kernel sign.
// Exactly unitary from the h^n-weighted lattice onto the dual-weighted one.
inline SampledFunction fourier_x(const SampledFunction& u, FourierSign sign) {
    if (u.tag.space != Space::X) throw std::invalid_argument("fourier_x: input must live on X");
    detail::require_pow2(u.grid.samples_per_axis);
    SampledFunction out{SpaceTag::xstar(), u.grid, u.values};
    const int n = u.grid.samples_per_axis;
    for (int a = 0; a < u.grid.dim; ++a)
        detail::centered_axis_transform(out.values, u.grid.dim, static_cast<std::size_t>(n), a,
                                        detail::sign_of(sign), u.grid.spacing());
    return out;
}

// F_{X*} v(x) with the dual measure (one unit per point is 1/(2L)); the
// Conjugate variant inverts fourier_x exactly.
inline SampledFunction fourier_xstar(const SampledFunction& v, FourierSign sign) {
    if (v.tag.space != Space::Xstar)
        throw std::invalid_argument("fourier_xstar: input must live on X*");
    detail::require_pow2(v.grid.samples_per_axis);
    SampledFunction out{SpaceTag::x(), v.grid, v.values};
    const int n = v.grid.samples_per_axis;
    for (int a = 0; a < v.grid.dim; ++a)
        detail::centered_axis_transform(out.values, v.grid.dim, static_cast<std::size_t>(n), a,
                                        detail::sign_of(sign), 1.0 / (2.0 * v.grid.half_width));
    return out;
}

inline SampledFunction inv_fourier_x(const SampledFunction& v) {
    return fourier_xstar(v, FourierSign::Conjugate);
}

namespace detail {

// swap the x-block and p-block of a phase-space array: out(x,p) = in(p,x)
inline void swap_phase_blocks(std::vector<cplx>& v, int dim, int n) {
    const int axes = 2 * dim;
    std::vector<cplx> tmp(v.size());
    std::vector<int> idx(axes), sw(axes);
    for (std::size_t flat = 0; flat < v.size(); ++flat) {
        decode_index(flat, axes, n, idx.data());
        for (int a = 0; a < dim; ++a) {
            sw[a] = idx[dim + a];
            sw[dim + a] = idx[a];
        }
        tmp[encode_index(sw.data(), axes, n)] = v[flat];
    }
    v = std::move(tmp);
}

// Full plain Fourier transform of a sampled array: forward multiplies by the
// point measure and uses e^{-i<.,.>} on every axis; inverse undoes it exactly.
// Internal tool for convolutions, spectral derivatives and multipliers.
inline std::vector<cplx> plain_forward(const SampledFunction& f) {
    std::vector<cplx> v = f.values;
    const int axes = f.axes();
    const std::size_t n = static_cast<std::size_t>(f.grid.samples_per_axis);
    require_pow2(f.grid.samples_per_axis);
    for (int a = 0; a < axes; ++a)
        centered_axis_transform(v, axes, n, a, -1, f.axis_weight(a));
    return v;
}

inline std::vector<cplx> plain_inverse(std::vector<cplx> v, const SampledFunction& shape) {
    const int axes = shape.axes();
    const std::size_t n = static_cast<std::size_t>(shape.grid.samples_per_axis);
    for (int a = 0; a < axes; ++a) {
        const double w = 1.0 / (static_cast<double>(n) * shape.axis_weight(a));
        centered_axis_transform(v, axes, n, a, +1, w);
    }
    return v;
}

// centered frequency of plain-transform bin k along an axis of spacing `step`
inline double plain_frequency(int kc, int n, double step) {
    return 2.0 * std::numbers::pi * kc / (n * step);
}

}  // namespace detail

// Symplectic Fourier transform on phase space, computed via the factorization
// into a forward transform in x, a conjugate transform in p, and a swap of
// the two blocks. Involutive and unitary on the weighted lattice to rounding.
inline SampledFunction symplectic_fourier(const SampledFunction& a) {
    if (a.tag.space != Space::Phase)
        throw std::invalid_argument("symplectic_fourier: input must live on phase space");
    detail::require_pow2(a.grid.samples_per_axis);
    const int dim = a.grid.dim;
    const int axes = 2 * dim;
    const std::size_t n = static_cast<std::size_t>(a.grid.samples_per_axis);
    SampledFunction out = a;
    for (int ax = 0; ax < dim; ++ax)
        detail::centered_axis_transform(out.values, axes, n, ax, -1, a.grid.spacing());
    for (int ax = dim; ax < axes; ++ax)
        detail::centered_axis_transform(out.values, axes, n, ax, +1,
                                        1.0 / (2.0 * a.grid.half_width));
    detail::swap_phase_blocks(out.values, dim, a.grid.samples_per_axis);
    return out;
}

// f(P) acting on phase-space functions: transform, multiply by f on the
// lattice, transform back (the symplectic transform is its own inverse).
inline SampledFunction phase_multiplier(const SampledFunction& a,
                                        const std::function<cplx(std::span<const double>)>& f) {
    if (a.tag.space != Space::Phase)
        throw std::invalid_argument("phase_multiplier: input must live on phase space");
    SampledFunction hat = symplectic_fourier(a);
    const int axes = a.axes();
    const int n = a.grid.samples_per_axis;
    std::vector<int> idx(axes);
    std::vector<double> pt(axes);
    for (std::size_t flat = 0; flat < hat.values.size(); ++flat) {
        detail::decode_index(flat, axes, n, idx.data());
        for (int ax = 0; ax < axes; ++ax) pt[ax] = a.axis_coord(ax, idx[ax]);
        const cplx m = f(pt);
        if (!std::isfinite(m.real()) || !std::isfinite(m.imag()))
            throw std::domain_error("phase_multiplier: non-finite multiplier value");
        hat.values[flat] *= m;
    }
    return symplectic_fourier(hat);
}

inline constexpr std::size_t twisted_convolution_budget = 16384;  // max phase points M; cost is M^2

// Twisted convolution (mu x nu)(xi) = sum_eta w e^{(i/2) sigma(xi,eta)}
// mu(xi - eta) nu(eta), with xi - eta wrapped periodically. The half phase is
// (pi/N) * (integer built from lattice indices), reduced mod 2N in exact
// integer arithmetic, so the point-mass identity is exact.
inline SampledFunction twisted_convolution(const SampledFunction& mu, const SampledFunction& nu) {
    require_same_layout(mu, nu, "twisted_convolution");
    if (mu.tag.space != Space::Phase)
        throw std::invalid_argument("twisted_convolution: operands must live on phase space");
    const int dim = mu.grid.dim;
    const int axes = 2 * dim;
    const int n = mu.grid.samples_per_axis;
    const std::size_t m = mu.values.size();
    if (m > twisted_convolution_budget) {
        const double suggested = std::pow(static_cast<double>(twisted_convolution_budget),
                                          1.0 / (2.0 * dim));
        throw std::runtime_error(
            "twisted_convolution: grid too large (" + std::to_string(m) +
            " phase points; budget " + std::to_string(twisted_convolution_budget) +
            "); reduce samples_per_axis to about " +
            std::to_string(static_cast<int>(suggested)));
    }

    // centered integer coordinates per point
    std::vector<int> coord(m * static_cast<std::size_t>(axes));
    std::vector<int> idx(axes);
    for (std::size_t flat = 0; flat < m; ++flat) {
        detail::decode_index(flat, axes, n, idx.data());
        for (int a = 0; a < axes; ++a) coord[flat * axes + a] = idx[a] - n / 2;
    }
    // e^{i pi q / N} for q in [0, 2N)
    std::vector<cplx> phase_table(2 * static_cast<std::size_t>(n));
    for (int q = 0; q < 2 * n; ++q)
        phase_table[q] = std::polar(1.0, std::numbers::pi * q / n);

    const double w = mu.point_weight();
    SampledFunction out = zeros_like(mu.tag, mu.grid);
    std::vector<int> diff(axes);
    for (std::size_t xi = 0; xi < m; ++xi) {
        const int* xc = &coord[xi * axes];
        cplx acc{0.0, 0.0};
        for (std::size_t eta = 0; eta < m; ++eta) {
            const int* ec = &coord[eta * axes];
            // sigma(xi, eta) = <eta_x, xi_p> - <xi_x, eta_p>, in units of 2*pi/N
            std::int64_t q = 0;
            for (int a = 0; a < dim; ++a)
                q += static_cast<std::int64_t>(ec[a]) * xc[dim + a] -
                     static_cast<std::int64_t>(xc[a]) * ec[dim + a];
            q %= 2 * n;
            if (q < 0) q += 2 * n;
            for (int a = 0; a < axes; ++a) {
                int d = (xc[a] - ec[a]) + n / 2;      // array index of xi - eta
                d %= n;
                if (d < 0) d += n;
                diff[a] = d;
            }
            acc += phase_table[static_cast<std::size_t>(q)] *
                   mu.values[detail::encode_index(diff.data(), axes, n)] * nu.values[eta];
        }
        out.values[xi] = w * acc;
    }
    return out;
}

// Plain periodic convolution with the quadrature weight, computed in the
// transform domain. Exact for the wrapped lattice convolution.
inline SampledFunction convolve(const SampledFunction& b, const SampledFunction& c) {
    require_same_layout(b, c, "convolve");
    std::vector<cplx> hb = detail::plain_forward(b);
    const std::vector<cplx> hc = detail::plain_forward(c);
    for (std::size_t i = 0; i < hb.size(); ++i) hb[i] *= hc[i];
    SampledFunction out{b.tag, b.grid, detail::plain_inverse(std::move(hb), b)};
    return out;
}

}  // namespace psidolab
