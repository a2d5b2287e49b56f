#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "psidolab/detail/rng.hpp"
#include "psidolab/fourier.hpp"
#include "psidolab/grid.hpp"

namespace psidolab {

// Derivative seminorm specification: per-block maximum orders for the x
// variables and the p variables. The classical default is
// m_j = floor(dim X_j / 2) + 1 in every slot.
struct SeminormSpec {
    double p = 2.0;
    std::vector<int> x_orders;
    std::vector<int> p_orders;

    static SeminormSpec defaults(const std::vector<int>& blocks, double p, int multiplier = 1) {
        SeminormSpec s;
        s.p = p;
        for (int b : blocks) {
            const int m = (b / 2 + 1) * multiplier;
            s.x_orders.push_back(m);
            s.p_orders.push_back(m);
        }
        return s;
    }

    void validate(const std::vector<int>& blocks) const {
        if (x_orders.size() != blocks.size() || p_orders.size() != blocks.size())
            throw std::invalid_argument("SeminormSpec: order count must match block count");
        for (int m : x_orders)
            if (m < 0) throw std::invalid_argument("SeminormSpec: orders must be nonnegative");
        for (int m : p_orders)
            if (m < 0) throw std::invalid_argument("SeminormSpec: orders must be nonnegative");
    }
};

namespace detail {

// frequency values along each axis of a plain_forward array; bins are in
// centered order, index 0 carrying the Nyquist frequency -pi/step
inline std::vector<std::vector<double>> axis_frequencies(const SampledFunction& a) {
    const int axes = a.axes();
    const int n = a.grid.samples_per_axis;
    std::vector<std::vector<double>> freq(axes, std::vector<double>(n));
    for (int ax = 0; ax < axes; ++ax) {
        const double dw = 2.0 * std::numbers::pi / (n * a.axis_spacing(ax));
        for (int k = 0; k < n; ++k) freq[ax][k] = dw * (k - n / 2);
    }
    return freq;
}

inline bool is_nyquist_bin(int k, int /*n*/) { return k == 0; }

inline void enumerate_orders(const std::vector<int>& axis_block, const std::vector<int>& caps,
                             int axis, std::vector<int>& current, std::vector<int>& used,
                             const std::function<void(const std::vector<int>&)>& emit) {
    if (axis == static_cast<int>(axis_block.size())) {
        emit(current);
        return;
    }
    const int blk = axis_block[axis];
    for (int o = 0; o + used[blk] <= caps[blk]; ++o) {
        current[axis] = o;
        used[blk] += o;
        enumerate_orders(axis_block, caps, axis + 1, current, used, emit);
        used[blk] -= o;
    }
    current[axis] = 0;
}

}  // namespace detail

// |a|_{p, m} = max over all mixed multi-indices with per-block order caps of
// the L^p norm of the spectral derivative. Zero caps reduce to lp_norm
// exactly. Spectral differentiation is exact on band-limited inputs; the
// Nyquist bin of an odd-order derivative is zeroed.
inline double seminorm(const SampledFunction& a, const SeminormSpec& spec) {
    if (a.tag.space != Space::Phase)
        throw std::invalid_argument("seminorm: symbol must live on phase space");
    spec.validate(a.tag.blocks);
    const int dim = a.grid.dim;
    const int axes = 2 * dim;
    const int n = a.grid.samples_per_axis;
    const int kblocks = static_cast<int>(a.tag.blocks.size());

    // map storage axes to block ids and caps: x axes first, then p axes
    std::vector<int> axis_block(axes);
    std::vector<int> caps(2 * kblocks);
    {
        int ax = 0;
        for (int j = 0; j < kblocks; ++j)
            for (int d = 0; d < a.tag.blocks[j]; ++d) axis_block[ax++] = j;
        for (int j = 0; j < kblocks; ++j)
            for (int d = 0; d < a.tag.blocks[j]; ++d) axis_block[ax++] = kblocks + j;
        for (int j = 0; j < kblocks; ++j) {
            caps[j] = spec.x_orders[j];
            caps[kblocks + j] = spec.p_orders[j];
        }
    }

    const std::vector<cplx> hat = detail::plain_forward(a);
    const auto freq = detail::axis_frequencies(a);
    double best = 0.0;
    std::vector<int> current(axes, 0), used(2 * kblocks, 0), idx(axes);
    detail::enumerate_orders(axis_block, caps, 0, current, used,
                             [&](const std::vector<int>& orders) {
        bool zero = true;
        for (int o : orders) zero = zero && o == 0;
        if (zero) {
            best = std::max(best, lp_norm(a, spec.p));
            return;
        }
        std::vector<cplx> bins = hat;
        for (std::size_t flat = 0; flat < bins.size(); ++flat) {
            detail::decode_index(flat, axes, n, idx.data());
            cplx mult{1.0, 0.0};
            for (int ax = 0; ax < axes; ++ax) {
                const int o = orders[ax];
                if (o == 0) continue;
                if (detail::is_nyquist_bin(idx[ax], n) && o % 2 == 1) {
                    mult = 0.0;
                    break;
                }
                mult *= std::pow(cplx(0.0, freq[ax][idx[ax]]), o);
            }
            bins[flat] *= mult;
        }
        SampledFunction der{a.tag, a.grid, detail::plain_inverse(std::move(bins), a)};
        best = std::max(best, lp_norm(der, spec.p));
    });
    return best;
}

// || <zeta>^s a^ ||-style Sobolev norm on phase space viewed as R^{2n}:
// apply the Bessel multiplier of order s in the plain transform domain, then
// take the L^p norm. s = 0 returns lp_norm(a, p) exactly.
inline double sobolev_norm(const SampledFunction& a, double s, double p) {
    if (a.tag.space != Space::Phase)
        throw std::invalid_argument("sobolev_norm: symbol must live on phase space");
    if (s == 0.0) return lp_norm(a, p);
    const int axes = a.axes();
    const int n = a.grid.samples_per_axis;
    std::vector<cplx> hat = detail::plain_forward(a);
    const auto freq = detail::axis_frequencies(a);
    std::vector<int> idx(axes);
    for (std::size_t flat = 0; flat < hat.size(); ++flat) {
        detail::decode_index(flat, axes, n, idx.data());
        double z2 = 0.0;
        for (int ax = 0; ax < axes; ++ax) z2 += freq[ax][idx[ax]] * freq[ax][idx[ax]];
        hat[flat] *= std::pow(1.0 + z2, 0.5 * s);
    }
    SampledFunction img{a.tag, a.grid, detail::plain_inverse(std::move(hat), a)};
    return lp_norm(img, p);
}

// Per-block Bessel derivative multiplier: (1-Lap_{X_1})^{t_1} (x) ... (x)
// (1-Lap_{X_k^*})^{s_k} applied spectrally. Feeds the hypothesis norms of the
// Schatten bound reports. t = s = 0 returns a unchanged.
inline SampledFunction bessel_smooth(const SampledFunction& a, const std::vector<double>& t,
                                     const std::vector<double>& s) {
    if (a.tag.space != Space::Phase)
        throw std::invalid_argument("bessel_smooth: symbol must live on phase space");
    const int kblocks = static_cast<int>(a.tag.blocks.size());
    if (static_cast<int>(t.size()) != kblocks || static_cast<int>(s.size()) != kblocks)
        throw std::invalid_argument("bessel_smooth: exponent count must match block count");
    bool trivial = true;
    for (double v : t) trivial = trivial && v == 0.0;
    for (double v : s) trivial = trivial && v == 0.0;
    if (trivial) return a;

    const int dim = a.grid.dim;
    const int axes = 2 * dim;
    const int n = a.grid.samples_per_axis;
    std::vector<int> axis_block(axes);
    std::vector<double> axis_exp(axes);
    {
        int ax = 0;
        for (int j = 0; j < kblocks; ++j)
            for (int d = 0; d < a.tag.blocks[j]; ++d, ++ax) axis_block[ax] = j;
        for (int j = 0; j < kblocks; ++j)
            for (int d = 0; d < a.tag.blocks[j]; ++d, ++ax) axis_block[ax] = kblocks + j;
    }

    std::vector<cplx> hat = detail::plain_forward(a);
    const auto freq = detail::axis_frequencies(a);
    std::vector<int> idx(axes);
    for (std::size_t flat = 0; flat < hat.size(); ++flat) {
        detail::decode_index(flat, axes, n, idx.data());
        double mult = 1.0;
        for (int j = 0; j < kblocks; ++j) {
            double zx = 0.0, zp = 0.0;
            for (int ax = 0; ax < axes; ++ax) {
                const double f = freq[ax][idx[ax]];
                if (axis_block[ax] == j) zx += f * f;
                if (axis_block[ax] == kblocks + j) zp += f * f;
            }
            mult *= std::pow(1.0 + zx, t[j]) * std::pow(1.0 + zp, s[j]);
        }
        hat[flat] *= mult;
    }
    return SampledFunction{a.tag, a.grid, detail::plain_inverse(std::move(hat), a)};
}

// Seeded real band-limited random field: independent Gaussian coefficients
// on the frequency lattice strictly inside band_fraction of the Nyquist band,
// Hermitian-symmetrized and damped by <zeta>^{-envelope_decay}. With base_n
// set (a divisor of N, both powers of two), the coefficients live on the
// base_n frequency lattice, so finer grids with the same half-width sample
// the identical trigonometric polynomial. Same seed, same output, bitwise.
inline SampledFunction random_symbol(std::uint64_t seed, double band_fraction,
                                     double envelope_decay, const GridSpec& grid,
                                     int base_n = 0) {
    if (!(band_fraction > 0.0) || band_fraction > 1.0)
        throw std::invalid_argument("random_symbol: band_fraction must lie in (0, 1]");
    if (base_n == 0) base_n = grid.samples_per_axis;
    if (grid.samples_per_axis % base_n != 0 ||
        !detail::is_pow2(static_cast<std::size_t>(base_n)))
        throw std::invalid_argument("random_symbol: base_n must be a power-of-two divisor of N");
    const int ratio = grid.samples_per_axis / base_n;
    const int dim = grid.dim;
    const int axes = 2 * dim;
    const int n = grid.samples_per_axis;
    const int kmax = std::max(0, static_cast<int>(std::ceil(band_fraction * base_n / 2.0)) - 1);

    SampledFunction out = zeros_like(SpaceTag::phase(dim), grid);
    std::vector<cplx> hat(out.values.size(), cplx{0.0, 0.0});

    // base-lattice physical frequencies: pi/L per x axis, 2L/base_n per p axis
    const double dwx = std::numbers::pi / grid.half_width;
    const double dwp = 2.0 * grid.half_width / base_n;

    // Store bin values scaled so plain_inverse reproduces the modes with
    // N-independent amplitudes; refined grids then sample the same function.
    double bin_scale = 1.0;
    for (int ax = 0; ax < axes; ++ax) bin_scale *= n * out.axis_weight(ax);

    std::vector<int> kc(axes, -kmax);
    std::vector<int> kneg(axes), kmin(axes), bin(axes);
    bool done = false;
    while (!done) {
        for (int ax = 0; ax < axes; ++ax) kneg[ax] = -kc[ax];
        const bool self = kneg == kc;
        const bool primary = self || std::lexicographical_compare(kc.begin(), kc.end(),
                                                                  kneg.begin(), kneg.end());
        for (int ax = 0; ax < axes; ++ax) kmin[ax] = primary ? kc[ax] : kneg[ax];
        double g1, g2;
        detail::keyed_gaussian(seed, kmin, g1, g2);
        cplx coef = self ? cplx{g1, 0.0} : cplx{g1, g2} / std::sqrt(2.0);
        if (!primary) coef = std::conj(coef);

        double z2 = 0.0;
        for (int ax = 0; ax < axes; ++ax) {
            const double f = (ax < dim ? dwx : dwp) * kc[ax];
            z2 += f * f;
        }
        coef *= std::pow(1.0 + z2, -0.5 * envelope_decay) * bin_scale;

        // centered bin layout: array index of frequency index f is f + n/2
        for (int ax = 0; ax < axes; ++ax) {
            const int fine = ax < dim ? kc[ax] : kc[ax] * ratio;
            bin[ax] = fine + n / 2;
        }
        hat[detail::encode_index(bin.data(), axes, n)] = coef;

        // odometer over the band cube
        int ax = axes - 1;
        while (ax >= 0) {
            if (++kc[ax] <= kmax) break;
            kc[ax] = -kmax;
            --ax;
        }
        done = ax < 0;
    }

    // hat holds plain-forward coefficients; invert with the matching weights
    out.values = detail::plain_inverse(std::move(hat), out);
    for (cplx& v : out.values) v = cplx{v.real(), 0.0};
    return out;
}

}  // namespace psidolab
