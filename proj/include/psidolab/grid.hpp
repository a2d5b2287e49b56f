#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "psidolab/detail/fft.hpp"

namespace psidolab {

using detail::cplx;

// Uniform periodic lattice on [-L, L) per axis with N samples, spacing
// h = 2L/N. Lattice points sit at -L + j*h, so 0 is always a grid point.
// The dual grid has spacing pi/L and half-width N*pi/(2L); dual measure
// carries the (2*pi)^{-n} factor, so one unit per dual point is 1/(2L).
struct GridSpec {
    int dim = 1;
    int samples_per_axis = 4;
    double half_width = 1.0;

    GridSpec() = default;
    GridSpec(int d, int n, double l) : dim(d), samples_per_axis(n), half_width(l) { validate(); }

    void validate() const {
        if (dim < 1) throw std::invalid_argument("GridSpec: dim must be positive");
        if (samples_per_axis < 4 || samples_per_axis % 2 != 0)
            throw std::invalid_argument("GridSpec: samples_per_axis must be even and >= 4");
        if (!(half_width > 0.0)) throw std::invalid_argument("GridSpec: half_width must be > 0");
    }

    double spacing() const { return 2.0 * half_width / samples_per_axis; }
    double dual_spacing() const { return std::numbers::pi / half_width; }
    double dual_half_width() const {
        return 0.5 * samples_per_axis * std::numbers::pi / half_width;
    }
    GridSpec dual() const { return GridSpec(dim, samples_per_axis, dual_half_width()); }

    // primal coordinate of index j on any axis
    double coord(int j) const { return (j - samples_per_axis / 2) * spacing(); }
    double dual_coord(int j) const { return (j - samples_per_axis / 2) * dual_spacing(); }

    std::size_t points(int axes) const {
        std::size_t m = 1;
        for (int a = 0; a < axes; ++a) m *= static_cast<std::size_t>(samples_per_axis);
        return m;
    }

    bool operator==(const GridSpec& o) const = default;
};

enum class Space { X, Xstar, Phase };

// Which space a sampled array lives on. Phase carries the ordered orthogonal
// decomposition X = X_1 (+) ... (+) X_k as a list of block dimensions.
struct SpaceTag {
    Space space = Space::X;
    std::vector<int> blocks;  // Phase only; positive, summing to dim

    static SpaceTag x() { return {Space::X, {}}; }
    static SpaceTag xstar() { return {Space::Xstar, {}}; }
    static SpaceTag phase(std::vector<int> blks) { return {Space::Phase, std::move(blks)}; }
    static SpaceTag phase(int dim) { return {Space::Phase, {dim}}; }

    void validate(int dim) const {
        if (space != Space::Phase) {
            if (!blocks.empty())
                throw std::invalid_argument("SpaceTag: blocks only apply to Phase");
            return;
        }
        if (blocks.empty()) throw std::invalid_argument("SpaceTag: Phase requires blocks");
        int sum = 0;
        for (int b : blocks) {
            if (b <= 0) throw std::invalid_argument("SpaceTag: block dims must be positive");
            sum += b;
        }
        if (sum != dim)
            throw std::invalid_argument("SpaceTag: block dims sum to " + std::to_string(sum) +
                                        ", expected " + std::to_string(dim));
    }

    bool operator==(const SpaceTag& o) const = default;
};

// Complex samples of a function on a grid, row-major lattice order, x-blocks
// before p-blocks on Phase. Immutable by convention after construction.
struct SampledFunction {
    SpaceTag tag;
    GridSpec grid;
    std::vector<cplx> values;

    int axes() const { return tag.space == Space::Phase ? 2 * grid.dim : grid.dim; }

    // spacing of one storage axis: primal h on X-type axes, pi/L on dual axes
    double axis_spacing(int axis) const {
        return axis_is_dual(axis) ? grid.dual_spacing() : grid.spacing();
    }
    bool axis_is_dual(int axis) const {
        switch (tag.space) {
            case Space::X: return false;
            case Space::Xstar: return true;
            case Space::Phase: return axis >= grid.dim;
        }
        return false;
    }
    // quadrature weight of one lattice point along a single axis
    double axis_weight(int axis) const {
        return axis_is_dual(axis) ? 1.0 / (2.0 * grid.half_width) : grid.spacing();
    }
    // full quadrature weight per lattice point (product over axes)
    double point_weight() const {
        double w = 1.0;
        for (int a = 0; a < axes(); ++a) w *= axis_weight(a);
        return w;
    }
    double axis_coord(int axis, int j) const {
        return (j - grid.samples_per_axis / 2) * axis_spacing(axis);
    }

    std::size_t size() const { return values.size(); }

    void check_shape() const {
        tag.validate(grid.dim);
        grid.validate();
        if (values.size() != grid.points(axes()))
            throw std::invalid_argument("SampledFunction: value count " +
                                        std::to_string(values.size()) + " != N^axes");
    }
};

namespace detail {

inline void decode_index(std::size_t flat, int axes, int n, int* out) {
    for (int a = axes - 1; a >= 0; --a) {
        out[a] = static_cast<int>(flat % static_cast<std::size_t>(n));
        flat /= static_cast<std::size_t>(n);
    }
}

inline std::size_t encode_index(const int* idx, int axes, int n) {
    std::size_t flat = 0;
    for (int a = 0; a < axes; ++a)
        flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(idx[a]);
    return flat;
}

}  // namespace detail

inline bool same_layout(const SampledFunction& f, const SampledFunction& g) {
    return f.tag == g.tag && f.grid == g.grid;
}

inline void require_same_layout(const SampledFunction& f, const SampledFunction& g,
                                const char* where) {
    if (!same_layout(f, g))
        throw std::invalid_argument(std::string(where) + ": operands on different grids or tags");
}

// Evaluate f at every lattice point. Rejects non-finite values, naming the
// offending lattice point.
inline SampledFunction sample(const std::function<cplx(std::span<const double>)>& f,
                              const GridSpec& grid, const SpaceTag& tag) {
    tag.validate(grid.dim);
    grid.validate();
    SampledFunction out{tag, grid, {}};
    const int axes = out.axes();
    const int n = grid.samples_per_axis;
    out.values.resize(grid.points(axes));
    std::vector<int> idx(axes, 0);
    std::vector<double> pt(axes, 0.0);
    for (std::size_t flat = 0; flat < out.values.size(); ++flat) {
        detail::decode_index(flat, axes, n, idx.data());
        for (int a = 0; a < axes; ++a) pt[a] = out.axis_coord(a, idx[a]);
        const cplx v = f(pt);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            std::string loc = "(";
            for (int a = 0; a < axes; ++a) loc += std::to_string(pt[a]) + (a + 1 < axes ? "," : ")");
            throw std::domain_error("sample: non-finite value at lattice point " + loc);
        }
        out.values[flat] = v;
    }
    return out;
}

// Quadrature L^p norm; p = infinity gives the max modulus. The weight per
// lattice point is the product of h per primal axis and 1/(2L) per dual axis.
inline double lp_norm(const SampledFunction& f, double p) {
    if (p < 1.0) throw std::domain_error("lp_norm: p must satisfy p >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (const cplx& v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    const double w = f.point_weight();
    std::vector<double> terms(f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i)
        terms[i] = std::pow(std::abs(f.values[i]), p);
    return std::pow(w * detail::pairwise_sum(terms.data(), terms.size()), 1.0 / p);
}

// Scalar product, antilinear in the first argument.
inline cplx inner(const SampledFunction& f, const SampledFunction& g) {
    require_same_layout(f, g, "inner");
    const double w = f.point_weight();
    std::vector<cplx> terms(f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i)
        terms[i] = std::conj(f.values[i]) * g.values[i];
    return w * detail::pairwise_sum(terms.data(), terms.size());
}

inline SampledFunction zeros_like(const SpaceTag& tag, const GridSpec& grid) {
    SampledFunction out{tag, grid, {}};
    out.values.assign(grid.points(out.axes()), cplx{0.0, 0.0});
    return out;
}

// Discrete delta at the origin lattice point: value 1/weight there, so its
// integral is exactly 1 and its Fourier transforms are identically 1.
inline SampledFunction discrete_delta(const SpaceTag& tag, const GridSpec& grid) {
    SampledFunction out = zeros_like(tag, grid);
    const int n = grid.samples_per_axis;
    std::vector<int> idx(out.axes(), n / 2);
    out.values[detail::encode_index(idx.data(), out.axes(), n)] = 1.0 / out.point_weight();
    return out;
}

}  // namespace psidolab
