#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "psidolab/fourier.hpp"
#include "psidolab/grid.hpp"
#include "psidolab/symbol_class.hpp"

namespace psidolab {

// Symbol on R^{n1} x R^{n2} with degree metadata (m1, m2): mixed derivatives
// are expected to obey |d^{a1} d^{a2} a| <= C <xi_1>^{m1-|a1|} <xi_2>^{m2-|a2|}.
struct MixedSymbolSpec {
    int n1 = 1;
    int n2 = 1;
    double m1 = 0.0;
    double m2 = 0.0;
    std::function<cplx(std::span<const double>, std::span<const double>)> evaluator;

    int dim() const { return n1 + n2; }
};

// a(xi1, xi2) = <xi1>^{s1} <xi2>^{s2} <(xi1,xi2)>^{-s1-s2-eps}, a symbol of
// degree (-eps/2, -eps/2) under the fixed split eps = eps/2 + eps/2.
inline MixedSymbolSpec mixed_bessel_symbol(double s1, double s2, double eps, int n1 = 1,
                                           int n2 = 1) {
    if (!(eps > 0.0)) throw std::domain_error("mixed_bessel_symbol: eps must be positive");
    if (s1 < 0.0 || s2 < 0.0)
        throw std::domain_error("mixed_bessel_symbol: orders must be nonnegative");
    MixedSymbolSpec spec;
    spec.n1 = n1;
    spec.n2 = n2;
    spec.m1 = -0.5 * eps;
    spec.m2 = -0.5 * eps;
    spec.evaluator = [s1, s2, eps](std::span<const double> x1, std::span<const double> x2) {
        double r1 = 0.0, r2 = 0.0;
        for (double v : x1) r1 += v * v;
        for (double v : x2) r2 += v * v;
        return cplx{std::pow(1.0 + r1, 0.5 * s1) * std::pow(1.0 + r2, 0.5 * s2) *
                        std::pow(1.0 + r1 + r2, -0.5 * (s1 + s2 + eps)),
                    0.0};
    };
    return spec;
}

// Samples the spec on a frequency grid with n1 axes followed by n2 axes.
inline SampledFunction sample_mixed(const MixedSymbolSpec& spec, const GridSpec& grid) {
    if (grid.dim != spec.dim())
        throw std::invalid_argument("sample_mixed: grid dim must equal n1 + n2");
    const int n1 = spec.n1;
    return sample(
        [&spec, n1](std::span<const double> pt) {
            return spec.evaluator(pt.subspan(0, static_cast<std::size_t>(n1)),
                                  pt.subspan(static_cast<std::size_t>(n1)));
        },
        grid, SpaceTag::x());
}

// ---- smooth radial cutoff -------------------------------------------------
//
// phi is the standard mollifier-based radial bump: identically 1 for
// |xi| <= 1, identically 0 for |xi| >= 2, built from e^{-1/x} smoothstep
// composed with a polynomial in |xi|^2 so every report is reproducible from
// this closed form. psi(xi) = -xi . grad phi(xi) is supported in the closed
// annulus 1 <= |xi| <= 2 and satisfies the exact scale identity
// 1 = phi(xi) + integral over t in (1, inf) of psi(xi/t) dt/t.

namespace detail {

inline double mollifier(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
inline double mollifier_deriv(double x) {
    return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0;
}
inline double smoothstep01(double x) {
    const double a = mollifier(x);
    const double b = mollifier(1.0 - x);
    return a / (a + b);
}
inline double smoothstep01_deriv(double x) {
    const double a = mollifier(x);
    const double b = mollifier(1.0 - x);
    const double da = mollifier_deriv(x);
    const double db = mollifier_deriv(1.0 - x);
    const double den = (a + b) * (a + b);
    return den > 0.0 ? (da * b + a * db) / den : 0.0;
}

}  // namespace detail

inline double dyadic_cutoff(double r2) { return detail::smoothstep01((4.0 - r2) / 3.0); }
// -r d/dr of the cutoff, as a function of r^2
inline double dyadic_shell(double r2) {
    return (2.0 * r2 / 3.0) * detail::smoothstep01_deriv((4.0 - r2) / 3.0);
}

// Log-uniform quadrature for the scale integral over dt/t on [1, t_max]:
// midpoint nodes t_i = exp((i + 1/2) dlog), uniform weight dlog.
struct LogNodes {
    int count = 64;
    double t_max = 16.0;

    std::vector<double> nodes() const {
        if (count < 1 || !(t_max > 1.0))
            throw std::invalid_argument("LogNodes: need count >= 1 and t_max > 1");
        std::vector<double> t(count);
        const double dl = std::log(t_max) / count;
        for (int i = 0; i < count; ++i) t[i] = std::exp((i + 0.5) * dl);
        return t;
    }
    double weight() const { return std::log(t_max) / count; }
};

struct DyadicPiece {
    enum Kind { Base, ShellLow, LowShell, ShellShell } kind = Base;
    double t1 = 1.0;
    double t2 = 1.0;
    SampledFunction samples;  // (cutoffs . a_{t1,t2}) on the sampling grid
};

struct DyadicDecomposition {
    std::vector<DyadicPiece> pieces;
    double reconstruction_defect = 0.0;   // sup norm of assembled sum minus a
    double partition_defect = 0.0;        // sup of |partition of unity - 1|
};

namespace detail {

inline double radius2(std::span<const double> v) {
    double r = 0.0;
    for (double x : v) r += x * x;
    return r;
}

}  // namespace detail

// Scale decomposition of a mixed symbol: the base piece (phi1 (x) phi2) a and
// the three shell families built from the rescalings a_{t1,t2}(xi) =
// t1^{-m1} t2^{-m2} a(t1 xi1, t2 xi2). piece_stride controls how many scale
// nodes are materialized as sampled pieces; the reconstruction defect is
// always evaluated over all nodes.
inline DyadicDecomposition dyadic_decompose(const MixedSymbolSpec& spec, const LogNodes& t_nodes,
                                            const GridSpec& grid, int piece_stride = 8) {
    if (grid.dim != spec.dim())
        throw std::invalid_argument("dyadic_decompose: grid dim must equal n1 + n2");
    const std::vector<double> ts = t_nodes.nodes();
    const double dl = t_nodes.weight();
    const int n1 = spec.n1;

    DyadicDecomposition out;

    // factored partition of unity: P_j(xi_j) = phi(xi_j) + sum_i psi(xi_j / t_i) dlog
    const SampledFunction a = sample_mixed(spec, grid);
    const int axes = grid.dim;
    const int n = grid.samples_per_axis;
    std::vector<int> idx(axes);
    std::vector<double> pt(axes);
    double worst_pou = 0.0, worst_rec = 0.0;
    for (std::size_t flat = 0; flat < a.values.size(); ++flat) {
        detail::decode_index(flat, axes, n, idx.data());
        for (int ax = 0; ax < axes; ++ax) pt[ax] = grid.coord(idx[ax]);
        const double r1 = detail::radius2(std::span<const double>(pt).subspan(0, n1));
        const double r2 = detail::radius2(std::span<const double>(pt).subspan(n1));
        double p1 = dyadic_cutoff(r1), p2 = dyadic_cutoff(r2);
        for (double t : ts) {
            p1 += dyadic_shell(r1 / (t * t)) * dl;
            p2 += dyadic_shell(r2 / (t * t)) * dl;
        }
        worst_pou = std::max(worst_pou, std::abs(p1 * p2 - 1.0));
        worst_rec = std::max(worst_rec, std::abs(a.values[flat]) * std::abs(p1 * p2 - 1.0));
    }
    out.partition_defect = worst_pou;
    out.reconstruction_defect = worst_rec;

    // sampled pieces on the rescaled grids
    auto rescaled = [&](double t1, double t2, bool shell1, bool shell2) {
        SampledFunction piece = zeros_like(SpaceTag::x(), grid);
        std::vector<int> id2(axes);
        std::vector<double> q(axes), qs(axes);
        for (std::size_t flat = 0; flat < piece.values.size(); ++flat) {
            detail::decode_index(flat, axes, n, id2.data());
            for (int ax = 0; ax < axes; ++ax) q[ax] = grid.coord(id2[ax]);
            const double r1 = detail::radius2(std::span<const double>(q).subspan(0, n1));
            const double r2 = detail::radius2(std::span<const double>(q).subspan(n1));
            const double c1 = shell1 ? dyadic_shell(r1) : dyadic_cutoff(r1);
            const double c2 = shell2 ? dyadic_shell(r2) : dyadic_cutoff(r2);
            if (c1 == 0.0 || c2 == 0.0) continue;  // exact annulus support
            for (int ax = 0; ax < axes; ++ax) qs[ax] = (ax < n1 ? t1 : t2) * q[ax];
            const cplx av =
                spec.evaluator(std::span<const double>(qs).subspan(0, n1),
                               std::span<const double>(qs).subspan(n1));
            piece.values[flat] =
                c1 * c2 * std::pow(t1, -spec.m1) * std::pow(t2, -spec.m2) * av;
        }
        return piece;
    };

    out.pieces.push_back({DyadicPiece::Base, 1.0, 1.0, rescaled(1.0, 1.0, false, false)});
    for (std::size_t i = 0; i < ts.size(); i += static_cast<std::size_t>(piece_stride)) {
        out.pieces.push_back({DyadicPiece::ShellLow, ts[i], 1.0,
                              rescaled(ts[i], 1.0, true, false)});
        out.pieces.push_back({DyadicPiece::LowShell, 1.0, ts[i],
                              rescaled(1.0, ts[i], false, true)});
        for (std::size_t j = 0; j < ts.size(); j += static_cast<std::size_t>(piece_stride))
            out.pieces.push_back({DyadicPiece::ShellShell, ts[i], ts[j],
                                  rescaled(ts[i], ts[j], true, true)});
    }
    return out;
}

struct EnvelopeRow {
    std::vector<int> alpha1;
    std::vector<int> alpha2;
    double constant = 0.0;  // max over the lattice of |d^a a| / envelope
};

// Empirical constants of the degree envelope: for each multi-index pair up
// to max_order, the worst ratio of the spectral derivative against
// <xi1>^{m1-|a1|} <xi2>^{m2-|a2|}.
inline std::vector<EnvelopeRow> envelope_check(const MixedSymbolSpec& spec, int max_order,
                                               const GridSpec& grid) {
    const SampledFunction a = sample_mixed(spec, grid);
    const int axes = grid.dim;
    const int n = grid.samples_per_axis;
    const int n1 = spec.n1;

    // enumerate per-axis orders with |alpha1| <= max_order, |alpha2| <= max_order
    std::vector<int> axis_block(axes);
    for (int ax = 0; ax < axes; ++ax) axis_block[ax] = ax < n1 ? 0 : 1;
    const std::vector<int> caps{max_order, max_order};

    std::vector<cplx> hat = detail::plain_forward(a);
    std::vector<std::vector<double>> freq = detail::axis_frequencies(a);
    std::vector<EnvelopeRow> rows;
    std::vector<int> current(axes, 0), used(2, 0), idx(axes);
    detail::enumerate_orders(axis_block, caps, 0, current, used,
                             [&](const std::vector<int>& orders) {
        std::vector<cplx> bins = hat;
        bool zero_order = true;
        for (int o : orders) zero_order = zero_order && o == 0;
        if (!zero_order) {
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
        }
        const std::vector<cplx> der =
            zero_order ? a.values : detail::plain_inverse(std::move(bins), a);
        int o1 = 0, o2 = 0;
        for (int ax = 0; ax < axes; ++ax) (ax < n1 ? o1 : o2) += orders[ax];
        double worst = 0.0;
        std::vector<double> pt(axes);
        for (std::size_t flat = 0; flat < der.size(); ++flat) {
            detail::decode_index(flat, axes, n, idx.data());
            for (int ax = 0; ax < axes; ++ax) pt[ax] = grid.coord(idx[ax]);
            const double r1 = detail::radius2(std::span<const double>(pt).subspan(0, n1));
            const double r2 = detail::radius2(std::span<const double>(pt).subspan(n1));
            const double env = std::pow(1.0 + r1, 0.5 * (spec.m1 - o1)) *
                               std::pow(1.0 + r2, 0.5 * (spec.m2 - o2));
            worst = std::max(worst, std::abs(der[flat]) / env);
        }
        EnvelopeRow row;
        row.alpha1.assign(orders.begin(), orders.begin() + n1);
        row.alpha2.assign(orders.begin() + n1, orders.end());
        row.constant = worst;
        rows.push_back(std::move(row));
    });
    return rows;
}

struct InverseTransformReport {
    std::vector<double> l1_norms;          // one per refinement grid
    std::vector<double> envelope_constants;  // empirical C_N for N = 1, 2 on the finest grid
    bool envelope_only = false;            // degrees not both negative
};

// L^1 norms of the inverse Fourier transform across a refinement ladder,
// plus the empirical constants of the pointwise envelope away from the
// singular set {|x1| |x2| = 0}.
inline InverseTransformReport inverse_transform_l1(const MixedSymbolSpec& spec,
                                                   const std::vector<GridSpec>& refinements) {
    if (refinements.empty())
        throw std::invalid_argument("inverse_transform_l1: need at least one grid");
    InverseTransformReport rep;
    rep.envelope_only = !(spec.m1 < 0.0 && spec.m2 < 0.0);

    // Samples taken at spacing h on [-L, L) are the dual lattice of
    // grid.dual(), and the dual measure carries exactly the (2 pi)^{-d}
    // factor of F^{-1}; so relabel and use the conjugate dual transform.
    SampledFunction finest_f = zeros_like(SpaceTag::x(), refinements.front());
    for (const GridSpec& g : refinements) {
        const SampledFunction a = sample_mixed(spec, g);
        SampledFunction freq_view{SpaceTag::xstar(), g.dual(), a.values};
        SampledFunction f = fourier_xstar(freq_view, FourierSign::Conjugate);
        rep.l1_norms.push_back(lp_norm(f, 1.0));
        finest_f = f;
    }

    const GridSpec gf = finest_f.grid;  // spatial lattice of the finest run
    const int axes = gf.dim;
    const int n = gf.samples_per_axis;
    const int n1 = spec.n1;
    std::vector<int> idx(axes);
    for (int big_n = 1; big_n <= 2; ++big_n) {
        double worst = 0.0;
        for (std::size_t flat = 0; flat < finest_f.values.size(); ++flat) {
            detail::decode_index(flat, axes, n, idx.data());
            double r1 = 0.0, r2 = 0.0;
            for (int ax = 0; ax < axes; ++ax) {
                const double c = gf.coord(idx[ax]);
                (ax < n1 ? r1 : r2) += c * c;
            }
            if (r1 == 0.0 || r2 == 0.0) continue;  // singular set
            const double env = std::pow(1.0 + r1, -0.5 * big_n) *
                               std::pow(1.0 + r2, -0.5 * big_n) *
                               (1.0 + std::pow(r1, -0.5 * (spec.m1 + n1))) *
                               (1.0 + std::pow(r2, -0.5 * (spec.m2 + (axes - n1))));
            worst = std::max(worst, std::abs(finest_f.values[flat]) / env);
        }
        rep.envelope_constants.push_back(worst);
    }
    return rep;
}

struct ProbeRow {
    std::string name;
    double ratio = 0.0;  // ||a(P) f||_p / ||f||_p
};

struct ProbeReport {
    std::vector<ProbeRow> rows;
    double max_ratio = 0.0;
};

// Apply the Fourier multiplier a(P) to a function sampled on a spatial grid:
// transform, multiply by a on the dual lattice, transform back.
inline SampledFunction apply_multiplier(const MixedSymbolSpec& spec, const SampledFunction& f) {
    if (f.tag.space != Space::X)
        throw std::invalid_argument("apply_multiplier: f must live on a spatial grid");
    if (f.grid.dim != spec.dim())
        throw std::invalid_argument("apply_multiplier: grid dim must equal n1 + n2");
    SampledFunction hat = fourier_x(f, FourierSign::Forward);
    const int axes = f.grid.dim;
    const int n = f.grid.samples_per_axis;
    std::vector<int> idx(axes);
    std::vector<double> pt(axes);
    for (std::size_t flat = 0; flat < hat.values.size(); ++flat) {
        detail::decode_index(flat, axes, n, idx.data());
        for (int ax = 0; ax < axes; ++ax) pt[ax] = f.grid.dual_coord(idx[ax]);
        hat.values[flat] *= spec.evaluator(
            std::span<const double>(pt).subspan(0, static_cast<std::size_t>(spec.n1)),
            std::span<const double>(pt).subspan(static_cast<std::size_t>(spec.n1)));
    }
    return fourier_xstar(hat, FourierSign::Conjugate);
}

inline ProbeReport multiplier_bound_probe(
    const MixedSymbolSpec& spec, double p,
    const std::vector<std::pair<std::string, SampledFunction>>& family) {
    ProbeReport rep;
    for (const auto& [name, f] : family) {
        const double nf = lp_norm(f, p);
        if (nf == 0.0) continue;
        const SampledFunction g = apply_multiplier(spec, f);
        ProbeRow row{name, lp_norm(g, p) / nf};
        rep.max_ratio = std::max(rep.max_ratio, row.ratio);
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

struct FactorCheckReport {
    std::vector<ProbeReport> per_factor;   // one per block factor
    ProbeReport composed;                  // all factors applied in sequence
    double factorization_gap = 0.0;        // composed vs direct product symbol
};

// Product reduction of the tensor smoothing operator: per-factor bounded
// multipliers T_l with symbol <xi_l>^{s_l} <xi>^{-s_l - eps/k}, their
// composition, and the gap against the direct product symbol. Exponents act
// on <.> directly, matching mixed_bessel_symbol.
inline FactorCheckReport smoothing_factorization_check(
    const std::vector<double>& s, double eps, double p,
    const std::vector<std::pair<std::string, SampledFunction>>& family,
    const std::vector<int>& blocks) {
    const int k = static_cast<int>(blocks.size());
    if (k < 2) throw std::invalid_argument("smoothing_factorization_check: need k >= 2 blocks");
    if (static_cast<int>(s.size()) != k)
        throw std::invalid_argument("smoothing_factorization_check: order count mismatch");
    if (family.empty())
        throw std::invalid_argument("smoothing_factorization_check: empty test family");
    const int dim = family.front().second.grid.dim;
    int sum_blocks = 0;
    for (int b : blocks) sum_blocks += b;
    if (sum_blocks != dim)
        throw std::invalid_argument("smoothing_factorization_check: blocks must sum to grid dim");

    std::vector<int> axis_block(dim);
    {
        int ax = 0;
        for (int j = 0; j < k; ++j)
            for (int d = 0; d < blocks[j]; ++d) axis_block[ax++] = j;
    }
    const double total_s = [&] {
        double acc = 0.0;
        for (double v : s) acc += v;
        return acc;
    }();

    auto factor_spec = [&](int l) {
        MixedSymbolSpec f;
        f.n1 = dim;
        f.n2 = 0;
        f.m1 = 0.0;
        f.m2 = 0.0;
        f.evaluator = [l, s, eps, k, axis_block](std::span<const double> xi,
                                                 std::span<const double>) {
            double rl = 0.0, r = 0.0;
            for (std::size_t ax = 0; ax < xi.size(); ++ax) {
                r += xi[ax] * xi[ax];
                if (axis_block[ax] == l) rl += xi[ax] * xi[ax];
            }
            return cplx{std::pow(1.0 + rl, 0.5 * s[static_cast<std::size_t>(l)]) *
                            std::pow(1.0 + r,
                                     -0.5 * (s[static_cast<std::size_t>(l)] + eps / k)),
                        0.0};
        };
        return f;
    };
    MixedSymbolSpec direct;
    direct.n1 = dim;
    direct.n2 = 0;
    direct.evaluator = [s, eps, total_s, axis_block](std::span<const double> xi,
                                                     std::span<const double>) {
        double r = 0.0;
        std::vector<double> rb(s.size(), 0.0);
        for (std::size_t ax = 0; ax < xi.size(); ++ax) {
            r += xi[ax] * xi[ax];
            rb[static_cast<std::size_t>(axis_block[ax])] += xi[ax] * xi[ax];
        }
        double v = std::pow(1.0 + r, -0.5 * (total_s + eps));
        for (std::size_t j = 0; j < s.size(); ++j) v *= std::pow(1.0 + rb[j], 0.5 * s[j]);
        return cplx{v, 0.0};
    };

    FactorCheckReport rep;
    for (int l = 0; l < k; ++l)
        rep.per_factor.push_back(multiplier_bound_probe(factor_spec(l), p, family));

    double gap = 0.0;
    for (const auto& [name, f] : family) {
        SampledFunction composed = f;
        for (int l = 0; l < k; ++l) composed = apply_multiplier(factor_spec(l), composed);
        const SampledFunction direct_img = apply_multiplier(direct, f);
        const double nf = lp_norm(f, p);
        if (nf == 0.0) continue;
        ProbeRow row{name, lp_norm(composed, p) / nf};
        rep.composed.max_ratio = std::max(rep.composed.max_ratio, row.ratio);
        rep.composed.rows.push_back(row);
        SampledFunction diff = composed;
        for (std::size_t i = 0; i < diff.values.size(); ++i)
            diff.values[i] -= direct_img.values[i];
        gap = std::max(gap, lp_norm(diff, 2.0) / std::max(lp_norm(direct_img, 2.0), 1e-300));
    }
    rep.factorization_gap = gap;
    return rep;
}

}  // namespace psidolab
