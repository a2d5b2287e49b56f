#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "psidolab/fourier.hpp"
#include "psidolab/grid.hpp"
#include "psidolab/quantize.hpp"
#include "psidolab/symbol_class.hpp"
#include "psidolab/weyl.hpp"

namespace psidolab {

// |T| = V S V^*, |T^*| = U S U^* from one SVD of the action matrix.
struct PolarParts {
    Eigen::MatrixXcd abs_t;       // |T|
    Eigen::MatrixXcd abs_t_star;  // |T^*|
};

inline PolarParts polar_parts(const Eigen::MatrixXcd& t) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd s = svd.singularValues();
    return PolarParts{svd.matrixV() * s.asDiagonal() * svd.matrixV().adjoint(),
                      svd.matrixU() * s.asDiagonal() * svd.matrixU().adjoint()};
}

namespace detail {

inline void require_hermitian_psd(const Eigen::MatrixXcd& m, const char* name) {
    const double scale = std::max(1.0, m.norm());
    if ((m - m.adjoint()).norm() > 1e-10 * scale)
        throw std::invalid_argument(std::string("dominance_defect: ") + name +
                                    " is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10 * scale)
        throw std::invalid_argument(std::string("dominance_defect: ") + name +
                                    " is not positive semidefinite");
}

inline Eigen::VectorXcd seeded_complex_vector(std::uint64_t& state, Eigen::Index dim) {
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        double g1, g2;
        state = splitmix64(state);
        const std::uint64_t s1 = state;
        state = splitmix64(state);
        const std::uint64_t s2 = state;
        const double u1 = std::max(uniform01(s1), 1e-300);
        const double u2 = uniform01(s2);
        const double r = std::sqrt(-2.0 * std::log(u1));
        g1 = r * std::cos(2.0 * std::numbers::pi * u2);
        g2 = r * std::sin(2.0 * std::numbers::pi * u2);
        v(i) = cplx{g1, g2};
    }
    v.normalize();
    return v;
}

}  // namespace detail

// Worst violation of |(u, T v)|^2 <= (u, A u)(v, B v) over seeded random
// unit pairs, clamped below at zero. All pairings use the weighted scalar
// product; the uniform lattice weight makes adjoints plain conjugate
// transposes.
inline double dominance_defect(const OperatorKernel& t, const OperatorKernel& a,
                               const OperatorKernel& b, int trials, std::uint64_t seed) {
    if (!(t.grid == a.grid) || !(t.grid == b.grid))
        throw std::invalid_argument("dominance_defect: operands on different grids");
    const Eigen::MatrixXcd mt = t.action_matrix();
    const Eigen::MatrixXcd ma = a.action_matrix();
    const Eigen::MatrixXcd mb = b.action_matrix();
    detail::require_hermitian_psd(ma, "A");
    detail::require_hermitian_psd(mb, "B");

    const double w = t.measure_weight();
    std::uint64_t state = detail::splitmix64(seed ^ 0x6a09e667f3bcc908ULL);
    double worst = 0.0;
    for (int k = 0; k < trials; ++k) {
        const Eigen::VectorXcd u = detail::seeded_complex_vector(state, mt.rows());
        const Eigen::VectorXcd v = detail::seeded_complex_vector(state, mt.rows());
        const double lhs = std::norm(w * u.dot(mt * v));
        const double rhs = (w * u.dot(ma * u)).real() * (w * v.dot(mb * v)).real();
        worst = std::max(worst, lhs - rhs);
    }
    return std::max(worst, 0.0);
}

// (T_xi a)(eta) = a(eta - xi): periodic translate of a phase-space symbol,
// circular on-lattice and trigonometric interpolation otherwise.
inline SampledFunction translate_symbol(const SampledFunction& a, const PhasePoint& xi) {
    if (a.tag.space != Space::Phase)
        throw std::invalid_argument("translate_symbol: symbol must live on phase space");
    if (xi.dim() != a.grid.dim)
        throw std::invalid_argument("translate_symbol: phase point dimension mismatch");
    const int dim = a.grid.dim;
    const std::size_t n = static_cast<std::size_t>(a.grid.samples_per_axis);
    SampledFunction out = a;
    for (int ax = 0; ax < dim; ++ax)
        detail::shift_axis(out.values, 2 * dim, n, ax, xi.x[ax], a.grid.spacing());
    for (int ax = 0; ax < dim; ++ax)
        detail::shift_axis(out.values, 2 * dim, n, dim + ax, xi.p[ax], a.grid.dual_spacing());
    return out;
}

namespace detail {

// quadrature nodes of quad_grid must sit on the lattice of the state grid
inline void require_sublattice(const GridSpec& quad, const GridSpec& state) {
    if (quad.dim != state.dim)
        throw std::invalid_argument("kato_average: quadrature grid dimension mismatch");
    const double rx = quad.spacing() / state.spacing();
    const double rp = quad.dual_spacing() / state.dual_spacing();
    if (std::abs(rx - std::round(rx)) > 1e-9 || std::round(rx) < 1.0)
        throw std::invalid_argument(
            "kato_average: quadrature x-spacing must be an integer multiple of the state spacing");
    if (std::abs(rp - std::round(rp)) > 1e-9 || std::round(rp) < 1.0)
        throw std::invalid_argument(
            "kato_average: quadrature p-spacing must be an integer multiple of the dual spacing");
    if (quad.half_width > state.half_width + 1e-12 ||
        quad.dual_half_width() > state.dual_half_width() + 1e-12)
        throw std::invalid_argument("kato_average: quadrature box exceeds the state grid");
}

}  // namespace detail

inline constexpr std::size_t kato_average_budget = 1u << 22;  // nodes * matrix entries

// b{G} = sum over quadrature nodes of b(xi) W(xi) G W(-xi) times the phase
// cell weight. Nodes are restricted to on-lattice xi so every W is exact;
// box truncation is the only quadrature error.
inline OperatorKernel kato_average(const SampledFunction& b, const OperatorKernel& g,
                                   const GridSpec& quad_grid) {
    if (b.tag.space != Space::Phase)
        throw std::invalid_argument("kato_average: b must live on phase space");
    if (!(b.grid == quad_grid))
        throw std::invalid_argument("kato_average: b must be sampled on the quadrature grid");
    detail::require_sublattice(quad_grid, g.grid);

    const int dim = quad_grid.dim;
    const int nq = quad_grid.samples_per_axis;
    const std::size_t nodes = quad_grid.points(2 * dim);
    const std::size_t mm = static_cast<std::size_t>(g.values.rows()) *
                           static_cast<std::size_t>(g.values.cols());
    if (nodes * mm > kato_average_budget)
        throw std::runtime_error("kato_average: quadrature budget exceeded (" +
                                 std::to_string(nodes) + " nodes x " + std::to_string(mm) +
                                 " kernel entries); coarsen the quadrature grid");

    double cell = 1.0;
    for (int a = 0; a < dim; ++a)
        cell *= quad_grid.spacing() * (quad_grid.dual_spacing() / (2.0 * std::numbers::pi));

    const Eigen::MatrixXcd mg = g.action_matrix();
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(mg.rows(), mg.cols());
    std::vector<int> idx(2 * dim);
    for (std::size_t node = 0; node < nodes; ++node) {
        const cplx bv = b.values[node];
        if (bv == cplx{0.0, 0.0}) continue;
        detail::decode_index(node, 2 * dim, nq, idx.data());
        PhasePoint xi;
        xi.x.resize(dim);
        xi.p.resize(dim);
        for (int a = 0; a < dim; ++a) {
            xi.x[a] = quad_grid.coord(idx[a]);
            xi.p[a] = quad_grid.dual_coord(idx[dim + a]);
        }
        const Eigen::MatrixXcd w = weyl_action_matrix(xi, g.grid);
        acc.noalias() += (bv * cell) * (w * mg * w.adjoint());
    }
    return kernel_from_action(g.grid, acc);
}

// Relative operator-norm gap between the two sides of the synthesis
// identity: quantizing the plain convolution b * g versus averaging the
// quantization of g over Weyl conjugations weighted by b. quad_grid
// truncates the averaging integral; by default it is the full grid of b.
inline double synthesis_defect(const SampledFunction& b, const SampledFunction& g, double tau,
                               std::optional<GridSpec> quad_grid = std::nullopt) {
    require_same_layout(b, g, "synthesis_defect");
    const GridSpec quad = quad_grid.value_or(b.grid);
    const QuantizationParams params(tau, b.grid, b.tag.blocks);

    const OperatorKernel lhs = kernel_from_symbol(convolve(b, g), params);
    const OperatorKernel opg = kernel_from_symbol(g, params);

    // restrict b to the quadrature nodes
    SampledFunction bq = zeros_like(b.tag, quad);
    const int dim = quad.dim;
    const int nq = quad.samples_per_axis;
    const int ns = b.grid.samples_per_axis;
    std::vector<int> idx(2 * dim), sidx(2 * dim);
    for (std::size_t node = 0; node < bq.values.size(); ++node) {
        detail::decode_index(node, 2 * dim, nq, idx.data());
        bool ok = true;
        for (int a = 0; a < 2 * dim && ok; ++a) {
            const double coord = a < dim ? quad.coord(idx[a]) : quad.dual_coord(idx[a - dim]);
            const double step = a < dim ? b.grid.spacing() : b.grid.dual_spacing();
            const double r = coord / step;
            if (std::abs(r - std::round(r)) > 1e-9) ok = false;
            sidx[a] = static_cast<int>(std::llround(r)) + ns / 2;
            if (sidx[a] < 0 || sidx[a] >= ns) ok = false;
        }
        if (!ok)
            throw std::invalid_argument(
                "synthesis_defect: quadrature node off the symbol lattice");
        bq.values[node] = b.values[detail::encode_index(sidx.data(), 2 * dim, ns)];
    }
    const OperatorKernel rhs = kato_average(bq, opg, quad);

    Eigen::JacobiSVD<Eigen::MatrixXcd> num(lhs.action_matrix() - rhs.action_matrix());
    Eigen::JacobiSVD<Eigen::MatrixXcd> den(lhs.action_matrix());
    const double d = den.singularValues()(0);
    if (d == 0.0) return num.singularValues()(0) == 0.0 ? 0.0 : 1.0;
    return num.singularValues()(0) / d;
}

}  // namespace psidolab
