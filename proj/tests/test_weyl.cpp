#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "psidolab/detail/rng.hpp"
#include "psidolab/weyl.hpp"

using namespace psidolab;

namespace {

SampledFunction normalized_gaussian(const GridSpec& g, double sigma) {
    SampledFunction f = sample(
        [sigma](std::span<const double> x) {
            double q = 0.0;
            for (double v : x) q += v * v;
            return cplx{std::exp(-q / (2.0 * sigma * sigma)), 0.0};
        },
        g, SpaceTag::x());
    const double n = lp_norm(f, 2.0);
    for (cplx& v : f.values) v /= n;
    return f;
}

double max_diff(const SampledFunction& a, const SampledFunction& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    return worst;
}

}  // namespace

TEST_CASE("W(0) is the identity and lattice shifts are circular") {
    const GridSpec g(1, 32, 4.0);
    const SampledFunction psi = normalized_gaussian(g, 1.0);
    CHECK(max_diff(weyl_apply(PhasePoint(0.0, 0.0), psi), psi) == 0.0);

    const SampledFunction shifted = weyl_apply(PhasePoint(g.spacing(), 0.0), psi);
    for (int j = 0; j < g.samples_per_axis; ++j) {
        const int src = (j - 1 + g.samples_per_axis) % g.samples_per_axis;
        CHECK(shifted.values[j] == psi.values[src]);
    }
}

TEST_CASE("Weyl operators are unitary") {
    const GridSpec g(1, 64, 6.0);
    const SampledFunction psi = normalized_gaussian(g, 1.3);
    for (const PhasePoint& xi :
         {PhasePoint(3.0 * g.spacing(), -2.0 * g.dual_spacing()), PhasePoint(0.73, 1.21)}) {
        const SampledFunction img = weyl_apply(xi, psi);
        CHECK(std::abs(lp_norm(img, 2.0) - 1.0) < 1e-12);
    }
}

TEST_CASE("off-lattice application matches dense direct evaluation") {
    // the shift is trigonometric interpolation, exact on effectively
    // band-limited states; the oracle samples the translated Gaussian directly
    const GridSpec g(1, 128, 12.0);
    const SampledFunction psi = sample(
        [](std::span<const double> x) { return cplx{std::exp(-0.5 * x[0] * x[0]), 0.0}; }, g,
        SpaceTag::x());
    const PhasePoint xi(0.63, -1.17);
    const SampledFunction img = weyl_apply(xi, psi);
    const SampledFunction direct = sample(
        [&xi](std::span<const double> y) {
            const double shifted = y[0] - xi.x[0];
            return std::polar(std::exp(-0.5 * shifted * shifted),
                              (y[0] - 0.5 * xi.x[0]) * xi.p[0]);
        },
        g, SpaceTag::x());
    CHECK(max_diff(img, direct) < 1e-10);
}

TEST_CASE("composition law") {
    const GridSpec g(1, 64, 8.0);
    const SampledFunction psi = normalized_gaussian(g, 1.0);

    // inverse pair
    const PhasePoint xi(5.0 * g.spacing(), 3.0 * g.dual_spacing());
    CHECK(composition_defect(xi, -xi, psi) < 1e-12);

    // exact discrete law on the lattice
    std::uint64_t state = 2024;
    for (int k = 0; k < 25; ++k) {
        auto draw = [&](double scale) {
            state = detail::splitmix64(state);
            return std::round((2.0 * detail::uniform01(state) - 1.0) * scale);
        };
        const PhasePoint a(draw(10.0) * g.spacing(), draw(10.0) * g.dual_spacing());
        const PhasePoint b(draw(10.0) * g.spacing(), draw(10.0) * g.dual_spacing());
        CHECK(composition_defect(a, b, psi) < 1e-12);
    }

    // off-lattice on a band-limited state at N = 128
    const GridSpec fine(1, 128, 12.0);
    const SampledFunction phi = normalized_gaussian(fine, 1.0);
    state = 77;
    for (int k = 0; k < 10; ++k) {
        auto draw = [&] {
            state = detail::splitmix64(state);
            return 2.0 * (2.0 * detail::uniform01(state) - 1.0);
        };
        const PhasePoint a(draw(), draw());
        const PhasePoint b(draw(), draw());
        CHECK(composition_defect(a, b, phi) < 1e-8);
    }
}

TEST_CASE("adjoint identity as matrices") {
    const GridSpec g(1, 16, 2.0);
    const PhasePoint xi(3.0 * g.spacing(), -5.0 * g.dual_spacing());
    const Eigen::MatrixXcd w = weyl_action_matrix(xi, g);
    const Eigen::MatrixXcd winv = weyl_action_matrix(-xi, g);
    CHECK((w.adjoint() - winv).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((w * winv - Eigen::MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("matrix coefficients of the Gaussian") {
    const GridSpec g(1, 128, 10.0);
    const SampledFunction phi = normalized_gaussian(g, 1.0);
    const SampledFunction w = matrix_coefficient(phi, phi, g);

    // |w(x,p)| = e^{-(x^2+p^2)/4} for the normalized width-1 Gaussian
    double worst = 0.0;
    const int n = g.samples_per_axis;
    for (int ix = 0; ix < n; ++ix)
        for (int ip = 0; ip < n; ++ip) {
            const double x = g.coord(ix), p = g.dual_coord(ip);
            const double expected = std::exp(-(x * x + p * p) / 4.0);
            worst = std::max(worst,
                             std::abs(std::abs(w.values[static_cast<std::size_t>(ix) * n + ip]) -
                                      expected));
        }
    CHECK(worst < 1e-6);

    // the origin entry is the plain scalar product
    const std::size_t origin = static_cast<std::size_t>(n / 2) * n + n / 2;
    CHECK(std::abs(w.values[origin] - inner(phi, phi)) < 1e-12);

    // sup bound by the norms
    double sup = 0.0;
    for (const cplx& v : w.values) sup = std::max(sup, std::abs(v));
    CHECK(sup <= 1.0 + 1e-12);
}

TEST_CASE("matrix coefficient agrees with per-point application") {
    const GridSpec state(1, 32, 5.0);
    const GridSpec quad(1, 8, 2.0);  // off the state lattice
    const SampledFunction phi = normalized_gaussian(state, 0.9);
    const SampledFunction psi = normalized_gaussian(state, 1.4);
    const SampledFunction w = matrix_coefficient(phi, psi, quad);
    const int nq = quad.samples_per_axis;
    for (int ix = 0; ix < nq; ix += 3)
        for (int ip = 0; ip < nq; ip += 3) {
            const PhasePoint xi(quad.coord(ix), quad.dual_coord(ip));
            const cplx direct = inner(phi, weyl_apply(xi, psi));
            CHECK(std::abs(w.values[static_cast<std::size_t>(ix) * nq + ip] - direct) < 1e-12);
        }
}

TEST_CASE("Parseval identity is exact on the canonical phase grid") {
    const GridSpec g(1, 64, 8.0);
    const SampledFunction phi = normalized_gaussian(g, 1.0);
    const SampledFunction psi = normalized_gaussian(g, 2.2);
    CHECK(parseval_defect(phi, psi, g) < 1e-12);

    // orthogonality relation: sum of conj(w') w = (phi, phi')(psi', psi)
    const SampledFunction phi2 = normalized_gaussian(g, 1.7);
    const SampledFunction psi2 = normalized_gaussian(g, 0.8);
    const SampledFunction w1 = matrix_coefficient(phi, psi, g);
    const SampledFunction w2 = matrix_coefficient(phi2, psi2, g);
    const cplx lhs = inner(w2, w1);
    const cplx rhs = inner(phi, phi2) * inner(psi2, psi);
    CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("Parseval defect shrinks as the quadrature box grows") {
    const GridSpec state(1, 256, 16.0);
    const SampledFunction phi = normalized_gaussian(state, 2.0);
    const double d0 = parseval_defect(phi, phi, GridSpec(1, 64, 8.0));
    const double d1 = parseval_defect(phi, phi, GridSpec(1, 128, 8.0 * std::sqrt(2.0)));
    const double d2 = parseval_defect(phi, phi, GridSpec(1, 256, 16.0));
    CHECK(d0 < 1e-2);
    CHECK(d1 < d0);
    CHECK(d2 <= d1);

    // homogeneity: the defect ignores the scale of the states
    SampledFunction scaled = phi;
    for (cplx& v : scaled.values) v *= cplx{0.0, 3.7};
    CHECK(std::abs(parseval_defect(scaled, phi, GridSpec(1, 64, 8.0)) - d0) < 1e-10);

    CHECK_THROWS_AS(parseval_defect(zeros_like(SpaceTag::x(), state), phi, state),
                    std::domain_error);
}
