#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "psidolab/fourier.hpp"
#include "psidolab/quantize.hpp"
#include "psidolab/symbol_class.hpp"

using namespace psidolab;

namespace {

double max_diff(const SampledFunction& a, const SampledFunction& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    return worst;
}

}  // namespace

TEST_CASE("constant symbol quantizes to the identity") {
    const GridSpec g(1, 16, 3.0);
    const SampledFunction one = sample(
        [](std::span<const double>) { return cplx{1.0, 0.0}; }, g, SpaceTag::phase(1));
    for (double tau : {0.0, 0.25, 0.5, 1.0}) {
        const OperatorKernel k = kernel_from_symbol(one, QuantizationParams(tau, g));
        const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(16, 16);
        CHECK((k.action_matrix() - id).cwiseAbs().maxCoeff() < 1e-12);
    }
    // identity kernel maps back to the constant symbol
    OperatorKernel id_kernel{g, Eigen::MatrixXcd::Identity(16, 16) / g.spacing()};
    const SampledFunction back = symbol_from_kernel(id_kernel, QuantizationParams(0.5, g));
    const SampledFunction expected = one;
    CHECK(max_diff(back, expected) < 1e-12);
}

TEST_CASE("x-only symbols quantize to multiplication operators for every tau") {
    const GridSpec g(1, 16, 3.0);
    auto f = [](double x) { return std::cos(0.7 * x) + 0.3; };
    const SampledFunction a = sample(
        [&](std::span<const double> xi) { return cplx{f(xi[0]), 0.0}; }, g, SpaceTag::phase(1));
    for (double tau : {0.0, 0.25, 0.5, 0.77, 1.0}) {
        const OperatorKernel k = kernel_from_symbol(a, QuantizationParams(tau, g));
        const Eigen::MatrixXcd m = k.action_matrix();
        double worst = 0.0;
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) {
                const double expected = i == j ? f(g.coord(i)) : 0.0;
                worst = std::max(worst, std::abs(m(i, j) - expected));
            }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("momentum symbol acts as the spectral derivative") {
    const GridSpec g(1, 32, 4.0);
    const SampledFunction a = sample(
        [](std::span<const double> xi) { return cplx{xi[1], 0.0}; }, g, SpaceTag::phase(1));
    for (double tau : {0.0, 0.37, 0.5, 1.0}) {
        const OperatorKernel k = kernel_from_symbol(a, QuantizationParams(tau, g));
        for (double freq : {g.dual_spacing(), -3.0 * g.dual_spacing()}) {
            const SampledFunction wave = sample(
                [freq](std::span<const double> x) { return std::polar(1.0, freq * x[0]); }, g,
                SpaceTag::x());
            const SampledFunction img = k.apply(wave);
            double worst = 0.0;
            for (std::size_t i = 0; i < wave.values.size(); ++i)
                worst = std::max(worst, std::abs(img.values[i] - freq * wave.values[i]));
            CHECK(worst < 1e-10);
        }
    }
}

TEST_CASE("kernel construction matches direct quadrature of the defining formula") {
    // tau = 0: K(x, y) = b(x, x - y) with b the momentum-slot inverse
    // transform; build b by direct summation as the oracle
    const GridSpec g(1, 16, 2.5);
    const SampledFunction a = random_symbol(3, 0.5, 2.0, g);
    const OperatorKernel k = kernel_from_symbol(a, QuantizationParams(0.0, g));
    const int n = g.samples_per_axis;
    const double wdual = 1.0 / (2.0 * g.half_width);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double v =
                g.coord(i) - g.coord(j) >= g.half_width
                    ? g.coord(i) - g.coord(j) - 2.0 * g.half_width
                    : (g.coord(i) - g.coord(j) < -g.half_width
                           ? g.coord(i) - g.coord(j) + 2.0 * g.half_width
                           : g.coord(i) - g.coord(j));
            cplx acc{0.0, 0.0};
            for (int c = 0; c < n; ++c) {
                const double p = g.dual_coord(c);
                acc += wdual * std::polar(1.0, v * p) *
                       a.values[static_cast<std::size_t>(i) * n + c];
            }
            worst = std::max(worst, std::abs(k.values(i, j) - acc));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("symbol-kernel roundtrip across the tau set") {
    const GridSpec g(1, 32, 4.0);
    const SampledFunction a = random_symbol(11, 0.45, 2.0, g);
    for (double tau : {0.0, 0.25, 0.5, 1.0}) {
        const QuantizationParams params(tau, g);
        const SampledFunction back = symbol_from_kernel(kernel_from_symbol(a, params), params);
        CHECK(max_diff(back, a) < 1e-10);
    }
}

TEST_CASE("rank-one Gaussian projector has a real Weyl symbol") {
    // L = 5 balances box truncation against aliasing at N = 16; both the
    // oracle and the implementation carry ~e^{-L^2/4} quadrature error
    const GridSpec g(1, 16, 5.0);
    const SampledFunction phi = sample(
        [](std::span<const double> x) {
            return cplx{std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x[0] * x[0]), 0.0};
        },
        g, SpaceTag::x());
    OperatorKernel proj{g, Eigen::MatrixXcd(16, 16)};
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j)
            proj.values(i, j) = phi.values[i] * std::conj(phi.values[j]);
    const SampledFunction wig = symbol_from_kernel(proj, QuantizationParams(0.5, g));

    double imag_part = 0.0;
    for (const cplx& v : wig.values) imag_part = std::max(imag_part, std::abs(v.imag()));
    CHECK(imag_part < 1e-10);

    // direct double-integral oracle: h * sum_v e^{-i v p} phi(u + v/2) phi(u - v/2)
    double worst = 0.0;
    const int n = g.samples_per_axis;
    auto phi_at = [](double x) {
        return std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    };
    for (int iu = 0; iu < n; ++iu)
        for (int ic = 0; ic < n; ++ic) {
            const double u = g.coord(iu), p = g.dual_coord(ic);
            cplx acc{0.0, 0.0};
            for (int iv = 0; iv < n; ++iv) {
                const double v = g.coord(iv);
                acc += g.spacing() * std::polar(1.0, -v * p) * phi_at(u + 0.5 * v) *
                       phi_at(u - 0.5 * v);
            }
            worst = std::max(worst,
                             std::abs(wig.values[static_cast<std::size_t>(iu) * n + ic] - acc));
        }
    CHECK(worst < 5e-3);  // quadrature-level agreement at N = 16
}

TEST_CASE("ordering conversion") {
    const GridSpec g(1, 32, 4.0);
    const SampledFunction a = random_symbol(19, 0.4, 2.5, g);

    CHECK(max_diff(convert_tau(a, 0.3, 0.3), a) == 0.0);

    // x-only symbols are fixed points of every conversion
    const SampledFunction fx = sample(
        [](std::span<const double> xi) { return cplx{std::sin(0.5 * xi[0]), 0.0}; }, g,
        SpaceTag::phase(1));
    for (double tau : {0.0, 0.25, 0.5, 1.0})
        CHECK(max_diff(convert_tau(fx, 0.0, tau), fx) < 1e-10);

    // kernel equality: quantizing the converted symbol in the new ordering
    // reproduces the original operator
    for (double tau_to : {0.25, 0.5, 1.0}) {
        const OperatorKernel k1 = kernel_from_symbol(a, QuantizationParams(0.0, g));
        const OperatorKernel k2 =
            kernel_from_symbol(convert_tau(a, 0.0, tau_to), QuantizationParams(tau_to, g));
        CHECK((k1.values - k2.values).cwiseAbs().maxCoeff() /
                  k1.values.cwiseAbs().maxCoeff() <
              1e-8);
    }

    // conversion round trip
    CHECK(max_diff(convert_tau(convert_tau(a, 0.0, 0.5), 0.5, 0.0), a) < 1e-10);
}

TEST_CASE("composition through kernels") {
    const GridSpec g(1, 16, 4.0);
    const QuantizationParams weylp(0.5, g);
    const SampledFunction a = random_symbol(23, 0.4, 2.0, g);
    const SampledFunction one = sample(
        [](std::span<const double>) { return cplx{1.0, 0.0}; }, g, SpaceTag::phase(1));
    CHECK(max_diff(compose_symbols(a, one, weylp), a) < 1e-10);

    // multiplication symbols compose pointwise
    auto fval = [](double x) { return std::cos(0.8 * x); };
    auto gval = [](double x) { return 1.0 + 0.5 * std::sin(0.4 * x); };
    const SampledFunction f = sample(
        [&](std::span<const double> xi) { return cplx{fval(xi[0]), 0.0}; }, g,
        SpaceTag::phase(1));
    const SampledFunction h = sample(
        [&](std::span<const double> xi) { return cplx{gval(xi[0]), 0.0}; }, g,
        SpaceTag::phase(1));
    const SampledFunction fg = sample(
        [&](std::span<const double> xi) { return cplx{fval(xi[0]) * gval(xi[0]), 0.0}; }, g,
        SpaceTag::phase(1));
    CHECK(max_diff(compose_symbols(f, h, weylp), fg) < 1e-10);

    // Weyl composition against the twisted-convolution route
    const SampledFunction b = random_symbol(29, 0.4, 2.0, g);
    const SampledFunction via_kernels = compose_symbols(a, b, weylp);
    const SampledFunction via_twisted = symplectic_fourier(
        twisted_convolution(symplectic_fourier(a), symplectic_fourier(b)));
    CHECK(max_diff(via_kernels, via_twisted) < 1e-8);
}

TEST_CASE("quantization is linear and an L2 isometry independent of tau") {
    const GridSpec g(1, 32, 4.0);
    const SampledFunction a = random_symbol(31, 0.4, 2.0, g);
    const SampledFunction b = random_symbol(37, 0.4, 2.0, g);
    const QuantizationParams params(0.25, g);

    SampledFunction lin = a;
    for (std::size_t i = 0; i < lin.values.size(); ++i)
        lin.values[i] = cplx{2.0, -1.0} * a.values[i] + b.values[i];
    const Eigen::MatrixXcd klin = kernel_from_symbol(lin, params).values;
    const Eigen::MatrixXcd ksum = cplx{2.0, -1.0} * kernel_from_symbol(a, params).values +
                                  kernel_from_symbol(b, params).values;
    CHECK((klin - ksum).cwiseAbs().maxCoeff() < 1e-12 * ksum.cwiseAbs().maxCoeff());

    const double a2 = lp_norm(a, 2.0);
    std::vector<double> hs;
    for (double tau : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const OperatorKernel k = kernel_from_symbol(a, QuantizationParams(tau, g));
        hs.push_back(k.measure_weight() * k.values.norm());
    }
    for (double v : hs) CHECK(std::abs(v - a2) / a2 < 1e-6);
    const auto [mn, mx] = std::minmax_element(hs.begin(), hs.end());
    CHECK((*mx - *mn) / a2 < 1e-10);
}

TEST_CASE("real symbols give symmetric Weyl operators") {
    const GridSpec g(1, 32, 4.0);
    const SampledFunction a = random_symbol(41, 0.4, 2.0, g);  // real by construction
    const OperatorKernel k = kernel_from_symbol(a, QuantizationParams(0.5, g));
    CHECK((k.values - k.values.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}
