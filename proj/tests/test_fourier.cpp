#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "psidolab/fourier.hpp"
#include "psidolab/symbol_class.hpp"

using namespace psidolab;

namespace {

double max_diff(const SampledFunction& a, const SampledFunction& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    return worst;
}

SampledFunction random_field(const SpaceTag& tag, const GridSpec& g, std::uint64_t seed) {
    SampledFunction f = zeros_like(tag, g);
    std::uint64_t state = seed;
    for (cplx& v : f.values) {
        state = detail::splitmix64(state);
        const double re = 2.0 * detail::uniform01(state) - 1.0;
        state = detail::splitmix64(state);
        const double im = 2.0 * detail::uniform01(state) - 1.0;
        v = cplx{re, im};
    }
    return f;
}

}  // namespace

TEST_CASE("transform of the discrete delta is the constant one") {
    const GridSpec g(1, 16, 2.0);
    const SampledFunction d = discrete_delta(SpaceTag::x(), g);
    const SampledFunction hat = fourier_x(d, FourierSign::Forward);
    for (const cplx& v : hat.values) CHECK(std::abs(v - cplx{1.0, 0.0}) < 1e-12);
}

TEST_CASE("Gaussian transform pair") {
    // e^{-x^2/2} maps to sqrt(2 pi) e^{-p^2/2}
    const GridSpec g(1, 256, 12.0);
    const SampledFunction u = sample(
        [](std::span<const double> x) { return cplx{std::exp(-0.5 * x[0] * x[0]), 0.0}; }, g,
        SpaceTag::x());
    const SampledFunction hat = fourier_x(u, FourierSign::Forward);
    double worst = 0.0;
    for (int k = 0; k < g.samples_per_axis; ++k) {
        const double p = g.dual_coord(k);
        const double expected = std::sqrt(2.0 * std::numbers::pi) * std::exp(-0.5 * p * p);
        worst = std::max(worst, std::abs(hat.values[k] - expected));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("Fourier inversion and isometry") {
    const GridSpec g(2, 8, 1.5);
    const SampledFunction u = random_field(SpaceTag::x(), g, 5);
    const SampledFunction back = inv_fourier_x(fourier_x(u, FourierSign::Forward));
    CHECK(max_diff(u, back) < 1e-12);

    const SampledFunction hat = fourier_x(u, FourierSign::Forward);
    CHECK(std::abs(lp_norm(hat, 2.0) - lp_norm(u, 2.0)) < 1e-12 * lp_norm(u, 2.0));

    CHECK_THROWS_AS(fourier_x(hat, FourierSign::Forward), std::invalid_argument);
}

TEST_CASE("symplectic transform is involutive and unitary") {
    const GridSpec g(1, 32, 4.0);
    const SampledFunction a = random_field(SpaceTag::phase(1), g, 17);
    const SampledFunction twice = symplectic_fourier(symplectic_fourier(a));
    CHECK(max_diff(a, twice) < 1e-12);
    const double n0 = lp_norm(a, 2.0);
    CHECK(std::abs(lp_norm(symplectic_fourier(a), 2.0) - n0) < 1e-12 * n0);

    const SampledFunction d = discrete_delta(SpaceTag::phase(1), g);
    const SampledFunction hat = symplectic_fourier(d);
    for (const cplx& v : hat.values) CHECK(std::abs(v - cplx{1.0, 0.0}) < 1e-12);
}

TEST_CASE("phase multipliers compose and preserve the L2 norm") {
    const GridSpec g(1, 16, 3.0);
    const SampledFunction a = random_field(SpaceTag::phase(1), g, 23);

    const SampledFunction same =
        phase_multiplier(a, [](std::span<const double>) { return cplx{1.0, 0.0}; });
    CHECK(max_diff(a, same) < 1e-12);

    auto f = [](std::span<const double> xi) { return cplx{std::cos(xi[0]) + 2.0, 0.0}; };
    auto h = [](std::span<const double> xi) { return cplx{xi[1] * xi[1] + 0.5, 0.0}; };
    auto fh = [&](std::span<const double> xi) { return f(xi) * h(xi); };
    const SampledFunction lhs = phase_multiplier(phase_multiplier(a, f), h);
    const SampledFunction rhs = phase_multiplier(a, fh);
    CHECK(max_diff(lhs, rhs) < 1e-12 * lp_norm(a, std::numeric_limits<double>::infinity()));

    const SampledFunction rot = phase_multiplier(
        a, [](std::span<const double> xi) { return std::polar(1.0, xi[0] - 0.3 * xi[1]); });
    CHECK(std::abs(lp_norm(rot, 2.0) - lp_norm(a, 2.0)) < 1e-12 * lp_norm(a, 2.0));

    CHECK_THROWS_AS(
        phase_multiplier(a, [](std::span<const double>) { return cplx{std::nan(""), 0.0}; }),
        std::domain_error);
}

TEST_CASE("twisted convolution unit and point masses") {
    const GridSpec g(1, 16, 2.0);
    const SampledFunction mu = random_field(SpaceTag::phase(1), g, 31);
    const SampledFunction d = discrete_delta(SpaceTag::phase(1), g);
    CHECK(max_diff(twisted_convolution(mu, d), mu) < 1e-12);
    CHECK(max_diff(twisted_convolution(d, mu), mu) < 1e-12);

    // point masses at lattice xi, eta with xi + eta inside the box
    const int n = g.samples_per_axis;
    auto point_mass = [&](int ix, int ip) {
        SampledFunction m = zeros_like(SpaceTag::phase(1), g);
        m.values[static_cast<std::size_t>(ix) * n + ip] = 1.0 / m.point_weight();
        return m;
    };
    const int ix1 = n / 2 + 2, ip1 = n / 2 - 3, ix2 = n / 2 - 1, ip2 = n / 2 + 1;
    const SampledFunction prod = twisted_convolution(point_mass(ix1, ip1), point_mass(ix2, ip2));
    // expected: phase e^{(i/2) sigma(xi, eta)} at the sum point
    const double x1 = g.coord(ix1), p1 = g.dual_coord(ip1);
    const double x2 = g.coord(ix2), p2 = g.dual_coord(ip2);
    const double sigma = x2 * p1 - x1 * p2;
    SampledFunction expected = zeros_like(SpaceTag::phase(1), g);
    expected.values[static_cast<std::size_t>(ix1 + ix2 - n / 2) * n + (ip1 + ip2 - n / 2)] =
        std::polar(1.0, 0.5 * sigma) / expected.point_weight();
    CHECK(max_diff(prod, expected) < 1e-10 / expected.point_weight());
}

TEST_CASE("twisted convolution is associative for interior-supported fields") {
    const GridSpec g(1, 16, 4.0);
    // random fields masked to |coordinate| <= L/4 so no wrap event carries weight
    auto masked = [&](std::uint64_t seed) {
        SampledFunction f = random_field(SpaceTag::phase(1), g, seed);
        const int n = g.samples_per_axis;
        for (int ix = 0; ix < n; ++ix)
            for (int ip = 0; ip < n; ++ip) {
                const double x = g.coord(ix), p = g.dual_coord(ip);
                if (std::abs(x) > 0.25 * g.half_width ||
                    std::abs(p) > 0.25 * g.dual_half_width())
                    f.values[static_cast<std::size_t>(ix) * n + ip] = 0.0;
            }
        return f;
    };
    for (std::uint64_t seed : {41ull, 42ull, 43ull}) {
        const SampledFunction a = masked(seed);
        const SampledFunction b = masked(seed + 100);
        const SampledFunction c = masked(seed + 200);
        const SampledFunction lhs = twisted_convolution(twisted_convolution(a, b), c);
        const SampledFunction rhs = twisted_convolution(a, twisted_convolution(b, c));
        CHECK(max_diff(lhs, rhs) < 1e-10);
    }
}

TEST_CASE("twisted convolution rejects oversized grids") {
    const GridSpec g(1, 256, 4.0);  // 65536 phase points
    const SampledFunction a = zeros_like(SpaceTag::phase(1), g);
    CHECK_THROWS_AS(twisted_convolution(a, a), std::runtime_error);
}

TEST_CASE("plain convolution: unit, direct quadrature, Young, Gaussians") {
    const GridSpec g(1, 16, 3.0);
    const SampledFunction b = random_field(SpaceTag::phase(1), g, 53);
    const SampledFunction d = discrete_delta(SpaceTag::phase(1), g);
    CHECK(max_diff(convolve(b, d), b) < 1e-12);

    // direct O(M^2) quadrature oracle
    const SampledFunction c = random_field(SpaceTag::phase(1), g, 54);
    const SampledFunction fast = convolve(b, c);
    SampledFunction direct = zeros_like(SpaceTag::phase(1), g);
    const int n = g.samples_per_axis;
    const double w = b.point_weight();
    for (int ix = 0; ix < n; ++ix)
        for (int ip = 0; ip < n; ++ip) {
            cplx acc{0.0, 0.0};
            for (int jx = 0; jx < n; ++jx)
                for (int jp = 0; jp < n; ++jp) {
                    // array index of the wrapped coordinate difference
                    const int kx = ((ix - jx + n / 2) % n + n) % n;
                    const int kp = ((ip - jp + n / 2) % n + n) % n;
                    acc += b.values[static_cast<std::size_t>(kx) * n + kp] *
                           c.values[static_cast<std::size_t>(jx) * n + jp];
                }
            direct.values[static_cast<std::size_t>(ix) * n + ip] = w * acc;
        }
    CHECK(max_diff(fast, direct) < 1e-10);

    // Young inequality on random pairs
    for (double p : {1.0, 2.0}) {
        for (double q : {1.0, 2.0}) {
            const double rinv = 1.0 / p + 1.0 / q - 1.0;
            if (rinv <= 0.0) continue;
            CHECK(lp_norm(fast, 1.0 / rinv) <=
                  lp_norm(b, p) * lp_norm(c, q) * (1.0 + 1e-10));
        }
    }
}

TEST_CASE("Gaussian convolved with Gaussian") {
    const GridSpec g(1, 64, 10.0);
    const double s1 = 0.8, s2 = 1.1;
    auto gauss = [&](double s) {
        return sample(
            [s](std::span<const double> xi) {
                return cplx{std::exp(-(xi[0] * xi[0] + xi[1] * xi[1]) / (2.0 * s * s)), 0.0};
            },
            g, SpaceTag::phase(1));
    };
    const SampledFunction conv = convolve(gauss(s1), gauss(s2));
    // separable analytic convolution per axis; the p axis carries 1/(2 pi)
    const double s3 = std::sqrt(s1 * s1 + s2 * s2);
    const double amp1d = std::sqrt(2.0 * std::numbers::pi) * s1 * s2 / s3;
    double worst = 0.0;
    const int n = g.samples_per_axis;
    for (int ix = 0; ix < n; ++ix)
        for (int ip = 0; ip < n; ++ip) {
            const double x = g.coord(ix), p = g.dual_coord(ip);
            const double expected = amp1d * amp1d / (2.0 * std::numbers::pi) *
                                    std::exp(-(x * x + p * p) / (2.0 * s3 * s3));
            worst = std::max(worst,
                             std::abs(conv.values[static_cast<std::size_t>(ix) * n + ip] -
                                      expected));
        }
    CHECK(worst < 1e-8);
}

TEST_CASE("band-limited random symbols refine consistently") {
    const GridSpec coarse(1, 32, 4.0);
    const GridSpec fine(1, 64, 4.0);
    const SampledFunction a = random_symbol(7, 0.4, 2.0, coarse);
    const SampledFunction b = random_symbol(7, 0.4, 2.0, fine, 32);
    // the fine field restricted to the coarse lattice matches exactly
    double worst = 0.0;
    const int nc = coarse.samples_per_axis;
    for (int ix = 0; ix < nc; ++ix)
        for (int ip = 0; ip < nc; ++ip) {
            // x spacing halves, p box doubles: coarse (ix, ip) sits at fine
            // x index 2*ix and fine p index offset by nc/2... p lattice of the
            // coarse grid is a subset under matching physical coordinates
            const double x = coarse.coord(ix), p = coarse.dual_coord(ip);
            const int jx = static_cast<int>(std::llround(x / fine.spacing())) +
                           fine.samples_per_axis / 2;
            const int jp = static_cast<int>(std::llround(p / fine.dual_spacing())) +
                           fine.samples_per_axis / 2;
            const cplx va = a.values[static_cast<std::size_t>(ix) * nc + ip];
            const cplx vb =
                b.values[static_cast<std::size_t>(jx) * fine.samples_per_axis + jp];
            worst = std::max(worst, std::abs(va - vb));
        }
    CHECK(worst < 1e-10);
}
