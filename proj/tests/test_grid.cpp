#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "psidolab/detail/rng.hpp"
#include "psidolab/grid.hpp"

using namespace psidolab;

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(GridSpec(1, 3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(1, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(1, 8, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(0, 8, 1.0), std::invalid_argument);

    const GridSpec g(2, 16, 4.0);
    CHECK(g.spacing() == 0.5);
    CHECK(g.dual_spacing() == Catch::Approx(std::numbers::pi / 4.0));
    CHECK(g.dual_half_width() == Catch::Approx(16 * std::numbers::pi / 8.0));
    CHECK(g.coord(8) == 0.0);  // origin is on the lattice
}

TEST_CASE("dual of the dual grid is the original grid") {
    // binary-friendly half-widths round-trip exactly through the two divisions
    for (double l : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        const GridSpec g(1, 64, l);
        CHECK(g.dual().dual() == g);
    }
    // arbitrary half-widths round-trip to within one ulp
    for (double l : {3.7, 8.0 * std::sqrt(2.0), 11.313708498984761}) {
        const GridSpec g(1, 64, l);
        const double back = g.dual().dual().half_width;
        CHECK(std::abs(back - l) <= 2.0 * std::numeric_limits<double>::epsilon() * l);
    }
}

TEST_CASE("space tags") {
    CHECK_THROWS_AS(SpaceTag::phase(std::vector<int>{1, 2}).validate(2), std::invalid_argument);
    CHECK_THROWS_AS(SpaceTag::phase(std::vector<int>{0, 2}).validate(2), std::invalid_argument);
    CHECK_NOTHROW(SpaceTag::phase(std::vector<int>{1, 1}).validate(2));
    CHECK_NOTHROW(SpaceTag::x().validate(3));
}

TEST_CASE("sampling fills lattice points in row-major order") {
    const GridSpec g(1, 4, 1.0);
    const SampledFunction zero =
        sample([](std::span<const double>) { return cplx{0.0, 0.0}; }, g, SpaceTag::x());
    for (const cplx& v : zero.values) CHECK(v == cplx{0.0, 0.0});

    const SampledFunction one =
        sample([](std::span<const double>) { return cplx{1.0, 0.0}; }, g, SpaceTag::x());
    for (const cplx& v : one.values) CHECK(v == cplx{1.0, 0.0});

    const SampledFunction id =
        sample([](std::span<const double> x) { return cplx{x[0], 0.0}; }, g, SpaceTag::x());
    CHECK(id.values[0] == cplx{-1.0, 0.0});
    CHECK(id.values[1] == cplx{-0.5, 0.0});
    CHECK(id.values[2] == cplx{0.0, 0.0});
    CHECK(id.values[3] == cplx{0.5, 0.0});
}

TEST_CASE("sampling rejects non-finite values and names the point") {
    const GridSpec g(1, 4, 1.0);
    try {
        sample(
            [](std::span<const double> x) {
                return x[0] == 0.5 ? cplx{std::nan(""), 0.0} : cplx{0.0, 0.0};
            },
            g, SpaceTag::x());
        FAIL("expected domain_error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("0.5") != std::string::npos);
    }
}

TEST_CASE("lp norms") {
    const GridSpec g(1, 4, 1.0);
    const SampledFunction one =
        sample([](std::span<const double>) { return cplx{1.0, 0.0}; }, g, SpaceTag::x());
    CHECK(lp_norm(one, 1.0) == Catch::Approx(2.0));  // integral of 1 over [-1, 1)

    // Gaussian L2 norm against the analytic integral of e^{-2 x^2}
    const GridSpec gg(1, 256, 10.0);
    const SampledFunction gauss = sample(
        [](std::span<const double> x) { return cplx{std::exp(-x[0] * x[0]), 0.0}; }, gg,
        SpaceTag::x());
    const double expected = std::pow(std::numbers::pi / 2.0, 0.25);
    CHECK(std::abs(lp_norm(gauss, 2.0) - expected) < 1e-6);

    const SampledFunction id =
        sample([](std::span<const double> x) { return cplx{x[0], 0.0}; }, g, SpaceTag::x());
    CHECK(lp_norm(id, std::numeric_limits<double>::infinity()) == 1.0);

    CHECK_THROWS_AS(lp_norm(one, 0.5), std::domain_error);
}

TEST_CASE("norm homogeneity") {
    const GridSpec g(1, 32, 2.0);
    std::uint64_t state = 99;
    SampledFunction f = zeros_like(SpaceTag::x(), g);
    for (cplx& v : f.values) {
        state = detail::splitmix64(state);
        const double re = 2.0 * detail::uniform01(state) - 1.0;
        state = detail::splitmix64(state);
        const double im = 2.0 * detail::uniform01(state) - 1.0;
        v = cplx{re, im};
    }
    const cplx c{1.7, -2.3};
    SampledFunction cf = f;
    for (cplx& v : cf.values) v *= c;
    for (double p : {1.0, 2.0, 3.5, std::numeric_limits<double>::infinity()}) {
        const double lhs = lp_norm(cf, p);
        const double rhs = std::abs(c) * lp_norm(f, p);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);
    }
}

TEST_CASE("inner products") {
    const GridSpec g(1, 16, 2.0);
    std::uint64_t state = 7;
    SampledFunction f = zeros_like(SpaceTag::x(), g);
    SampledFunction h = zeros_like(SpaceTag::x(), g);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        state = detail::splitmix64(state);
        f.values[i] = cplx{detail::uniform01(state), detail::uniform01(detail::splitmix64(state))};
        state = detail::splitmix64(state);
        h.values[i] = cplx{detail::uniform01(state) - 0.5, 0.3};
    }
    CHECK(std::abs(inner(f, f).real() - std::pow(lp_norm(f, 2.0), 2)) < 1e-12);
    CHECK(std::abs(inner(f, f).imag()) < 1e-15);
    const cplx a = inner(f, h), b = inner(h, f);
    CHECK(std::abs(a - std::conj(b)) < 1e-14);

    // disjoint indicator bumps are orthogonal
    SampledFunction u = zeros_like(SpaceTag::x(), g);
    SampledFunction v = zeros_like(SpaceTag::x(), g);
    u.values[2] = 1.0;
    v.values[9] = 1.0;
    CHECK(inner(u, v) == cplx{0.0, 0.0});

    const GridSpec other(1, 16, 3.0);
    const SampledFunction w = zeros_like(SpaceTag::x(), other);
    CHECK_THROWS_AS(inner(f, w), std::invalid_argument);
}

TEST_CASE("Hoelder inequality on random pairs") {
    const GridSpec g(1, 32, 1.5);
    std::uint64_t state = 1234;
    for (int trial = 0; trial < 20; ++trial) {
        SampledFunction f = zeros_like(SpaceTag::x(), g);
        SampledFunction h = zeros_like(SpaceTag::x(), g);
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            state = detail::splitmix64(state);
            f.values[i] = cplx{2.0 * detail::uniform01(state) - 1.0, 0.1};
            state = detail::splitmix64(state);
            h.values[i] = cplx{2.0 * detail::uniform01(state) - 1.0, -0.2};
        }
        for (double p : {1.0, 1.5, 2.0, 4.0}) {
            const double q = p == 1.0 ? std::numeric_limits<double>::infinity()
                                      : p / (p - 1.0);
            CHECK(std::abs(inner(f, h)) <= lp_norm(f, p) * lp_norm(h, q) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("discrete delta integrates to one") {
    const GridSpec g(2, 8, 2.0);
    const SampledFunction d = discrete_delta(SpaceTag::x(), g);
    CHECK(lp_norm(d, 1.0) == Catch::Approx(1.0));
}
