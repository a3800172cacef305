#include "catch2/catch_amalgamated.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

#include "hmarea/distortion.hpp"
#include "hmarea/io.hpp"
#include "hmarea/quadrature.hpp"

using namespace hmarea;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("Gauss-Legendre nodes and weights") {
    for (int q : {1, 2, 5, 16, 64, 256}) {
        const auto rule = gauss_legendre(q);
        double wsum = 0.0;
        for (double w : rule.weights) wsum += w;
        CHECK(wsum == Approx(2.0).epsilon(1e-14));
        for (std::size_t i = 1; i < rule.nodes.size(); ++i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
    }
    const auto three = gauss_legendre(3);
    CHECK(three.nodes[2] == Approx(std::sqrt(0.6)).epsilon(1e-15));
    CHECK(three.weights[1] == Approx(8.0 / 9.0).epsilon(1e-15));
    CHECK_THROWS_AS(gauss_legendre(0), InvalidArgument);
}

TEST_CASE("integrate_polar reference values") {
    const auto one = integrate_polar([](Complex) { return 1.0; }, Disk(0.5));
    CHECK(std::abs(one.value - kPi / 4) <= 1e-12);
    CHECK(one.error_estimate >= 0.0);
    CHECK(one.evals > 0);

    const auto shear = construct_map({ShearSpec{0.3, 2}});
    const auto js = integrate_polar([&](Complex z) { return jacobian(shear, z); }, Disk(0.5));
    CHECK(std::abs(js.value - 0.750055246044563136) <= 1e-8);

    const auto hyp = integrate_polar([](Complex z) { return 1.0 / std::pow(1.0 - std::norm(z), 2); }, Disk(0.5));
    CHECK(std::abs(hyp.value - 1.04719755119659775) <= 1e-8);
}

TEST_CASE("integrate_polar is exact for even radial powers") {
    for (int m : {0, 1, 2, 3}) {
        for (double r : {0.3, 0.5, 1.0}) {
            const auto res = integrate_polar([m](Complex z) { return std::pow(std::abs(z), 2 * m); }, Disk(r));
            const double exact = 2.0 * kPi * std::pow(r, 2 * m + 2) / (2 * m + 2);
            CHECK(std::abs(res.value - exact) <= 1e-12);
        }
    }
}

TEST_CASE("integrate_polar over star profiles") {
    const Region star = io::trefoil_star();
    const auto one = integrate_polar([](Complex) { return 1.0; }, star);
    CHECK(std::abs(one.value - region_measure(star).value) <= 1e-12);

    const auto affine = construct_map({AffineSpec{0.5}});
    const auto area = integrate_polar([&](Complex z) { return jacobian(affine, z); }, star);
    CHECK(std::abs(area.value - 0.75 * region_measure(star).value) <= 1e-12);

    // |z|^2 on a profile with kinks: int R^4 / 4 over each segment is w (a^4 + a^3 b + a^2 b^2 + a b^3 + b^4) / 20
    const StarShaped square({0.4, 0.6, 0.4, 0.6, 0.4, 0.6, 0.4, 0.6});
    double exact = 0.0;
    for (int s = 0; s < 8; ++s) {
        const double a = s % 2 ? 0.6 : 0.4, b = s % 2 ? 0.4 : 0.6;
        exact += (kPi / 4) * (a * a * a * a + a * a * a * b + a * a * b * b + a * b * b * b + b * b * b * b) / 20.0;
    }
    const auto r2 = integrate_polar([](Complex z) { return std::norm(z); }, square);
    CHECK(std::abs(r2.value - exact) <= 1e-12);
}

TEST_CASE("integrate_polar preconditions and non-convergence") {
    CHECK_THROWS_AS(integrate_polar([](Complex) { return 1.0; }, rasterize(Disk(0.5), 64)), InvalidArgument);
    QuadOptions bad;
    bad.tol = 1e-13;
    CHECK_THROWS_AS(integrate_polar([](Complex) { return 1.0; }, Disk(0.5), bad), InvalidArgument);

    // a near-singular field with tiny caps cannot converge
    QuadOptions tiny;
    tiny.q0 = 2;
    tiny.q_cap = 4;
    tiny.m0 = 4;
    tiny.m_cap = 8;
    try {
        (void)integrate_polar([](Complex z) { return 1.0 / (1.0001 - std::abs(z)); }, Disk(1.0), tiny);
        FAIL("expected non-convergence");
    } catch (const NonConvergenceError& e) {
        CHECK(e.coarse() != e.fine());
    }
}

TEST_CASE("quadrature is bitwise deterministic across worker counts") {
    const auto f = construct_map({RawSpec{{0.0, 1.0, 0.0, 0.05}, {0.0, 0.0, {0.1, 0.05}}}});
    const auto field = [&](Complex z) { return jacobian(f, z); };
    for (const Region& e : {Region{Disk(0.5)}, Region{io::trefoil_star()}}) {
        QuadOptions one;
        QuadOptions eight;
        eight.workers = 8;
        const auto a = integrate_polar(field, e, one);
        const auto b = integrate_polar(field, e, eight);
        const auto c = integrate_polar(field, e, eight);
        CHECK(same_bits(a.value, b.value));
        CHECK(same_bits(b.value, c.value));
        CHECK(same_bits(a.error_estimate, b.error_estimate));
        CHECK(a.evals == b.evals);
    }
    const auto grid = rasterize(Disk(0.6), 256);
    CHECK(same_bits(integrate_grid(field, grid, 1).value, integrate_grid(field, grid, 8).value));
}

TEST_CASE("sample cubic map against the frozen oracle") {
    const auto f = construct_map({RawSpec{{0.0, 1.0, 0.0, 0.05}, {0.0, 0.0, {0.1, 0.05}}}});
    CHECK(std::abs(image_area(f, Disk(0.5)).value - 0.780857580265306812) <= 1e-10);
    CHECK(std::abs(analytic_energy(f, Disk(0.5)).value - 0.785766318786540864) <= 1e-10);
}

TEST_CASE("integrate_grid midpoint rule") {
    const PixelGrid g = rasterize(Disk(1.0), 1024);
    const auto one = integrate_grid([](Complex) { return 1.0; }, g);
    CHECK(one.value == Approx(region_measure(g).value).epsilon(1e-14));
    CHECK(one.evals > 0);

    const auto affine = construct_map({AffineSpec{0.5}});
    const auto area = integrate_grid([&](Complex z) { return jacobian(affine, z); }, g);
    CHECK(area.value == Approx(0.75 * region_measure(g).value).epsilon(1e-14));

    const auto r2 = integrate_grid([](Complex z) { return std::norm(z); }, g);
    CHECK(r2.value == Approx(kPi / 2).epsilon(0.01));
}

TEST_CASE("integrate_grid is monotone under mask enlargement") {
    const auto field = [](Complex z) { return 1.0 + std::norm(z); };
    double prev = 0.0;
    for (double r : {0.2, 0.4, 0.6, 0.8}) {
        const double v = integrate_grid(field, rasterize(Disk(r), 128)).value;
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("rasterization oracle examples") {
    const auto identity = construct_map({AutomorphismSpec{0.0, 0.0}});
    const auto id = mc_image_area(identity, Disk(0.5), 1024, 42);
    CHECK(id.value == Approx(kPi / 4).epsilon(0.02));

    const auto affine = mc_image_area(construct_map({AffineSpec{0.5}}), Disk(0.5), 1024, 42);
    CHECK(affine.value == Approx(0.75 * kPi / 4).epsilon(0.02));

    const auto rot = mc_image_area(construct_map({AutomorphismSpec{0.0, 0.9}}),
                                   StarShaped(std::vector<double>(256, 0.7)), 1024, 42);
    CHECK(rot.value == Approx(0.49 * kPi).epsilon(0.02));

    const auto again = mc_image_area(construct_map({AffineSpec{0.5}}), Disk(0.5), 1024, 42);
    CHECK(same_bits(again.value, affine.value));
    CHECK(same_bits(again.error_estimate, affine.error_estimate));

    CHECK_THROWS_AS(mc_image_area(identity, Disk(0.5), 1000, 42), InvalidArgument);
}

TEST_CASE("rasterization oracle agrees with the area formula") {
    for (const auto& p : io::builtin_presets()) {
        const auto f = construct_map(p.spec);
        const auto quad = image_area(f, Disk(0.5));
        const auto mc = mc_image_area(f, Disk(0.5), 1024, 42);
        INFO(p.name);
        CHECK(std::abs(mc.value - quad.value) <= std::max(0.02 * quad.value, 5.0 * mc.error_estimate));
    }
}
