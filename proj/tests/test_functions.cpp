#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fwlab/errors.hpp"
#include "fwlab/functions.hpp"
#include "fwlab/params.hpp"
#include "fwlab/rng.hpp"

using namespace fwlab;

namespace {

std::vector<std::vector<double>> points_in_ball(int dim, double radius, int count, std::uint64_t seed) {
    std::vector<std::vector<double>> pts;
    CounterRng rng(seed, 0);
    while (static_cast<int>(pts.size()) < count) {
        std::vector<double> x(dim);
        rng.direction(x);
        const double r = radius * std::pow(rng.uniform(), 1.0 / dim);
        for (double& v : x) v *= r;
        pts.push_back(std::move(x));
    }
    return pts;
}

// Random rotation from Gram-Schmidt on Gaussian columns.
std::vector<double> random_rotation(int n, std::uint64_t seed) {
    CounterRng rng(seed, 1);
    std::vector<double> q(n * n);
    for (double& v : q) v = rng.normal();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            double dot = 0.0;
            for (int k = 0; k < n; ++k) dot += q[i * n + k] * q[j * n + k];
            for (int k = 0; k < n; ++k) q[i * n + k] -= dot * q[j * n + k];
        }
        double nrm = 0.0;
        for (int k = 0; k < n; ++k) nrm += q[i * n + k] * q[i * n + k];
        nrm = std::sqrt(nrm);
        for (int k = 0; k < n; ++k) q[i * n + k] /= nrm;
    }
    return q;
}

}  // namespace

TEST_CASE("catalog values") {
    const auto bump = catalog("bump", 3);
    const std::vector<double> origin{0.0, 0.0, 0.0};
    CHECK(bump(origin) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    const std::vector<double> edge{1.0, 0.0, 0.0};
    CHECK(bump(edge) == 0.0);
    std::vector<double> g(3);
    bump.gradient(edge, g);
    CHECK(g[0] == 0.0);

    const auto gauss = catalog("gaussian", 2);
    const std::vector<double> x{0.3, -0.7};
    gauss.gradient(x, g);
    const double e = std::exp(-(0.09 + 0.49));
    CHECK(g[0] == doctest::Approx(-2.0 * 0.3 * e));
    CHECK(g[1] == doctest::Approx(2.0 * 0.7 * e));

    CHECK_THROWS_AS(catalog("sombrero", 2), UnknownName);
    CHECK_THROWS_AS(catalog("power_singular(x)", 2), UnknownName);
    CHECK_THROWS_AS(catalog("power_singular", 2), UnknownName);

    const auto plateau = catalog("plateau_bump", 2);
    CHECK(plateau(std::vector<double>{0.5, 0.5}) == 1.0);
    CHECK(plateau(std::vector<double>{2.0, 0.1}) == 0.0);
    const double mid = plateau(std::vector<double>{1.5, 0.0});
    CHECK(mid == doctest::Approx(0.5).epsilon(1e-12));  // symmetric transition

    const auto ball = catalog("ball_indicator(2)", 3);
    CHECK(ball(std::vector<double>{1.9, 0.0, 0.0}) == 1.0);
    CHECK(ball(std::vector<double>{2.1, 0.0, 0.0}) == 0.0);
    CHECK_FALSE(ball.smooth());
    CHECK_THROWS_AS(ball.gradient(origin, g), RearrangementOnlyFunction);

    const auto sing = catalog("power_singular(1.5)", 3);
    CHECK(sing(std::vector<double>{2.0, 0.0, 0.0}) == doctest::Approx(std::pow(2.0, -1.5)));
}

TEST_CASE("finite-difference gradients on smooth entries") {
    for (int dim : {2, 3}) {
        for (const auto& name : smooth_catalog_names()) {
            const auto u = catalog(name, dim);
            const double radius = u.compact() ? u.support_radius() : 3.0;
            const auto pts = points_in_ball(dim, radius, 100, 11 + dim);
            CAPTURE(name);
            CHECK(gradient_fd_discrepancy(u, pts) <= 1e-5);
        }
    }
}

TEST_CASE("support invariant") {
    for (const auto& name : smooth_catalog_names()) {
        const auto u = catalog(name, 3);
        if (!u.compact()) continue;
        const auto pts = points_in_ball(3, 3.0 * u.support_radius(), 200, 5);
        std::vector<double> g(3);
        for (const auto& x : pts) {
            double r = 0.0;
            for (double v : x) r += v * v;
            if (std::sqrt(r) <= u.support_radius()) continue;
            CHECK(u(x) == 0.0);
            u.gradient(x, g);
            for (double v : g) CHECK(v == 0.0);
        }
    }
}

TEST_CASE("radial entries agree with their profile and are rotation invariant") {
    for (const char* name : {"bump", "plateau_bump", "gaussian", "power_singular(0.7)", "ball_indicator(0.8)"}) {
        const auto u = catalog(name, 3);
        REQUIRE(u.radial());
        const auto q = random_rotation(3, 3);
        const auto ur = rotate(u, q);
        for (const auto& x : points_in_ball(3, 2.0, 100, 9)) {
            double r = 0.0;
            for (double v : x) r += v * v;
            r = std::sqrt(r);
            CHECK(u(x) == doctest::Approx(u.profile()->value(r)).epsilon(1e-12));
            CHECK(ur(x) == doctest::Approx(u(x)).epsilon(1e-12));
        }
    }
    CHECK_FALSE(catalog("poly_bump", 2).radial());
}

TEST_CASE("scaling operator") {
    const auto gauss = catalog("gaussian", 2);
    const auto g2 = scale(gauss, 2.0, 0.0);
    const std::vector<double> x{0.2, 0.4};
    CHECK(g2(x) == doctest::Approx(std::exp(-4.0 * 0.2)).epsilon(1e-14));

    const auto bump = catalog("bump", 2);
    CHECK(scale(bump, 2.0, 0.0).support_radius() == 0.5);

    const auto id = scale(bump, 1.0, 1.7);
    for (const auto& p : points_in_ball(2, 1.2, 50, 1)) CHECK(id(p) == bump(p));

    // composition of scalings
    const double kappa = 0.6;
    const auto twice = scale(scale(bump, 1.5, kappa), 0.75, kappa);
    const auto once = scale(bump, 1.5 * 0.75, kappa);
    std::vector<double> ga(2), gb(2);
    for (const auto& p : points_in_ball(2, 1.0, 100, 2)) {
        CHECK(twice(p) == doctest::Approx(once(p)).epsilon(1e-12));
        twice.gradient(p, ga);
        once.gradient(p, gb);
        CHECK(ga[0] == doctest::Approx(gb[0]).epsilon(1e-12));
        CHECK(ga[1] == doctest::Approx(gb[1]).epsilon(1e-12));
    }
    CHECK(gradient_fd_discrepancy(scale(bump, 1.7, 0.3), points_in_ball(2, 0.5, 50, 3)) <= 1e-5);
    CHECK_THROWS(scale(bump, 0.0, 0.0));
}

TEST_CASE("gradient magnitude and combinations") {
    const auto bump = catalog("bump", 3);
    const auto mag = gradient_magnitude(bump);
    REQUIRE(mag.radial());
    std::vector<double> g(3);
    for (const auto& x : points_in_ball(3, 1.0, 50, 4)) {
        bump.gradient(x, g);
        double r = 0.0;
        for (double v : x) r += v * v;
        CHECK(mag(x) == doctest::Approx(std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2])).epsilon(1e-12));
        CHECK(mag(x) == doctest::Approx(mag.profile()->value(std::sqrt(r))).epsilon(1e-10));
    }
    const auto combo = linear_combination(bump, 2.0, catalog("poly_bump", 3), -1.0);
    CHECK(gradient_fd_discrepancy(combo, points_in_ball(3, 1.0, 50, 6)) <= 1e-5);
    const auto shifted = translate(bump, {0.5, 0.0, 0.0});
    CHECK(shifted(std::vector<double>{0.5, 0.0, 0.0}) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("smooth transition") {
    CHECK(smooth_transition(0.3) == 1.0);
    CHECK(smooth_transition(2.0) == 0.0);
    double prev = 1.0;
    for (double r = 1.0; r <= 2.0; r += 0.01) {
        const double t = smooth_transition(r);
        CHECK(t <= prev + 1e-15);
        CHECK(t >= 0.0);
        prev = t;
    }
    // derivative matches finite differences
    for (double r : {1.1, 1.3, 1.5, 1.8}) {
        const double fd = (smooth_transition(r + 1e-5) - smooth_transition(r - 1e-5)) / 2e-5;
        CHECK(smooth_transition_derivative(r) == doctest::Approx(fd).epsilon(1e-7));
        const double fd2 = (smooth_transition_derivative(r + 1e-5) - smooth_transition_derivative(r - 1e-5)) / 2e-5;
        CHECK(smooth_transition_second_derivative(r) == doctest::Approx(fd2).epsilon(1e-6));
    }
}
