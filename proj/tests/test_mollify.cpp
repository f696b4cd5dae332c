#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "fwlab/errors.hpp"
#include "fwlab/functions.hpp"
#include "fwlab/mollify.hpp"
#include "fwlab/rng.hpp"

using namespace fwlab;

namespace {

// Composite tensor Gauss-Legendre over the cube [-h, h]^N, independent of the
// library's radial quadrature.
double cube_integral(const std::function<double(std::span<const double>)>& f, int dim, double h, int panels = 6) {
    using G = boost::math::quadrature::gauss<double, 20>;
    std::vector<double> x, w;
    const double width = 2.0 * h / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = -h + (p + 0.5) * width;
        for (std::size_t i = 0; i < G::abscissa().size(); ++i) {
            const double a = G::abscissa()[i], b = G::weights()[i];
            x.push_back(mid + 0.5 * width * a);
            w.push_back(0.5 * width * b);
            if (a != 0.0) {
                x.push_back(mid - 0.5 * width * a);
                w.push_back(0.5 * width * b);
            }
        }
    }
    std::vector<std::size_t> idx(dim, 0);
    std::vector<double> z(dim);
    double total = 0.0;
    while (true) {
        double weight = 1.0;
        for (int k = 0; k < dim; ++k) {
            z[k] = x[idx[k]];
            weight *= w[idx[k]];
        }
        total += weight * f(z);
        int k = 0;
        while (k < dim && ++idx[k] == x.size()) idx[k++] = 0;
        if (k == dim) break;
    }
    return total;
}

std::vector<std::vector<double>> random_points(int dim, double radius, int count, std::uint64_t seed) {
    std::vector<std::vector<double>> out;
    for (int i = 0; i < count; ++i) {
        CounterRng rng(seed, i);
        std::vector<double> x(dim);
        rng.direction(x);
        const double r = radius * std::pow(rng.uniform(), 1.0 / dim);
        for (double& v : x) v *= r;
        out.push_back(x);
    }
    return out;
}

McConfig mc(std::uint64_t seed, std::int64_t n) {
    McConfig cfg;
    cfg.seed = seed;
    cfg.sample_count = n;
    return cfg;
}

}  // namespace

TEST_CASE("mollifier mass and support") {
    for (int dim : {2, 3}) {
        const Mollifier one(1, dim);
        for (int n : {1, 2, 4, 8}) {
            const Mollifier m(n, dim);
            CHECK(std::abs(m.mass() - 1.0) <= 1e-8);
            const double oracle = cube_integral([&m](std::span<const double> x) { return m(x); }, dim, 1.0 / n);
            CHECK(std::abs(oracle - 1.0) <= 1e-8);
            CHECK(std::abs(m.rule_mass() - 1.0) <= 1e-4);
            double wsum = 0.0;
            for (double w : m.weights()) {
                CHECK(w > 0.0);
                wsum += w;
            }
            CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
            std::vector<double> x(dim, 0.0);
            x[0] = 1.01 / n;
            CHECK(m(x) == 0.0);
            x[0] = 0.0;
            CHECK(m(x) == doctest::Approx(std::pow(n, dim) * one(x)).epsilon(1e-14));
        }
        const Mollifier two(2, dim);
        std::vector<double> o(dim, 0.0);
        CHECK(two(o) == doctest::Approx(std::pow(2.0, dim) * one(o)).epsilon(1e-14));
        // radially decreasing
        double prev = two.profile(0.0);
        for (int k = 1; k <= 100; ++k) {
            const double v = two.profile(0.5 * k / 100.0);
            CHECK(v <= prev);
            CHECK(v >= 0.0);
            prev = v;
        }
    }
    CHECK_THROWS_AS(Mollifier(0, 2), ConstraintViolation);
}

TEST_CASE("cutoff") {
    for (int n : {1, 2, 4, 8}) {
        const Cutoff z(n, 3);
        std::vector<double> x{0.5 * n, 0.0, 0.0};
        CHECK(z(x) == 1.0);
        x[0] = 2.5 * n;
        CHECK(z(x) == 0.0);
        for (int k = 0; k <= 300; ++k) {
            x = {0.01 * k * n, 0.0, 0.0};
            const double v = z(x);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    const double g1 = Cutoff(1, 2).gradient_bound();
    const double h1 = Cutoff(1, 2).hessian_bound();
    CHECK(g1 > 0.0);
    for (int n : {2, 4, 8}) {
        CHECK(Cutoff(n, 2).gradient_bound() * n == doctest::Approx(g1).epsilon(1e-9));
        CHECK(Cutoff(n, 2).hessian_bound() * n * n == doctest::Approx(h1).epsilon(1e-9));
    }
    // gradient against finite differences
    const auto f = Cutoff(2, 2).as_function();
    std::vector<std::vector<double>> pts{{2.3, 0.4}, {-1.0, 2.9}, {0.0, 3.5}};
    CHECK(gradient_fd_discrepancy(f, pts, 1e-5) <= 1e-6);
}

TEST_CASE("convolution") {
    const auto plateau = catalog("plateau_bump", 2);
    const Mollifier m4(4, 2);
    const auto c = convolve(plateau, m4);
    for (const auto& x : random_points(2, 0.74, 50, 1)) CHECK(c(x) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(c.support_radius() == doctest::Approx(2.25));

    const auto u = catalog("bump", 2);
    double lip = 0.0;
    for (int k = 0; k <= 4000; ++k) lip = std::max(lip, std::abs(u.profile()->derivative(k / 4000.0)));
    for (int n : {1, 2, 4, 8}) {
        const auto un = convolve(u, Mollifier(n, 2));
        double umax = 0.0, cmax = 0.0, diff = 0.0;
        for (const auto& x : random_points(2, 1.0 + 1.0 / n, 400, 2)) {
            umax = std::max(umax, std::abs(u(x)));
            cmax = std::max(cmax, std::abs(un(x)));
            diff = std::max(diff, std::abs(u(x) - un(x)));
        }
        CHECK(cmax <= std::exp(-1.0) + 1e-9);
        CHECK(diff <= lip / n);
        CHECK(gradient_fd_discrepancy(un, random_points(2, 0.9, 20, 3), 1e-5) <= 1e-4);
    }

    // higher-order rule agrees: the discrete rule resolves the convolution
    const auto g = catalog("gaussian", 3);
    const auto lo = convolve(g, Mollifier(2, 3));
    const auto hi = convolve(g, Mollifier(2, 3, 24));
    for (const auto& x : random_points(3, 1.5, 20, 4)) CHECK(lo(x) == doctest::Approx(hi(x)).epsilon(2e-5));
    const auto g2 = catalog("gaussian", 2);
    const auto lo2 = convolve(g2, Mollifier(2, 2));
    const auto hi2 = convolve(g2, Mollifier(2, 2, 32));
    for (const auto& x : random_points(2, 1.5, 20, 4)) CHECK(lo2(x) == doctest::Approx(hi2(x)).epsilon(2e-5));

    // commutes with translation
    const std::vector<double> shift{0.3, -0.2};
    const auto a = convolve(translate(u, shift), m4);
    for (const auto& x : random_points(2, 1.0, 30, 5)) {
        std::vector<double> y{x[0] - shift[0], x[1] - shift[1]};
        CHECK(a(x) == doctest::Approx(convolve(u, m4)(y)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(convolve(catalog("ball_indicator(1)", 2), m4), RearrangementOnlyFunction);
}

TEST_CASE("memoized convolution under concurrent evaluation") {
    const auto u = convolve(catalog("bump", 2), Mollifier(2, 2));
    const auto pts = random_points(2, 1.2, 300, 6);
    std::vector<double> serial;
    for (const auto& x : pts) serial.push_back(u(x));
    std::vector<std::vector<double>> results(4, std::vector<double>(pts.size()));
    {
        std::vector<std::jthread> pool;
        for (int t = 0; t < 4; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = 0; i < pts.size(); ++i) results[t][i] = u(pts[(i + 37 * t) % pts.size()]);
            });
        }
    }
    for (int t = 0; t < 4; ++t) {
        for (std::size_t i = 0; i < pts.size(); ++i) CHECK(results[t][i] == serial[(i + 37 * t) % pts.size()]);
    }
}

TEST_CASE("approximation sequence") {
    const Params P = relaxed(2, 1.3, 1.4, 0.1);
    const auto u = catalog("bump", 2);
    const auto cfg = mc(11, 20000);
    for (int n : {2, 4}) {
        const auto step = approximation_sequence(u, n, P, cfg);
        const auto w = convolve(u, Mollifier(n, 2));
        for (const auto& x : random_points(2, 1.0 + 1.0 / n, 50, 7)) CHECK(step.v(x) == doctest::Approx(w(x)).epsilon(1e-14));
        CHECK(gradient_fd_discrepancy(step.v, random_points(2, 1.0, 10, 8), 1e-5) <= 1e-4);
    }
    // n = 1: the cutoff acts on (1, 1 + 1/n); the product rule gradient stays consistent
    const auto one = approximation_sequence(u, 1, P, cfg);
    std::vector<std::vector<double>> band{{1.2, 0.3}, {-0.9, 0.8}, {0.0, 1.6}};
    CHECK(gradient_fd_discrepancy(one.v, band, 1e-5) <= 1e-4);

    const auto z = approximation_sequence(catalog("zero", 2), 3, P, cfg);
    CHECK(z.residual.value == 0.0);

    const auto r8 = approximation_sequence(u, 8, P, cfg);
    CHECK(r8.residual.value + 3.0 * std::hypot(r8.residual.uncertainty, one.residual.uncertainty) <
          one.residual.value);
}
