#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fwlab/errors.hpp"
#include "fwlab/functions.hpp"
#include "fwlab/norms.hpp"
#include "fwlab/params.hpp"
#include "fwlab/rearrange.hpp"

using namespace fwlab;
using std::numbers::pi;

namespace {

McConfig mc(std::uint64_t seed, std::int64_t n = 200000) {
    McConfig cfg;
    cfg.seed = seed;
    cfg.sample_count = n;
    return cfg;
}

std::vector<double> t_grid(double lo, double hi, int n) {
    std::vector<double> out;
    for (int k = 0; k < n; ++k) out.push_back(lo * std::pow(hi / lo, (k + 0.5) / n));
    return out;
}

}  // namespace

TEST_CASE("closed-form distribution functions") {
    for (int n : {2, 3}) {
        const double w = unit_ball_volume(n);
        const auto ind = distribution(catalog("ball_indicator(1.5)", n));
        CHECK(ind.source() == DistributionSource::closed_form);
        CHECK(ind.mu(0.5) == doctest::Approx(w * std::pow(1.5, n)));
        CHECK(ind.mu(1.0) == 0.0);
        CHECK(ind.mu(2.0) == 0.0);

        const auto ps = distribution(catalog("power_singular(1)", n));
        CHECK(ps.mu(2.0) == doctest::Approx(w * std::pow(2.0, -n)));

        const auto g = distribution(catalog("gaussian", n));
        CHECK(g.mu(0.25) == doctest::Approx(w * std::pow(std::log(4.0), 0.5 * n)));
        CHECK(g.mu(1.5) == 0.0);
    }
    CHECK_THROWS_AS(distribution(scale(catalog("bump", 2), 2.0, 0.0), DistributionMethod::closed_form), UnknownName);
}

TEST_CASE("profile inversion matches closed forms") {
    for (int n : {2, 3}) {
        for (const char* name : {"gaussian", "bump", "ball_indicator(1)"}) {
            const auto u = catalog(name, n);
            const auto c = distribution(u, DistributionMethod::closed_form);
            const auto i = distribution(u, DistributionMethod::profile_inversion);
            CHECK(i.source() == DistributionSource::profile_inversion);
            for (double t : t_grid(1e-6, 0.99 * c.sup(), 40)) {
                CHECK(i.mu(t) == doctest::Approx(c.mu(t)).epsilon(1e-10));
            }
            for (double tau : t_grid(1e-4, 10.0, 30)) {
                CHECK(i.fstar(tau) == doctest::Approx(c.fstar(tau)).epsilon(1e-10));
            }
        }
    }
    // power_singular has no length scale; inversion reaches it by doubling
    const auto ps = distribution(catalog("power_singular(0.5)", 2), DistributionMethod::profile_inversion);
    CHECK(ps.mu(1e-3) == doctest::Approx(pi * 1e12).epsilon(1e-9));
}

TEST_CASE("non-monotone profiles are rejected") {
    const auto g = gradient_magnitude(catalog("bump", 2));
    CHECK_THROWS_AS(distribution(g, DistributionMethod::profile_inversion), NonMonotoneProfile);
    // automatic falls back to Monte Carlo
    CHECK(distribution(g, DistributionMethod::automatic, mc(1, 20000)).source() == DistributionSource::mc_estimate);
    CHECK_THROWS_AS(distribution(catalog("poly_bump", 2), DistributionMethod::profile_inversion), ConstraintViolation);
}

TEST_CASE("Galois inequalities and monotonicity") {
    for (const char* name : {"gaussian", "bump", "plateau_bump", "ball_indicator(1)"}) {
        const auto u = catalog(name, 3);
        for (auto method : {DistributionMethod::automatic, DistributionMethod::mc_estimate}) {
            const auto d = distribution(u, method, mc(3, 20000));
            double prev_mu = kInfinity, prev_f = kInfinity;
            for (double t : t_grid(1e-5, 2.0, 60)) {
                const double m = d.mu(t);
                CHECK(m <= prev_mu);
                prev_mu = m;
                CHECK(d.fstar(m) <= t * (1 + 1e-9));
                CHECK(d.mu(t * (1 + 1e-9)) <= m);
            }
            for (double tau : t_grid(1e-4, 20.0, 60)) {
                const double f = d.fstar(tau);
                CHECK(f <= prev_f);
                prev_f = f;
                CHECK(d.mu(f) <= tau * (1 + 1e-9));
            }
        }
    }
}

TEST_CASE("equimeasurability: Monte Carlo hit counts against the exact curve") {
    const auto u = catalog("bump", 2);
    const auto exact = distribution(u);
    const auto est = distribution(u, DistributionMethod::mc_estimate, mc(5));
    CHECK(est.source() == DistributionSource::mc_estimate);
    for (double t : t_grid(1e-3, 0.35, 20)) {
        CHECK(std::abs(est.mu(t) - exact.mu(t)) <= 4.0 * est.mu_uncertainty(t) + 1e-12);
    }
}

TEST_CASE("Lorentz quasi-norm closed forms") {
    // weak norm of |x|^{-d} at P = N/d
    for (auto [n, d] : {std::pair{3, 1.0}, std::pair{2, 0.5}}) {
        const auto g = catalog(n == 3 ? "power_singular(1)" : "power_singular(0.5)", n);
        const double expected = std::pow(unit_ball_volume(n), d / n);
        CHECK(lorentz_quasinorm(g, n / d, kInfinity).value == doctest::Approx(expected).epsilon(1e-9));
        CHECK_THROWS_AS(lorentz_quasinorm(g, n / d, 2.0), DivergentQuasinorm);
        CHECK_THROWS_AS(lorentz_quasinorm(g, 0.5 * n / d, kInfinity), DivergentQuasinorm);
    }
    for (int n : {2, 3}) {
        const auto chi = catalog("ball_indicator(1)", n);
        for (auto [P, Q] : {std::pair{2.0, 2.0}, std::pair{3.0, 1.5}, std::pair{1.5, 4.0}}) {
            const double expected = std::pow(P / Q, 1.0 / Q) * std::pow(unit_ball_volume(n), 1.0 / P);
            CHECK(lorentz_quasinorm(chi, P, Q).value == doctest::Approx(expected).epsilon(1e-9));
        }
        CHECK(lorentz_quasinorm(chi, 2.0, kInfinity).value == doctest::Approx(std::sqrt(unit_ball_volume(n))).epsilon(1e-9));
    }
    const auto g = catalog("gaussian", 2);
    const double lp = weighted_lp(g, 2.0, 0.0, mc(1)).value;
    CHECK(lorentz_quasinorm(g, 2.0, 2.0).value == doctest::Approx(lp).epsilon(1e-6));
    CHECK(lorentz_quasinorm(catalog("zero", 2), 2.0, 2.0).value == 0.0);
    CHECK_THROWS_AS(lorentz_quasinorm(g, 0.0, 2.0), ConstraintViolation);
}

TEST_CASE("Lorentz from Monte Carlo curves agrees with deterministic paths") {
    const auto u = catalog("bump", 3);
    const auto exact = lorentz_quasinorm(u, 2.5, 1.6);
    const auto est = lorentz_quasinorm(distribution(u, DistributionMethod::mc_estimate, mc(7)), 2.5, 1.6);
    CHECK(est.uncertainty > 0.0);
    CHECK(std::abs(est.value - exact.value) <= 3.0 * est.uncertainty);
}

TEST_CASE("Lorentz nesting: finite at (p_lorentz, p) implies finite at (p_lorentz, p*_s)") {
    const Params P = validate(3, 1.25, 1.6, 0.25);
    for (const auto& name : smooth_catalog_names()) {
        const auto u = catalog(name, 3);
        const auto a = lorentz_quasinorm(u, P.p_lorentz(), P.p(), mc(9, 50000));
        const auto b = lorentz_quasinorm(u, P.p_lorentz(), P.p_star_s(), mc(9, 50000));
        CHECK(std::isfinite(a.value));
        CHECK(std::isfinite(b.value));
    }
}

TEST_CASE("layer cake") {
    for (int n : {2, 3}) {
        const auto ind = layer_cake_check(catalog("ball_indicator(1)", n));
        CHECK(ind.lhs.value == doctest::Approx(unit_ball_volume(n)).epsilon(1e-12));
        CHECK(ind.relative_gap <= 1e-12);
        for (const char* name : {"gaussian", "bump", "plateau_bump"}) {
            const auto r = layer_cake_check(catalog(name, n));
            CHECK(r.holds);
            CHECK(r.relative_gap <= 1e-6);
        }
    }
    const auto g2 = layer_cake_check(catalog("gaussian", 2));
    CHECK(g2.rhs.value == doctest::Approx(pi).epsilon(1e-6));
    const auto poly = layer_cake_check(catalog("poly_bump", 3), mc(11));
    CHECK(poly.holds);
    CHECK(poly.lhs.uncertainty > 0.0);
}

TEST_CASE("weighted layer-cake identities") {
    const Params P = validate(3, 1.25, 1.6, 0.25);
    CHECK(P.p_lorentz() == doctest::Approx(9.6));
    for (const char* name : {"bump", "gaussian", "plateau_bump"}) {
        const auto u = catalog(name, 3);
        const auto h = hardy_layercake_identity(u, P);
        CHECK(h.equality);
        CHECK(h.holds);
        CHECK(h.relative_gap <= 1e-6);
        const auto s = sobolev_layercake_identity(u, P);
        CHECK(s.holds);
        CHECK(s.relative_gap <= 1e-6);
    }
    const auto z = hardy_layercake_identity(catalog("zero", 3), P);
    CHECK(z.lhs.value == 0.0);
    CHECK(z.rhs.value == 0.0);
    CHECK(z.holds);

    // a = 0: the weight disappears and both sides are ||u||_{p*_s}^{p*_s}
    const Params P0 = validate(3, 1.25, 1.6, 0.0);
    const auto u = catalog("bump", 3);
    const auto s0 = sobolev_layercake_identity(u, P0);
    const double q = P0.p_star_s();
    CHECK(s0.lhs.value == doctest::Approx(weighted_lp_integral(u, q, 0.0, {}).value).epsilon(1e-12));
    CHECK(s0.rhs.value == doctest::Approx(std::pow(lorentz_quasinorm(u, q, q).value, q)).epsilon(1e-12));
    CHECK(s0.relative_gap <= 1e-6);

    // non-radial input: Hardy-Littlewood direction only
    const auto hp = hardy_layercake_identity(catalog("poly_bump", 3), P, mc(13));
    CHECK_FALSE(hp.equality);
    CHECK(hp.holds);
}
