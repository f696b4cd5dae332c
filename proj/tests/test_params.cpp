#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fwlab/errors.hpp"
#include "fwlab/params.hpp"
#include "fwlab/rng.hpp"

using namespace fwlab;

TEST_CASE("validate accepts interior points") {
    const Params p = validate(4, 1.5, 2.0, 0.4);
    CHECK(p.sigma() == doctest::Approx(0.5));
    CHECK(4.0 / 1.5 > 2.0);
    CHECK((4 - 1.5 * 2.0) / 2.0 > 0.4);

    const Params q = validate(3, 1.25, 1.6, 0.25);
    CHECK(q.dim() == 3);
    CHECK((3 - 1.25 * 1.6) / 2.0 == doctest::Approx(0.5));
}

TEST_CASE("validate names the first violated window") {
    auto name_of = [](int n, double s, double p, double a) -> std::string {
        try {
            validate(n, s, p, a);
        } catch (const ConstraintViolation& e) {
            return e.name();
        }
        return "ok";
    };
    CHECK(name_of(2, 1.5, 1.5, 0.0) == "p-window");  // p >= N/s = 4/3
    CHECK(name_of(1, 1.5, 1.1, 0.0) == "dimension");
    CHECK(name_of(3, 2.0, 1.2, 0.0) == "s-window");
    CHECK(name_of(3, 1.0, 1.2, 0.0) == "s-window");
    CHECK(name_of(3, 1.25, 1.0, 0.0) == "p-window");
    CHECK(name_of(3, 1.25, 1.6, 0.5) == "a-window");  // boundary (N - sp)/2 is excluded
    CHECK(name_of(3, 1.25, 1.6, -0.1) == "a-window");

    try {
        validate(2, 1.5, 1.5, 0.0);
    } catch (const ConstraintViolation& e) {
        CHECK(e.value() == 1.5);
        CHECK(e.bound() == doctest::Approx(4.0 / 3.0));
    }
}

TEST_CASE("critical exponents") {
    CHECK(critical_exponent(4, 2.0, 1.5) == doctest::Approx(8.0));
    CHECK(critical_exponent(4, 2.0, 0.5) == doctest::Approx(8.0 / 3.0));
    CHECK(critical_exponent(5, 1.7, 0.0) == 1.7);
    CHECK_THROWS_AS(critical_exponent(4, 2.0, 2.0), DegenerateExponent);
    CHECK_THROWS_AS(critical_exponent(4, 2.0, 3.0), DegenerateExponent);
}

TEST_CASE("lorentz target") {
    // boundary s = 2 is allowed in the algebra: p* becomes 2N/(N-4)
    CHECK(lorentz_target(6, 2.0, 2.0, 0.0) == 6.0);
    CHECK(lorentz_target(3, 1.25, 1.6, 0.25) == doctest::Approx(9.6));
    const Params p = validate(3, 1.25, 1.6, 0.0);
    CHECK(lorentz_target(p) == critical_exponent(p, p.s()));
    CHECK_THROWS_AS(lorentz_target(3, 1.25, 1.6, 0.5), DegenerateExponent);
}

TEST_CASE("unit ball volume") {
    CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
    CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-14));
    // recurrence omega_N = 2 pi / N omega_{N-2}
    for (int n = 3; n <= 64; ++n) {
        CHECK(unit_ball_volume(n) == doctest::Approx(2.0 * std::numbers::pi / n * unit_ball_volume(n - 2)).epsilon(1e-12));
    }
    CHECK(std::isfinite(unit_ball_volume(64)));
    CHECK(unit_ball_volume(64) > 0.0);
    CHECK_THROWS(unit_ball_volume(0));
    CHECK_THROWS(unit_ball_volume(65));
}

TEST_CASE("exponent chain over random valid parameters") {
    CounterRng rng(7, 0);
    int checked = 0;
    while (checked < 1000) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 9);
        const double s = 1.0 + rng.uniform();
        const double p = 1.0 + rng.uniform() * (n / s - 1.0);
        const double a = rng.uniform() * (n - s * p) / 2.0;
        Params params = [&] {
            try {
                return validate(n, s, p, a);
            } catch (const ConstraintViolation&) {
                return validate(3, 1.25, 1.6, 0.25);
            }
        }();
        CHECK(validate(params) == params);
        const double ps = params.p_star_sigma();
        const double pss = params.p_star_s();
        const double pl = params.p_lorentz();
        CHECK(std::isfinite(pl));
        CHECK(params.p() < ps);
        CHECK(ps < pss);
        CHECK(pss <= pl);
        if (params.a() > 0.0) CHECK(pss < pl);
        ++checked;
    }
}

TEST_CASE("CKN admissibility for the Hardy choice") {
    const Params params = validate(3, 1.25, 1.6, 0.25);
    const CknParams c = ckn_hardy_choice(params);
    CHECK(c.m() == doctest::Approx(c.gamma));
    CHECK(c.gamma == doctest::Approx(c.alpha - 1.0));
    const auto report = ckn_admissible(c);
    CHECK(report.admissible);
    REQUIRE(report.find("balance") != nullptr);
    CHECK(report.find("balance")->satisfied);
    CHECK(report.find("alpha-minus-gamma-upper")->applies);
    CHECK(report.find("positivity-p")->lhs == doctest::Approx((3 - 0.25 * 1.6 - 0.5) / (3 * 1.6)));
    CHECK(report.find("positivity-r")->lhs == doctest::Approx((3 - 1.25 * 1.6 - 0.5) / (3 * 1.6)));
}

TEST_CASE("CKN positivity failure and trivial interpolation") {
    CknParams bad;
    bad.dim = 3;
    bad.p = 2.0;
    bad.alpha = -2.0;  // 1/2 - 2/3 < 0
    bad.l = 1.0;
    bad.r = 2.0;
    const auto report = ckn_admissible(bad);
    CHECK_FALSE(report.admissible);
    CHECK_FALSE(report.find("positivity-p")->satisfied);

    CknParams trivial;
    trivial.dim = 4;
    trivial.p = 2.0;
    trivial.q = 3.0;
    trivial.r = 3.0;
    trivial.beta = 0.7;
    trivial.alpha = 5.0;
    trivial.gamma = -9.0;
    trivial.l = 0.0;
    CHECK(trivial.m() == 0.7);
    const auto ok = ckn_admissible(trivial);
    CHECK(ok.admissible);
    CHECK_FALSE(ok.find("alpha-minus-gamma-lower")->applies);
}

TEST_CASE("CKN side conditions") {
    const Params params = validate(3, 1.25, 1.6, 0.25);
    CknParams c = ckn_hardy_choice(params);
    c.gamma = c.alpha + 0.1;  // alpha - gamma < 0
    c.r = 1.0 / (c.l * (1.0 / c.p + (c.alpha - 1.0) / c.dim) - c.m() / c.dim);
    const auto report = ckn_admissible(c);
    CHECK_FALSE(report.find("alpha-minus-gamma-lower")->satisfied);
    CHECK_FALSE(report.admissible);
}

TEST_CASE("relaxed bundles outside the weight window") {
    CHECK_THROWS_AS(validate(2, 1.3, 1.4, 0.1), ConstraintViolation);
    const Params r = relaxed(2, 1.3, 1.4, 0.1);
    CHECK_FALSE(r.in_window());
    CHECK(r.seminorm_scaling_exponent() == doctest::Approx(0.02));
    CHECK(r.homogeneous_kappa() < 0.0);
    CHECK_THROWS_AS(r.p_lorentz(), DegenerateExponent);
    CHECK(relaxed(3, 1.25, 1.6, 0.25) == validate(3, 1.25, 1.6, 0.25));
    CHECK(relaxed(3, 1.25, 1.6, 0.25).in_window());
    CHECK_THROWS_AS(relaxed(2, 1.3, 1.4, -0.1), ConstraintViolation);
    CHECK_THROWS_AS(relaxed(2, 1.3, 1.4, 1.0), ConstraintViolation);
    CHECK_THROWS_AS(relaxed(2, 1.5, 1.5, 0.0), ConstraintViolation);
}
