#include "fwlab/norms.hpp"

#include <cmath>
#include <algorithm>

#include "fwlab/errors.hpp"
#include "point_buffer.hpp"

namespace fwlab {

namespace {

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

void require_exponent(double q) {
    if (!(q >= 1.0)) throw ConstraintViolation("exponent", q, 1.0, "norm exponent must be >= 1");
}

void require_order(double t) {
    if (!(t > 0.0 && t < 1.0)) throw ConstraintViolation("order", t, t <= 0.0 ? 0.0 : 1.0, "Gagliardo order must lie in (0,1)");
}

PairIntegrand pair_for(const Field& f, double p) {
    PairIntegrand F;
    F.dim = f.dim;
    F.length_scale = f.length_scale;
    F.difference_order = p;
    const int comps = f.components;
    F.numerator = [values = f.values, comps, p](std::span<const double> x, std::span<const double> y) {
        detail::PointBuffer fx(static_cast<std::size_t>(comps));
        detail::PointBuffer fy(static_cast<std::size_t>(comps));
        values(x, fx.span());
        values(y, fy.span());
        double d = 0.0;
        for (int i = 0; i < comps; ++i) {
            const double diff = fx[i] - fy[i];
            d += diff * diff;
        }
        if (d == 0.0) return 0.0;
        return std::pow(d, 0.5 * p);
    };
    F.magnitude = [values = f.values, comps](std::span<const double> x) {
        detail::PointBuffer fx(static_cast<std::size_t>(comps));
        values(x, fx.span());
        return std::sqrt(norm2(fx.cspan()));
    };
    return F;
}

}  // namespace

void NormSpec::check() const {
    require_exponent(exponent);
    if (kind == NormKind::gagliardo) require_order(order);
}

Field Field::scalar(const TestFunction& u) {
    if (!u.smooth()) {
        throw RearrangementOnlyFunction(u.name() + " is rearrangement-only; Gagliardo quadrature on it is ill-posed");
    }
    Field f;
    f.name = u.name();
    f.dim = u.dim();
    f.components = 1;
    f.length_scale = u.length_scale();
    f.values = [u](std::span<const double> x, std::span<double> out) { out[0] = u(x); };
    return f;
}

Field Field::gradient(const TestFunction& u) {
    if (!u.smooth()) {
        throw RearrangementOnlyFunction(u.name() + " is rearrangement-only; it has no gradient");
    }
    Field f;
    f.name = "grad " + u.name();
    f.dim = u.dim();
    f.components = u.dim();
    f.length_scale = u.length_scale();
    f.values = [u](std::span<const double> x, std::span<double> out) { u.gradient(x, out); };
    return f;
}

Field Field::difference(const Field& a, const Field& b) {
    if (a.dim != b.dim || a.components != b.components) {
        throw ConstraintViolation("dimension", b.dim, a.dim, "Field::difference: shape mismatch");
    }
    Field f;
    f.name = a.name + " - " + b.name;
    f.dim = a.dim;
    f.components = a.components;
    f.length_scale = std::max(a.length_scale, b.length_scale);
    const int comps = a.components;
    f.values = [va = a.values, vb = b.values, comps](std::span<const double> x, std::span<double> out) {
        detail::PointBuffer tmp(static_cast<std::size_t>(comps));
        va(x, out);
        vb(x, tmp.span());
        for (int i = 0; i < comps; ++i) out[i] -= tmp[i];
    };
    return f;
}

Estimate weighted_lp_integral(const TestFunction& u, double q, double beta, const McConfig& cfg) {
    require_exponent(q);
    if (u.radial()) {
        const RadialProfile& prof = *u.profile();
        auto g = [&prof, q](double r) {
            const double v = std::abs(prof.value(r));
            return v == 0.0 ? 0.0 : std::pow(v, q);
        };
        const double rmax = u.compact() ? u.support_radius() : kInfinity;
        return integrate_radial(g, beta, u.dim(), rmax, prof.breakpoints, u.length_scale());
    }
    // Monte Carlo with a density matched to the weight
    const int dim = u.dim();
    const double radius = u.compact() ? u.support_radius() : u.length_scale();
    const double exponent = std::clamp(beta, 0.0, dim - 0.5);
    const double r2max = radius * radius;
    auto f = [&u, q, beta, r2max](std::span<const double> x) {
        const double r2 = norm2(x);
        if (r2 >= r2max) return 0.0;
        const double v = std::abs(u(x));
        if (v == 0.0) return 0.0;
        return std::pow(v, q) * std::pow(r2, -0.5 * beta);
    };
    return integrate_mc(f, dim, cfg, Importance::radial_power(exponent, radius));
}

Estimate weighted_lp(const TestFunction& u, double q, double beta, const McConfig& cfg) {
    return power(weighted_lp_integral(u, q, beta, cfg), 1.0 / q);
}

Estimate gagliardo_integral(const Field& f, double t, double p, double a, const McConfig& cfg) {
    require_order(t);
    require_exponent(p);
    return gagliardo_mc(pair_for(f, p), f.dim + t * p, a, cfg);
}

Estimate gagliardo(const Field& f, double t, double p, double a, const McConfig& cfg) {
    return power(gagliardo_integral(f, t, p, a, cfg), 1.0 / p);
}

Estimate gagliardo(const TestFunction& u, double t, double p, double a, const McConfig& cfg) {
    return gagliardo(Field::scalar(u), t, p, a, cfg);
}

GradientSeminormReadings gradient_seminorm_readings(const TestFunction& u, double t, double p, double a,
                                                    const McConfig& cfg) {
    require_order(t);
    require_exponent(p);
    const Field g = Field::gradient(u);
    GradientSeminormReadings out;
    out.euclidean = gagliardo_mc(pair_for(g, p), g.dim + t * p, a, cfg);

    PairIntegrand comp = pair_for(g, p);
    const int n = g.dim;
    comp.numerator = [values = g.values, n, p](std::span<const double> x, std::span<const double> y) {
        detail::PointBuffer fx(static_cast<std::size_t>(n));
        detail::PointBuffer fy(static_cast<std::size_t>(n));
        values(x, fx.span());
        values(y, fy.span());
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = std::abs(fx[i] - fy[i]);
            if (d > 0.0) s += std::pow(d, p);
        }
        return s;
    };
    out.componentwise = gagliardo_mc(comp, n + t * p, a, cfg);
    return out;
}

Estimate higher_seminorm(const TestFunction& u, const Params& params, const McConfig& cfg) {
    return gagliardo(Field::gradient(u), params.sigma(), params.p(), params.a(), cfg);
}

HomogeneousNorm homogeneous_norm(const TestFunction& u, const Params& params, const McConfig& cfg) {
    HomogeneousNorm out;
    const double q = params.p_star_sigma();
    out.gradient_part = weighted_lp(gradient_magnitude(u), q, 2.0 * params.a() * q / params.p(), cfg);
    out.seminorm_part = higher_seminorm(u, params, cfg);
    out.total = sum(out.gradient_part, out.seminorm_part);
    return out;
}

Estimate evaluate(const TestFunction& u, const NormSpec& spec, const McConfig& cfg) {
    spec.check();
    switch (spec.kind) {
        case NormKind::weighted_lp: return weighted_lp(u, spec.exponent, spec.weight_power, cfg);
        case NormKind::gagliardo: return gagliardo(u, spec.order, spec.exponent, spec.weight_power, cfg);
        case NormKind::homogeneous: {
            // order is s - 1, exponent p, weight a
            const Params params = relaxed(u.dim(), 1.0 + spec.order, spec.exponent, spec.weight_power);
            return homogeneous_norm(u, params, cfg).total;
        }
    }
    return {};
}

}  // namespace fwlab
