#include "fwlab/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fwlab/errors.hpp"
#include "fwlab/norms.hpp"
#include "fwlab/rng.hpp"
#include "point_buffer.hpp"

namespace fwlab {

namespace {

constexpr int kBatches = 16;
// keeps hit-counting draws independent of integrate_mc on the same seed
constexpr std::uint64_t kDistributionStream = 0x5ea7c0u;

struct CatalogName {
    std::string base;
    double arg = 0.0;
    bool has_arg = false;
};

CatalogName parse_name(const std::string& name) {
    CatalogName out;
    const auto open = name.find('(');
    if (open == std::string::npos) {
        out.base = name;
        return out;
    }
    out.base = name.substr(0, open);
    const auto close = name.find(')', open);
    if (close == std::string::npos || close != name.size() - 1) {
        out.base = name;
        return out;
    }
    try {
        std::size_t used = 0;
        const std::string inner = name.substr(open + 1, close - open - 1);
        out.arg = std::stod(inner, &used);
        out.has_arg = used == inner.size();
    } catch (const std::exception&) {
        out.base = name;
    }
    return out;
}

std::optional<RearrangementProfile> closed_form(const TestFunction& f) {
    const int n = f.dim();
    const double omega = unit_ball_volume(n);
    const double half = 0.5 * n;
    const CatalogName c = parse_name(f.name());
    using S = DistributionSource;
    if (c.base == "zero" && !c.has_arg) {
        return RearrangementProfile::analytic(S::closed_form, n, [](double) { return 0.0; }, [](double) { return 0.0; },
                                              0.0, 0.0);
    }
    if (c.base == "ball_indicator" && c.has_arg) {
        const double vol = omega * std::pow(c.arg, n);
        return RearrangementProfile::analytic(
            S::closed_form, n, [vol](double t) { return t < 1.0 ? vol : 0.0; },
            [vol](double tau) { return tau < vol ? 1.0 : 0.0; }, 1.0, vol);
    }
    if (c.base == "power_singular" && c.has_arg) {
        const double d = c.arg;
        return RearrangementProfile::analytic(
            S::closed_form, n, [omega, n, d](double t) { return omega * std::pow(t, -n / d); },
            [omega, n, d](double tau) { return std::pow(tau / omega, -d / n); }, kInfinity, kInfinity);
    }
    if (c.base == "gaussian" && !c.has_arg) {
        return RearrangementProfile::analytic(
            S::closed_form, n, [omega, half](double t) { return t < 1.0 ? omega * std::pow(-std::log(t), half) : 0.0; },
            [omega, n](double tau) { return std::exp(-std::pow(tau / omega, 2.0 / n)); }, 1.0, kInfinity);
    }
    if (c.base == "bump" && !c.has_arg) {
        const double top = std::exp(-1.0);
        return RearrangementProfile::analytic(
            S::closed_form, n,
            [omega, half, top](double t) {
                if (t >= top) return 0.0;
                return omega * std::pow(1.0 - 1.0 / -std::log(t), half);
            },
            [omega, n](double tau) {
                const double r = std::pow(tau / omega, 1.0 / n);
                return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0;
            },
            top, omega);
    }
    return std::nullopt;
}

RearrangementProfile invert_profile(const TestFunction& f) {
    if (!f.radial()) {
        throw ConstraintViolation("radial", 0.0, 1.0, "profile inversion needs a radial function: " + f.name());
    }
    const int n = f.dim();
    const double omega = unit_ball_volume(n);
    auto g = [value = f.profile()->value](double r) { return std::abs(value(r)); };

    // monotonicity of |g| on a log-plus-linear grid out to the support / length scale
    const double reach = f.compact() ? f.support_radius() : f.length_scale();
    std::vector<double> grid;
    for (int k = 0; k <= 1000; ++k) grid.push_back(reach * std::pow(10.0, -9.0 + 9.0 * k / 1000.0));
    for (int k = 1; k <= 3000; ++k) grid.push_back(reach * k / 3000.0);
    std::sort(grid.begin(), grid.end());
    double prev = g(grid.front());
    for (double r : grid) {
        const double v = g(r);
        if (v > prev * (1.0 + 1e-12) + 1e-300) {
            std::ostringstream os;
            os << "|" << f.name() << "| increases near r = " << r;
            throw NonMonotoneProfile(os.str());
        }
        prev = v;
    }

    const double sup = g(0.0);
    const double support = f.compact() ? omega * std::pow(f.support_radius(), n) : kInfinity;
    const double start = f.compact() ? f.support_radius() : f.length_scale();
    auto radius = [g, start](double t) {
        double lo = 0.0;
        double hi = start;
        for (int i = 0; i < 2000 && g(hi) > t; ++i) {
            lo = hi;
            hi *= 2.0;
        }
        if (g(hi) > t) return kInfinity;
        for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) > t ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    auto mu = [radius, omega, n, sup](double t) {
        if (!(t < sup)) return 0.0;
        return omega * std::pow(radius(t), n);
    };
    auto fstar = [g, omega, n](double tau) { return g(std::pow(tau / omega, 1.0 / n)); };
    return RearrangementProfile::analytic(DistributionSource::profile_inversion, n, mu, fstar, sup, support);
}

RearrangementProfile estimate_mc(const TestFunction& f, const McConfig& cfg) {
    cfg.check();
    const int n = f.dim();
    const double radius = f.compact() ? f.support_radius() : f.length_scale();
    const double volume = unit_ball_volume(n) * std::pow(radius, n);
    std::vector<double> values(static_cast<std::size_t>(cfg.sample_count));
    detail::PointBuffer x(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < cfg.sample_count; ++i) {
        CounterRng rng(cfg.seed ^ kDistributionStream, static_cast<std::uint64_t>(i));
        rng.direction(x.span());
        const double r = radius * std::pow(rng.uniform(), 1.0 / n);
        for (int k = 0; k < n; ++k) x[k] *= r;
        values[static_cast<std::size_t>(i)] = std::abs(f(x.cspan()));
    }
    return RearrangementProfile::sampled(n, std::move(values), volume);
}

// Step-function Lorentz integral / supremum from descending values.
double sampled_lorentz(const std::vector<double>& desc, double cell, double P, double Q) {
    if (std::isinf(Q)) {
        double best = 0.0;
        for (std::size_t k = 0; k < desc.size() && desc[k] > 0.0; ++k) {
            best = std::max(best, desc[k] * std::pow(cell * (k + 1), 1.0 / P));
        }
        return best;
    }
    double total = 0.0;
    for (std::size_t k = 0; k < desc.size() && desc[k] > 0.0; ++k) {
        const double next = k + 1 < desc.size() ? desc[k + 1] : 0.0;
        const double width = std::pow(desc[k], Q) - std::pow(next, Q);
        if (width > 0.0) total += std::pow(cell * (k + 1), Q / P) * width / Q;
    }
    return std::pow(P * total, 1.0 / Q);
}

double relative_gap(double a, double b) {
    const double m = std::max(std::abs(a), std::abs(b));
    return m == 0.0 ? 0.0 : std::abs(a - b) / m;
}

IdentityReport judge(std::string name, Estimate lhs, Estimate rhs, bool equality, double tolerance) {
    IdentityReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.relative_gap = relative_gap(lhs.value, rhs.value);
    r.tolerance = tolerance;
    r.equality = equality;
    const double noise = 3.0 * std::hypot(lhs.uncertainty, rhs.uncertainty);
    const double scale = std::max(std::abs(lhs.value), std::abs(rhs.value));
    if (equality) {
        r.holds = r.relative_gap <= tolerance || std::abs(lhs.value - rhs.value) <= noise;
    } else {
        r.holds = lhs.value <= rhs.value + tolerance * scale + noise;
    }
    return r;
}

}  // namespace

std::string to_string(DistributionSource s) {
    switch (s) {
        case DistributionSource::closed_form: return "closed_form";
        case DistributionSource::profile_inversion: return "profile_inversion";
        case DistributionSource::mc_estimate: return "mc_estimate";
    }
    return "unknown";
}

double RearrangementProfile::mu(double t) const {
    if (source_ != DistributionSource::mc_estimate) return mu_(t);
    // number of samples strictly above t
    const auto it = std::lower_bound(samples_.begin(), samples_.end(), t, std::greater<double>());
    const auto above = it - samples_.begin();
    return sample_volume_ * static_cast<double>(above) / static_cast<double>(samples_.size());
}

double RearrangementProfile::mu_uncertainty(double t) const {
    if (source_ != DistributionSource::mc_estimate) return 0.0;
    const double m = static_cast<double>(samples_.size());
    const double frac = mu(t) / sample_volume_;
    return sample_volume_ * std::sqrt(frac * (1.0 - frac) / m);
}

double RearrangementProfile::fstar(double tau) const {
    if (source_ != DistributionSource::mc_estimate) return fstar_(tau);
    // smallest sample value t with #{v > t} <= tau / cell
    const double cell = sample_volume_ / static_cast<double>(samples_.size());
    const double allowed = std::floor(tau / cell + 1e-9);
    if (allowed >= static_cast<double>(samples_.size())) return 0.0;
    return samples_[static_cast<std::size_t>(allowed)];
}

RearrangementProfile RearrangementProfile::with_radial(RadialProfile g, double support_radius,
                                                       double length_scale) const {
    RearrangementProfile out = *this;
    out.length_scale_ = length_scale;
    out.radial_ = std::move(g);
    out.support_radius_ = support_radius;
    return out;
}

RearrangementProfile RearrangementProfile::analytic(DistributionSource source, int dim, std::function<double(double)> mu,
                                                    std::function<double(double)> fstar, double sup,
                                                    double support_measure, std::vector<double> jumps) {
    RearrangementProfile p;
    p.source_ = source;
    p.dim_ = dim;
    p.mu_ = std::move(mu);
    p.fstar_ = std::move(fstar);
    p.sup_ = sup;
    p.support_measure_ = support_measure;
    p.jumps_ = std::move(jumps);
    return p;
}

RearrangementProfile RearrangementProfile::sampled(int dim, std::vector<double> values, double volume) {
    if (values.empty()) throw ConstraintViolation("sample_count", 0, 1, "no samples for the distribution function");
    RearrangementProfile p;
    p.source_ = DistributionSource::mc_estimate;
    p.dim_ = dim;
    p.draws_ = values;
    p.samples_ = std::move(values);
    std::sort(p.samples_.begin(), p.samples_.end(), std::greater<double>());
    p.sample_volume_ = volume;
    p.sup_ = p.samples_.front();
    const auto positive = std::count_if(p.samples_.begin(), p.samples_.end(), [](double v) { return v > 0.0; });
    p.support_measure_ = volume * static_cast<double>(positive) / static_cast<double>(p.samples_.size());
    return p;
}

RearrangementProfile distribution(const TestFunction& f, DistributionMethod method, const McConfig& cfg) {
    // smooth radial nonincreasing |f|: keep the profile for the r-parametrized Lorentz integral
    auto attach = [&f](RearrangementProfile p) {
        if (!f.smooth() || !f.radial()) return p;
        const RadialProfile& g = *f.profile();
        RadialProfile abs_g;
        abs_g.value = [v = g.value](double r) { return std::abs(v(r)); };
        abs_g.derivative = [d = g.derivative](double r) { return -std::abs(d(r)); };
        abs_g.breakpoints = g.breakpoints;
        abs_g.decreasing = true;
        return p.with_radial(std::move(abs_g), f.support_radius(), f.length_scale());
    };
    switch (method) {
        case DistributionMethod::closed_form: {
            auto c = closed_form(f);
            if (!c) throw UnknownName("no closed-form distribution function for " + f.name());
            return attach(*c);
        }
        case DistributionMethod::profile_inversion: return attach(invert_profile(f));
        case DistributionMethod::mc_estimate: return estimate_mc(f, cfg);
        case DistributionMethod::automatic: break;
    }
    if (auto c = closed_form(f)) return attach(*c);
    if (f.radial()) {
        try {
            return attach(invert_profile(f));
        } catch (const NonMonotoneProfile&) {
        }
    }
    return estimate_mc(f, cfg);
}

Estimate lorentz_quasinorm(const RearrangementProfile& prof, double P, double Q) {
    if (!(P > 0.0 && std::isfinite(P))) throw ConstraintViolation("lorentz-p", P, 0.0, "first Lorentz index must lie in (0, inf)");
    if (!(Q > 0.0)) throw ConstraintViolation("lorentz-q", Q, 0.0, "second Lorentz index must lie in (0, inf]");

    if (prof.source() == DistributionSource::mc_estimate) {
        const auto& desc = prof.samples();
        const double cell = prof.sample_volume() / static_cast<double>(desc.size());
        const double value = sampled_lorentz(desc, cell, P, Q);
        // spread over strided batches of the draws
        const auto& draws = prof.draws();
        std::vector<Estimate> parts;
        for (int b = 0; b < kBatches; ++b) {
            std::vector<double> sub;
            for (std::size_t i = static_cast<std::size_t>(b); i < draws.size(); i += kBatches) sub.push_back(draws[i]);
            if (sub.empty()) continue;
            std::sort(sub.begin(), sub.end(), std::greater<double>());
            const double c = prof.sample_volume() / static_cast<double>(sub.size());
            parts.push_back(Estimate{sampled_lorentz(sub, c, P, Q), 0.0, static_cast<std::int64_t>(sub.size()), Method::mc});
        }
        double mean = 0.0;
        for (const auto& e : parts) mean += e.value;
        mean /= static_cast<double>(parts.size());
        double var = 0.0;
        for (const auto& e : parts) var += (e.value - mean) * (e.value - mean);
        const double k = static_cast<double>(parts.size());
        const double se = k > 1 ? std::sqrt(var / (k - 1.0) / k) : 0.0;
        return Estimate{value, se, static_cast<std::int64_t>(desc.size()), Method::mc};
    }

    const double sup = prof.sup();
    if (sup == 0.0) return Estimate::exact(0.0);
    const double unit = std::isinf(sup) ? 1.0 : sup;

    if (std::isinf(Q)) {
        auto phi = [&prof, P](double t) {
            const double m = prof.mu(t);
            return m > 0.0 ? t * std::pow(m, 1.0 / P) : 0.0;
        };
        auto local = [&phi](double t) {
            const double a = phi(t);
            const double b = phi(2.0 * t);
            return (a > 0.0 && b > 0.0) ? std::log2(b / a) : 0.0;
        };
        const double lo = unit * 1e-12;
        const double hi = std::isinf(sup) ? unit * 1e12 : sup * (1.0 - 1e-12);
        if (std::isinf(prof.support_measure()) && local(lo) < -1e-9) {
            throw DivergentQuasinorm("t mu(t)^{1/p} is unbounded as t -> 0");
        }
        if (std::isinf(sup) && local(hi / 2.0) > 1e-9) {
            throw DivergentQuasinorm("t mu(t)^{1/p} is unbounded as t -> inf");
        }
        const int m = 768;
        const double llo = std::log(lo);
        const double lhi = std::log(hi);
        int best = 0;
        double best_v = -1.0;
        for (int k = 0; k <= m; ++k) {
            const double v = phi(std::exp(llo + (lhi - llo) * k / m));
            if (v > best_v) {
                best_v = v;
                best = k;
            }
        }
        // golden-section refinement in the bracketing cells
        double a = llo + (lhi - llo) * std::max(best - 1, 0) / m;
        double b = llo + (lhi - llo) * std::min(best + 1, m) / m;
        const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - ratio * (b - a);
        double d = a + ratio * (b - a);
        double fc = phi(std::exp(c));
        double fd = phi(std::exp(d));
        for (int i = 0; i < 200 && b - a > 1e-14 * std::max(1.0, std::abs(a)); ++i) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = phi(std::exp(c));
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = phi(std::exp(d));
            }
        }
        best_v = std::max({best_v, fc, fd});
        return Estimate::exact(best_v);
    }

    auto h = [&prof, P, Q](double t) {
        const double m = prof.mu(t);
        return m > 0.0 ? std::pow(t, Q - 1.0) * std::pow(m, Q / P) : 0.0;
    };
    auto local = [&h](double t) {
        const double a = h(t);
        const double b = h(2.0 * t);
        return (a > 0.0 && b > 0.0) ? std::log2(b / a) : 0.0;
    };
    if (std::isinf(prof.support_measure()) && local(unit * 1e-12) <= -1.0 + 1e-9) {
        throw DivergentQuasinorm("t^{q-1} mu(t)^{q/p} is not integrable at t = 0");
    }
    if (std::isinf(sup) && local(unit * 1e12) >= -1.0 - 1e-9) {
        throw DivergentQuasinorm("t^{q-1} mu(t)^{q/p} is not integrable at t = inf");
    }
    double integral = 0.0;
    try {
        if (const RadialProfile* g = prof.radial()) {
            // t = g(r), mu(g(r)) = omega_N r^N
            const int n = prof.dim();
            const double omega = unit_ball_volume(n);
            auto hr = [g, n, omega, P, Q](double r) {
                const double v = g->value(r);
                const double dv = std::abs(g->derivative(r));
                if (v == 0.0 || dv == 0.0) return 0.0;
                return std::pow(v, Q - 1.0) * std::pow(omega * std::pow(r, n), Q / P) * dv;
            };
            integral = integrate_1d(hr, 0.0, prof.support_radius(), g->breakpoints, prof.length_scale());
        } else {
            integral = integrate_1d(h, 0.0, sup, prof.jumps(), 0.5 * unit);
        }
    } catch (const NonIntegrableSingularity& e) {
        throw DivergentQuasinorm(std::string("Lorentz integral diverges: ") + e.what());
    }
    return Estimate::exact(std::pow(P * integral, 1.0 / Q));
}

Estimate lorentz_quasinorm(const TestFunction& f, double P, double Q, const McConfig& cfg) {
    return lorentz_quasinorm(distribution(f, DistributionMethod::automatic, cfg), P, Q);
}

IdentityReport layer_cake_check(const TestFunction& f, const McConfig& cfg, double tolerance) {
    const Estimate lhs = weighted_lp_integral(f, 1.0, 0.0, cfg);
    const RearrangementProfile prof = distribution(f, DistributionMethod::automatic, cfg);
    Estimate rhs;
    if (prof.source() == DistributionSource::mc_estimate) {
        detail::Moments m;
        for (double v : prof.draws()) m.add(v);
        rhs = Estimate{prof.sample_volume() * m.mean, prof.sample_volume() * std::sqrt(m.variance_of_mean()), m.count,
                       Method::mc};
    } else if (prof.sup() == 0.0) {
        rhs = Estimate::exact(0.0);
    } else {
        const double extent = prof.support_measure();
        const double hint = std::isinf(extent) ? unit_ball_volume(f.dim()) : 0.5 * extent;
        rhs = Estimate::exact(integrate_1d([&prof](double tau) { return prof.fstar(tau); }, 0.0, extent, {}, hint));
    }
    return judge("layer_cake " + f.name(), lhs, rhs, true, tolerance);
}

IdentityReport hardy_layercake_identity(const TestFunction& u, const Params& params, const McConfig& cfg,
                                        double tolerance) {
    const int n = params.dim();
    const double beta = params.s() * params.p() + 2.0 * params.a();
    const Estimate lhs = weighted_lp_integral(u, params.p(), beta, cfg);
    const RearrangementProfile prof = distribution(u, DistributionMethod::automatic, cfg);
    const Estimate lor = lorentz_quasinorm(prof, params.p_lorentz(), params.p());
    const Estimate rhs = scaled(power(lor, params.p()), std::pow(unit_ball_volume(n), beta / n));
    const bool equality = prof.source() != DistributionSource::mc_estimate;
    return judge("hardy_layercake " + u.name(), lhs, rhs, equality, tolerance);
}

IdentityReport sobolev_layercake_identity(const TestFunction& u, const Params& params, const McConfig& cfg,
                                          double tolerance) {
    const int n = params.dim();
    const double q = params.p_star_s();
    const double beta = 2.0 * params.a() * q / params.p();
    const Estimate lhs = weighted_lp_integral(u, q, beta, cfg);
    const RearrangementProfile prof = distribution(u, DistributionMethod::automatic, cfg);
    const Estimate lor = lorentz_quasinorm(prof, params.p_lorentz(), q);
    const Estimate rhs =
        scaled(power(lor, q), std::pow(unit_ball_volume(n), 2.0 * params.a() / (n - params.s() * params.p())));
    const bool equality = prof.source() != DistributionSource::mc_estimate;
    return judge("sobolev_layercake " + u.name(), lhs, rhs, equality, tolerance);
}

}  // namespace fwlab
