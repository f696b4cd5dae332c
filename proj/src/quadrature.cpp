#include "fwlab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "fwlab/errors.hpp"
#include "fwlab/params.hpp"
#include "fwlab/rng.hpp"
#include "point_buffer.hpp"

namespace fwlab {

std::string to_string(Method m) {
    switch (m) {
        case Method::radial: return "radial";
        case Method::mc: return "mc";
        case Method::mc2n: return "mc2n";
        case Method::deterministic: return "deterministic";
    }
    return "unknown";
}

Estimate average(std::span<const Estimate> estimates) {
    if (estimates.empty()) return {};
    Estimate out;
    out.method = estimates.front().method;
    double sq = 0.0;
    for (const auto& e : estimates) {
        out.value += e.value;
        sq += e.uncertainty * e.uncertainty;
        out.samples += e.samples;
    }
    const double k = static_cast<double>(estimates.size());
    out.value /= k;
    out.uncertainty = std::sqrt(sq / k) / std::sqrt(k);
    return out;
}

Estimate sum(const Estimate& lhs, const Estimate& rhs) {
    Estimate out;
    out.value = lhs.value + rhs.value;
    out.uncertainty = std::hypot(lhs.uncertainty, rhs.uncertainty);
    out.samples = lhs.samples + rhs.samples;
    out.method = lhs.method == rhs.method ? lhs.method : Method::mc;
    return out;
}

Estimate power(const Estimate& e, double q) {
    Estimate out = e;
    if (e.value == 0.0) {
        out.value = 0.0;
        // d(v^q)/dv blows up at 0 for q < 1; report the one-sided bound instead
        out.uncertainty = std::pow(e.uncertainty, q);
        return out;
    }
    out.value = std::pow(e.value, q);
    out.uncertainty = std::abs(q * out.value / e.value) * e.uncertainty;
    return out;
}

Estimate scaled(const Estimate& e, double c) {
    Estimate out = e;
    out.value *= c;
    out.uncertainty *= std::abs(c);
    return out;
}

McConfig McConfig::for_dimension(int dim, std::uint64_t seed) {
    McConfig cfg;
    cfg.seed = seed;
    cfg.sample_count = dim <= 2 ? 200000 : 1000000;
    return cfg;
}

void McConfig::check() const {
    if (sample_count < 1000) {
        throw ConstraintViolation("sample_count", static_cast<double>(sample_count), 1000, "McConfig: sample_count must be >= 1000");
    }
    if (truncation_radius < 0.0 || singular_split_radius < 0.0) {
        throw ConstraintViolation("radius", std::min(truncation_radius, singular_split_radius), 0.0,
                                  "McConfig: radii must be nonnegative (0 = automatic)");
    }
    if (truncation_radius > 0.0 && singular_split_radius > 0.0 && !(truncation_radius > singular_split_radius)) {
        throw ConstraintViolation("truncation_radius", truncation_radius, singular_split_radius,
                                  "McConfig: truncation_radius must exceed singular_split_radius");
    }
    if (!(inner_fraction > 0.0 && inner_fraction < 1.0)) {
        throw ConstraintViolation("inner_fraction", inner_fraction, 0.5, "McConfig: inner_fraction must lie in (0,1)");
    }
}

namespace detail {

void Moments::add(double v) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
}

void Moments::merge(const Moments& other) {
    if (other.count == 0) return;
    if (count == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double n = na + nb;
    const double delta = other.mean - mean;
    mean += delta * nb / n;
    m2 += other.m2 + delta * delta * na * nb / n;
    count += other.count;
}

double Moments::variance_of_mean() const {
    if (count < 2) return 0.0;
    return m2 / static_cast<double>(count - 1) / static_cast<double>(count);
}

Moments reduce_blocks(std::int64_t begin, std::int64_t end, int workers,
                      const std::function<void(std::int64_t, Moments&)>& body) {
    constexpr std::int64_t kBlock = 2048;
    const std::int64_t total = std::max<std::int64_t>(0, end - begin);
    const std::int64_t blocks = (total + kBlock - 1) / kBlock;
    std::vector<Moments> partial(static_cast<std::size_t>(blocks));

    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (;;) {
            const std::int64_t b = next.fetch_add(1);
            if (b >= blocks) return;
            try {
                Moments m;
                const std::int64_t lo = begin + b * kBlock;
                const std::int64_t hi = std::min(end, lo + kBlock);
                for (std::int64_t i = lo; i < hi; ++i) body(i, m);
                partial[static_cast<std::size_t>(b)] = m;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(blocks);
            }
        }
    };

    const int threads = std::clamp<int>(workers, 1, static_cast<int>(std::max<std::int64_t>(1, blocks)));
    if (threads == 1) {
        run();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(run);
    }
    if (failure) std::rethrow_exception(failure);

    Moments out;
    for (const auto& m : partial) out.merge(m);
    return out;
}

}  // namespace detail

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr double kPanelTol = 1e-13;
constexpr int kMaxPanels = 2000;

struct PanelSum {
    double value = 0.0;
    double error = 0.0;
    double compensation = 0.0;

    void add(double v, double err) {
        const double y = v - compensation;
        const double t = value + y;
        compensation = (t - value) - y;
        value = t;
        error += err;
    }
};

// Adaptive GK31 on [a, b]. The tolerance is relative to the panel's L1 norm but
// never tighter than kPanelTol * scale, so panels that are negligible against
// the running total are not refined down to rounding noise.
double panel(const std::function<double(double)>& f, double a, double b, double* err, double scale = 0.0) {
    double l1 = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, err, &l1);
    const double floor = kPanelTol * std::abs(scale);
    if (*err <= std::max(kPanelTol * l1, floor)) return v;
    double tol = kPanelTol;
    if (l1 > 0.0 && floor > kPanelTol * l1) tol = floor / l1;
    return gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol, err);
}

// Geometric panels marching away from an endpoint: [lo, hi] = [b 2^{-k-1}, b 2^{-k}]
// toward zero, or [R 2^k, R 2^{k+1}] toward infinity. Stops once the observed
// power law makes the remaining tail negligible, adding that tail analytically.
void geometric_panels(const std::function<double(double)>& f, double start, bool toward_zero, PanelSum& acc,
                      double reference) {
    double prev = std::numeric_limits<double>::quiet_NaN();
    double prev_ratio = std::numeric_limits<double>::quiet_NaN();
    double edge = start;
    for (int k = 0; k < kMaxPanels; ++k) {
        const double lo = toward_zero ? edge * 0.5 : edge;
        const double hi = toward_zero ? edge : edge * 2.0;
        if (toward_zero && lo < std::numeric_limits<double>::min() * 1e10) return;
        if (!toward_zero && hi > std::numeric_limits<double>::max() / 4) break;
        double err = 0.0;
        const double v = panel(f, lo, hi, &err, std::max(std::abs(acc.value), std::abs(reference)));
        acc.add(v, err);
        edge = toward_zero ? lo : hi;

        const double scale = std::max(std::abs(acc.value), std::abs(reference));
        if (v == 0.0 && prev == 0.0) return;
        if (k >= 2 && std::isfinite(prev) && prev != 0.0) {
            const double ratio = v / prev;
            const bool steady = std::isfinite(prev_ratio) && std::abs(ratio - prev_ratio) <= 1e-6 * std::abs(ratio);
            if (ratio > 0.0 && ratio < 1.0) {
                const double tail = v * ratio / (1.0 - ratio);
                if (std::abs(tail) <= 1e-15 * scale || (steady && std::abs(tail) <= 1e3 * scale)) {
                    acc.add(tail, std::abs(tail) * 1e-6);
                    return;
                }
            } else if (k > 60 && ratio >= 1.0 - 1e-9) {
                if (toward_zero) throw NonIntegrableSingularity("integrand is not integrable at the origin");
                throw NoConvergence("integrand tail does not decay");
            }
            prev_ratio = ratio;
        }
        if (std::abs(v) <= 1e-18 * scale && k > 4) return;
        prev = v;
    }
    if (toward_zero) throw NonIntegrableSingularity("origin panels did not converge");
    throw NoConvergence("tail panels did not converge");
}

}  // namespace

double integrate_1d(const std::function<double(double)>& f, double lo, double hi, std::span<const double> breakpoints,
                    double scale_hint) {
    if (!(hi > lo)) return 0.0;
    const bool infinite = std::isinf(hi);
    std::vector<double> nodes;
    for (double b : breakpoints) {
        if (b > lo && b < hi) nodes.push_back(b);
    }
    if (!infinite) nodes.push_back(hi);
    if (nodes.empty()) nodes.push_back(lo + std::max(scale_hint, 1e-300));
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    PanelSum acc;
    // middle panels first so the tails have a reference magnitude
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        double err = 0.0;
        acc.add(panel(f, nodes[i], nodes[i + 1], &err, acc.value), err);
    }
    if (lo == 0.0) {
        geometric_panels(f, nodes.front(), true, acc, acc.value);
    } else {
        double err = 0.0;
        acc.add(panel(f, lo, nodes.front(), &err, acc.value), err);
    }
    if (infinite) geometric_panels(f, nodes.back(), false, acc, acc.value);

    if (!std::isfinite(acc.value)) throw NoConvergence("integral is not finite");
    if (acc.error > 1e-6 * std::abs(acc.value) + 1e-200) {
        std::ostringstream os;
        os << "quadrature error estimate " << acc.error << " too large for value " << acc.value;
        throw NoConvergence(os.str());
    }
    return acc.value;
}

Estimate integrate_radial(const std::function<double(double)>& profile, double beta, int dim, double rmax,
                          std::span<const double> breakpoints, double scale_hint) {
    const double e = dim - 1.0 - beta;
    // local exponent of the profile at the origin
    double hint = scale_hint;
    if (!std::isinf(rmax)) hint = std::min(hint, rmax);
    for (double b : breakpoints) {
        if (b > 0.0) hint = std::min(hint, b);
    }
    const double eps = 1e-9 * hint;
    const double g1 = std::abs(profile(eps));
    const double g2 = std::abs(profile(2.0 * eps));
    if (g1 > 0.0 && g2 > 0.0) {
        const double local = std::log2(g2 / g1);
        if (e + 1.0 + local <= 1e-9) {
            std::ostringstream os;
            os << "r^" << e << " times a profile of local order " << local << " is not integrable at r = 0";
            throw NonIntegrableSingularity(os.str());
        }
    }
    auto integrand = [&](double r) {
        const double g = profile(r);
        return g == 0.0 ? 0.0 : g * std::pow(r, e);
    };
    const double radial = integrate_1d(integrand, 0.0, rmax, breakpoints, scale_hint);
    return Estimate::exact(dim * unit_ball_volume(dim) * radial, Method::radial);
}

namespace {

double norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

// Importance draw; returns the density at the drawn point.
double draw(const Importance& imp, int dim, CounterRng& rng, std::span<double> x) {
    const double omega = unit_ball_volume(dim);
    switch (imp.kind) {
        case Importance::Kind::uniform_ball: {
            rng.direction(x);
            const double r = imp.radius * std::pow(rng.uniform(), 1.0 / dim);
            for (double& v : x) v *= r;
            return 1.0 / (omega * std::pow(imp.radius, dim));
        }
        case Importance::Kind::gaussian: {
            double r2 = 0.0;
            for (double& v : x) {
                v = imp.radius * rng.normal();
                r2 += v * v;
            }
            const double var = imp.radius * imp.radius;
            return std::exp(-0.5 * r2 / var) / std::pow(2.0 * std::numbers::pi * var, 0.5 * dim);
        }
        case Importance::Kind::radial_power: {
            const double k = dim - imp.exponent;
            rng.direction(x);
            const double r = imp.radius * std::pow(rng.uniform(), 1.0 / k);
            for (double& v : x) v *= r;
            return k / (dim * omega * std::pow(imp.radius, k)) * std::pow(r, -imp.exponent);
        }
    }
    return 0.0;
}

constexpr std::uint64_t kDiagnosticStream = 0xd1a6u;

}  // namespace

Estimate integrate_mc(const std::function<double(std::span<const double>)>& f, int dim, const McConfig& cfg,
                      const Importance& importance) {
    cfg.check();
    if (importance.kind == Importance::Kind::radial_power && !(importance.exponent < dim)) {
        throw NonIntegrableSingularity("radial_power importance needs exponent < N");
    }
    if (!(importance.radius > 0.0)) throw ConstraintViolation("radius", importance.radius, 0.0, "importance radius must be positive");

    if (importance.kind != Importance::Kind::gaussian) {
        CounterRng rng(cfg.seed ^ kDiagnosticStream, 0);
        detail::PointBuffer x(static_cast<std::size_t>(dim));
        for (int i = 0; i < 512; ++i) {
            rng.direction(x.span());
            const double r = importance.radius * (1.0 + rng.uniform());
            for (std::size_t k = 0; k < x.size(); ++k) x[k] *= r;
            if (f(x.cspan()) != 0.0) {
                throw ZeroDensityRegion("integrand is nonzero outside the importance ball");
            }
        }
    }

    const auto moments = detail::reduce_blocks(0, cfg.sample_count, cfg.workers, [&](std::int64_t i, detail::Moments& m) {
        CounterRng rng(cfg.seed, static_cast<std::uint64_t>(i));
        detail::PointBuffer x(static_cast<std::size_t>(dim));
        const double q = draw(importance, dim, rng, x.span());
        const double v = f(x.cspan());
        m.add(v == 0.0 ? 0.0 : v / q);
    });
    return {moments.mean, std::sqrt(moments.variance_of_mean()), moments.count, Method::mc};
}

Estimate gagliardo_mc(const PairIntegrand& integrand, double kernel_exponent, double weight_a, const McConfig& cfg) {
    cfg.check();
    const int dim = integrand.dim;
    const double near_rate = integrand.difference_order - kernel_exponent + dim;
    if (!(near_rate > 0.0)) {
        std::ostringstream os;
        os << "near-diagonal exponent " << near_rate << " <= 0: kernel " << kernel_exponent
           << " is too singular for difference order " << integrand.difference_order;
        throw NonIntegrableSingularity(os.str());
    }
    const double far_rate = kernel_exponent + weight_a - dim;
    if (!(far_rate > 0.0)) throw NonIntegrableSingularity("kernel does not decay fast enough at infinity");
    if (!(weight_a >= 0.0 && 2.0 * weight_a < dim)) {
        throw NonIntegrableSingularity("weight exponent a must satisfy 0 <= a < N/2");
    }

    const double truncation = cfg.truncation_radius > 0.0 ? cfg.truncation_radius : integrand.length_scale;
    const double split = cfg.singular_split_radius > 0.0 ? cfg.singular_split_radius : 0.25 * integrand.length_scale;
    if (!(truncation > 0.0 && split > 0.0)) throw ConstraintViolation("truncation_radius", truncation, 0.0, "radii must be positive");

    if (integrand.magnitude) {
        CounterRng rng(cfg.seed ^ kDiagnosticStream, 1);
        detail::PointBuffer x(static_cast<std::size_t>(dim));
        double inside = 0.0;
        double outside = 0.0;
        for (int i = 0; i < 512; ++i) {
            rng.direction(x.span());
            const double r_in = truncation * std::pow(rng.uniform(), 1.0 / dim);
            for (std::size_t k = 0; k < x.size(); ++k) x[k] *= r_in;
            inside = std::max(inside, std::abs(integrand.magnitude(x.cspan())));
            rng.direction(x.span());
            const double r_out = truncation * (1.0 + rng.uniform());
            for (std::size_t k = 0; k < x.size(); ++k) x[k] *= r_out;
            outside = std::max(outside, std::abs(integrand.magnitude(x.cspan())));
        }
        if (outside > 1e-6 * inside && outside > 0.0) {
            throw ZeroDensityRegion("field does not vanish outside the truncation radius");
        }
    }

    const double omega = unit_ball_volume(dim);
    const double sphere = dim * omega;
    const double x_mass = sphere * std::pow(truncation, dim - weight_a) / (dim - weight_a);
    const double gamma_in = 0.5 * near_rate;
    const double eta = far_rate;
    const std::int64_t n_inner = std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::llround(cfg.inner_fraction * static_cast<double>(cfg.sample_count))), 1,
        cfg.sample_count - 1);

    auto sample = [&](std::int64_t i, bool inner) {
        CounterRng rng(cfg.seed, static_cast<std::uint64_t>(i));
        detail::PointBuffer x(static_cast<std::size_t>(dim));
        detail::PointBuffer y(static_cast<std::size_t>(dim));
        rng.direction(x.span());
        const double rx = truncation * std::pow(rng.uniform(), 1.0 / (dim - weight_a));
        for (std::size_t k = 0; k < x.size(); ++k) x[k] *= rx;

        rng.direction(y.span());
        double rz = 0.0;
        double log_q = 0.0;  // log of the radial density of |z|
        if (inner) {
            rz = split * std::pow(rng.uniform(), 1.0 / gamma_in);
            log_q = std::log(gamma_in) + (gamma_in - 1.0) * std::log(rz) - gamma_in * std::log(split);
        } else {
            rz = split * std::pow(rng.uniform(), -1.0 / eta);
            log_q = std::log(eta) + eta * std::log(split) - (1.0 + eta) * std::log(rz);
        }
        for (std::size_t k = 0; k < y.size(); ++k) y[k] = x[k] + rz * y[k];

        const double f = integrand.numerator(x.cspan(), y.cspan());
        if (f == 0.0) return 0.0;
        const double ry = norm(y.cspan());
        const double outside = ry < truncation ? 1.0 : 2.0;
        const double log_w = (dim - 1.0 - kernel_exponent) * std::log(rz) - log_q - weight_a * std::log(ry);
        return f * outside * x_mass * sphere * std::exp(log_w);
    };

    const auto inner = detail::reduce_blocks(0, n_inner, cfg.workers,
                                             [&](std::int64_t i, detail::Moments& m) { m.add(sample(i, true)); });
    const auto outer = detail::reduce_blocks(n_inner, cfg.sample_count, cfg.workers,
                                             [&](std::int64_t i, detail::Moments& m) { m.add(sample(i, false)); });
    const double value = inner.mean + outer.mean;
    const double se = std::sqrt(inner.variance_of_mean() + outer.variance_of_mean());
    return {value, se, cfg.sample_count, Method::mc2n};
}

}  // namespace fwlab
