#include "fwlab/functions.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "fwlab/errors.hpp"
#include "fwlab/params.hpp"
#include "point_buffer.hpp"

namespace fwlab {

namespace {

double norm_sq(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

void fill_zero(std::span<double> out) {
    for (double& v : out) v = 0.0;
}

// exp(-1/((t-1)(2-t))) on (1,2)
double transition_bump(double t) {
    if (t <= 1.0 || t >= 2.0) return 0.0;
    return std::exp(-1.0 / ((t - 1.0) * (2.0 - t)));
}

double transition_mass() {
    static const double mass = [] {
        using boost::math::quadrature::gauss_kronrod;
        return gauss_kronrod<double, 61>::integrate(transition_bump, 1.0, 2.0, 15, 1e-15);
    }();
    return mass;
}

std::string format_name(std::string_view base, double arg) {
    std::ostringstream os;
    os << base << "(" << arg << ")";
    return os.str();
}

TestFunction make_bump(int dim) {
    auto value = [](double r) { return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0; };
    auto deriv = [](double r) {
        if (r >= 1.0) return 0.0;
        const double w = 1.0 - r * r;
        return -2.0 * r / (w * w) * std::exp(-1.0 / w);
    };
    auto eval = [](std::span<const double> x) {
        const double r2 = norm_sq(x);
        return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
    };
    auto grad = [](std::span<const double> x, std::span<double> out) {
        const double r2 = norm_sq(x);
        if (r2 >= 1.0) {
            fill_zero(out);
            return;
        }
        const double w = 1.0 - r2;
        const double c = -2.0 / (w * w) * std::exp(-1.0 / w);
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = c * x[i];
    };
    return TestFunction("bump", dim, eval, grad, 1.0, 1.0, Smoothness::compact,
                        RadialProfile{value, deriv, {1.0}, true});
}

TestFunction make_plateau_bump(int dim) {
    auto eval = [](std::span<const double> x) { return smooth_transition(std::sqrt(norm_sq(x))); };
    auto grad = [](std::span<const double> x, std::span<double> out) {
        const double r = std::sqrt(norm_sq(x));
        if (r <= 1.0 || r >= 2.0) {
            fill_zero(out);
            return;
        }
        const double c = smooth_transition_derivative(r) / r;
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = c * x[i];
    };
    return TestFunction("plateau_bump", dim, eval, grad, 2.0, 2.0, Smoothness::compact,
                        RadialProfile{smooth_transition, smooth_transition_derivative, {1.0, 2.0}, true});
}

TestFunction make_gaussian(int dim) {
    auto value = [](double r) { return std::exp(-r * r); };
    auto deriv = [](double r) { return -2.0 * r * std::exp(-r * r); };
    auto eval = [](std::span<const double> x) { return std::exp(-norm_sq(x)); };
    auto grad = [](std::span<const double> x, std::span<double> out) {
        const double c = -2.0 * std::exp(-norm_sq(x));
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = c * x[i];
    };
    return TestFunction("gaussian", dim, eval, grad, kInfinity, 4.5, Smoothness::decaying,
                        RadialProfile{value, deriv, {}, true});
}

TestFunction make_poly_bump(int dim) {
    auto eval = [](std::span<const double> x) {
        const double r2 = norm_sq(x);
        return r2 < 1.0 ? x[0] * std::exp(-1.0 / (1.0 - r2)) : 0.0;
    };
    auto grad = [](std::span<const double> x, std::span<double> out) {
        const double r2 = norm_sq(x);
        if (r2 >= 1.0) {
            fill_zero(out);
            return;
        }
        const double w = 1.0 - r2;
        const double b = std::exp(-1.0 / w);
        const double c = -2.0 / (w * w) * b * x[0];
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = c * x[i];
        out[0] += b;
    };
    return TestFunction("poly_bump", dim, eval, grad, 1.0, 1.0, Smoothness::compact);
}

TestFunction make_power_singular(int dim, double d) {
    if (!(d > 0.0 && d < dim)) {
        throw UnknownName(format_name("power_singular", d) + ": exponent must lie in (0, N)");
    }
    auto value = [d](double r) { return std::pow(r, -d); };
    auto deriv = [d](double r) { return -d * std::pow(r, -d - 1.0); };
    auto eval = [d](std::span<const double> x) { return std::pow(norm_sq(x), -0.5 * d); };
    return TestFunction(format_name("power_singular", d), dim, eval, nullptr, kInfinity, 1.0,
                        Smoothness::rearrangement, RadialProfile{value, deriv, {}, true});
}

TestFunction make_ball_indicator(int dim, double radius) {
    if (!(radius > 0.0)) throw UnknownName(format_name("ball_indicator", radius) + ": radius must be positive");
    auto value = [radius](double r) { return r < radius ? 1.0 : 0.0; };
    auto deriv = [](double) { return 0.0; };
    const double r2max = radius * radius;
    auto eval = [r2max](std::span<const double> x) { return norm_sq(x) < r2max ? 1.0 : 0.0; };
    return TestFunction(format_name("ball_indicator", radius), dim, eval, nullptr, radius, radius,
                        Smoothness::rearrangement, RadialProfile{value, deriv, {radius}, true});
}

TestFunction make_zero(int dim) {
    auto value = [](double) { return 0.0; };
    auto eval = [](std::span<const double>) { return 0.0; };
    auto grad = [](std::span<const double>, std::span<double> out) { fill_zero(out); };
    return TestFunction("zero", dim, eval, grad, 1.0, 1.0, Smoothness::compact, RadialProfile{value, value, {}, true});
}

// "name(arg)" -> (name, arg); "name" -> (name, nullopt)
std::pair<std::string, std::optional<double>> split_name(std::string_view name) {
    const auto open = name.find('(');
    if (open == std::string_view::npos) return {std::string(name), std::nullopt};
    if (name.back() != ')') throw UnknownName("malformed catalog name: " + std::string(name));
    const std::string arg(name.substr(open + 1, name.size() - open - 2));
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(arg, &used);
    } catch (const std::exception&) {
        throw UnknownName("malformed catalog argument: " + std::string(name));
    }
    if (used != arg.size()) throw UnknownName("malformed catalog argument: " + std::string(name));
    return {std::string(name.substr(0, open)), value};
}

}  // namespace

TestFunction::TestFunction(std::string name, int dim, Eval eval, Grad grad, double support_radius, double length_scale,
                           Smoothness smoothness, std::optional<RadialProfile> profile)
    : name_(std::move(name)),
      dim_(dim),
      eval_(std::move(eval)),
      grad_(std::move(grad)),
      support_radius_(support_radius),
      length_scale_(length_scale),
      smoothness_(smoothness),
      profile_(std::move(profile)) {}

void TestFunction::gradient(std::span<const double> x, std::span<double> out) const {
    if (!grad_) throw RearrangementOnlyFunction(name_ + " has no gradient (rearrangement-only entry)");
    grad_(x, out);
}

TestFunction TestFunction::renamed(std::string name) const {
    TestFunction copy = *this;
    copy.name_ = std::move(name);
    return copy;
}

std::vector<std::string> catalog_names() {
    return {"bump", "plateau_bump", "gaussian", "poly_bump", "power_singular(d)", "ball_indicator(R)", "zero"};
}

std::vector<std::string> smooth_catalog_names() { return {"bump", "plateau_bump", "gaussian", "poly_bump"}; }

TestFunction catalog(std::string_view name, int dim) {
    if (dim < 1) throw UnknownName("catalog functions need N >= 1");
    const auto [base, arg] = split_name(name);
    if (!arg) {
        if (base == "bump") return make_bump(dim);
        if (base == "plateau_bump") return make_plateau_bump(dim);
        if (base == "gaussian") return make_gaussian(dim);
        if (base == "poly_bump") return make_poly_bump(dim);
        if (base == "zero") return make_zero(dim);
    } else {
        if (base == "power_singular") return make_power_singular(dim, *arg);
        if (base == "ball_indicator") return make_ball_indicator(dim, *arg);
    }
    throw UnknownName("unknown catalog function: " + std::string(name));
}

TestFunction catalog(std::string_view name, const Params& params) { return catalog(name, params.dim()); }

TestFunction scale(const TestFunction& u, double lambda, double kappa) {
    if (!(lambda > 0.0)) throw ConstraintViolation("lambda", lambda, 0.0, "scaling factor must be positive");
    const double amp = std::pow(lambda, kappa);
    const double grad_amp = amp * lambda;
    const int dim = u.dim();

    auto eval = [u, lambda, amp, dim](std::span<const double> x) {
        detail::PointBuffer y(dim);
        for (int i = 0; i < dim; ++i) y[i] = lambda * x[i];
        return amp * u(y.cspan());
    };
    TestFunction::Grad grad;
    if (u.smooth()) {
        grad = [u, lambda, grad_amp, dim](std::span<const double> x, std::span<double> out) {
            detail::PointBuffer y(dim);
            for (int i = 0; i < dim; ++i) y[i] = lambda * x[i];
            u.gradient(y.cspan(), out);
            for (int i = 0; i < dim; ++i) out[i] *= grad_amp;
        };
    }
    std::optional<RadialProfile> profile;
    if (u.profile()) {
        const RadialProfile& base = *u.profile();
        RadialProfile scaled;
        scaled.value = [f = base.value, lambda, amp](double r) { return amp * f(lambda * r); };
        scaled.derivative = [f = base.derivative, lambda, grad_amp](double r) { return grad_amp * f(lambda * r); };
        for (double b : base.breakpoints) scaled.breakpoints.push_back(b / lambda);
        scaled.decreasing = base.decreasing;
        profile = std::move(scaled);
    }
    std::ostringstream name;
    name << u.name() << "[lambda=" << lambda << ",kappa=" << kappa << "]";
    return TestFunction(name.str(), dim, eval, grad, u.support_radius() / lambda, u.length_scale() / lambda,
                        u.smoothness(), std::move(profile));
}

TestFunction linear_combination(const TestFunction& u, double cu, const TestFunction& v, double cv) {
    if (u.dim() != v.dim()) throw ConstraintViolation("dimension", v.dim(), u.dim(), "linear_combination: dimension mismatch");
    auto eval = [u, v, cu, cv](std::span<const double> x) { return cu * u(x) + cv * v(x); };
    TestFunction::Grad grad;
    if (u.smooth() && v.smooth()) {
        grad = [u, v, cu, cv](std::span<const double> x, std::span<double> out) {
            detail::PointBuffer tmp(out.size());
            u.gradient(x, out);
            v.gradient(x, tmp.span());
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = cu * out[i] + cv * tmp[i];
        };
    }
    const Smoothness sm = !(u.smooth() && v.smooth()) ? Smoothness::rearrangement
                          : (u.compact() && v.compact()) ? Smoothness::compact
                                                         : Smoothness::decaying;
    std::optional<RadialProfile> profile;
    if (u.profile() && v.profile()) {
        RadialProfile combined;
        combined.value = [f = u.profile()->value, g = v.profile()->value, cu, cv](double r) { return cu * f(r) + cv * g(r); };
        combined.derivative = [f = u.profile()->derivative, g = v.profile()->derivative, cu, cv](double r) {
            return cu * f(r) + cv * g(r);
        };
        combined.breakpoints = u.profile()->breakpoints;
        combined.breakpoints.insert(combined.breakpoints.end(), v.profile()->breakpoints.begin(), v.profile()->breakpoints.end());
        combined.decreasing = false;
        profile = std::move(combined);
    }
    std::ostringstream name;
    name << cu << "*" << u.name() << "+" << cv << "*" << v.name();
    return TestFunction(name.str(), u.dim(), eval, grad, std::max(u.support_radius(), v.support_radius()),
                        std::max(u.length_scale(), v.length_scale()), sm, std::move(profile));
}

TestFunction multiply(const TestFunction& u, double c) {
    auto eval = [u, c](std::span<const double> x) { return c * u(x); };
    TestFunction::Grad grad;
    if (u.smooth()) {
        grad = [u, c](std::span<const double> x, std::span<double> out) {
            u.gradient(x, out);
            for (double& g : out) g *= c;
        };
    }
    std::optional<RadialProfile> profile;
    if (u.profile()) {
        RadialProfile scaled = *u.profile();
        scaled.value = [f = u.profile()->value, c](double r) { return c * f(r); };
        scaled.derivative = [f = u.profile()->derivative, c](double r) { return c * f(r); };
        scaled.decreasing = u.profile()->decreasing && c >= 0.0;
        profile = std::move(scaled);
    }
    std::ostringstream name;
    name << c << "*" << u.name();
    return TestFunction(name.str(), u.dim(), eval, grad, u.support_radius(), u.length_scale(), u.smoothness(),
                        std::move(profile));
}

TestFunction translate(const TestFunction& u, std::vector<double> shift) {
    if (static_cast<int>(shift.size()) != u.dim()) {
        throw ConstraintViolation("dimension", static_cast<double>(shift.size()), u.dim(), "translate: shift dimension mismatch");
    }
    const double offset = std::sqrt(norm_sq(shift));
    auto eval = [u, shift](std::span<const double> x) {
        detail::PointBuffer y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - shift[i];
        return u(y.cspan());
    };
    TestFunction::Grad grad;
    if (u.smooth()) {
        grad = [u, shift](std::span<const double> x, std::span<double> out) {
            detail::PointBuffer y(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - shift[i];
            u.gradient(y.cspan(), out);
        };
    }
    return TestFunction(u.name() + "[shifted]", u.dim(), eval, grad, u.support_radius() + offset,
                        u.length_scale() + offset, u.smoothness());
}

TestFunction rotate(const TestFunction& u, std::vector<double> q) {
    const int n = u.dim();
    if (static_cast<int>(q.size()) != n * n) {
        throw ConstraintViolation("dimension", static_cast<double>(q.size()), n * n, "rotate: matrix must be N x N");
    }
    auto apply = [q, n](std::span<const double> x) {
        std::vector<double> y(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) y[i] += q[i * n + j] * x[j];
        return y;
    };
    auto eval = [u, apply](std::span<const double> x) { return u(apply(x)); };
    TestFunction::Grad grad;
    if (u.smooth()) {
        // grad (u o Q)(x) = Q^T grad u(Qx)
        grad = [u, apply, q, n](std::span<const double> x, std::span<double> out) {
            std::vector<double> g(n);
            u.gradient(apply(x), g);
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int i = 0; i < n; ++i) acc += q[i * n + j] * g[i];
                out[j] = acc;
            }
        };
    }
    return TestFunction(u.name() + "[rotated]", n, eval, grad, u.support_radius(), u.length_scale(), u.smoothness(),
                        u.profile());
}

TestFunction gradient_magnitude(const TestFunction& u) {
    if (!u.smooth()) throw RearrangementOnlyFunction(u.name() + " has no gradient (rearrangement-only entry)");
    const int n = u.dim();
    auto eval = [u, n](std::span<const double> x) {
        detail::PointBuffer g(n);
        u.gradient(x, g.span());
        return std::sqrt(norm_sq(g.cspan()));
    };
    std::optional<RadialProfile> profile;
    if (u.profile()) {
        RadialProfile mag;
        mag.value = [f = u.profile()->derivative](double r) { return std::abs(f(r)); };
        mag.derivative = nullptr;
        mag.breakpoints = u.profile()->breakpoints;
        mag.decreasing = false;
        profile = std::move(mag);
    }
    return TestFunction("|grad " + u.name() + "|", n, eval, nullptr, u.support_radius(), u.length_scale(),
                        Smoothness::rearrangement, std::move(profile));
}

double smooth_transition(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    using boost::math::quadrature::gauss;
    // integrate over the shorter side for accuracy near either end
    const double t = r < 1.5 ? 1.0 - gauss<double, 30>::integrate(transition_bump, 1.0, r) / transition_mass()
                             : gauss<double, 30>::integrate(transition_bump, r, 2.0) / transition_mass();
    return std::clamp(t, 0.0, 1.0);
}

double smooth_transition_derivative(double r) { return -transition_bump(r) / transition_mass(); }

double smooth_transition_second_derivative(double r) {
    if (r <= 1.0 || r >= 2.0) return 0.0;
    const double w = (r - 1.0) * (2.0 - r);
    return -transition_bump(r) * (3.0 - 2.0 * r) / (w * w) / transition_mass();
}

double gradient_fd_discrepancy(const TestFunction& u, std::span<const std::vector<double>> points, double h) {
    const int n = u.dim();
    std::vector<double> g(n);
    double worst = 0.0;
    for (const auto& x : points) {
        u.gradient(x, g);
        std::vector<double> y = x;
        for (int i = 0; i < n; ++i) {
            y[i] = x[i] + h;
            const double fp = u(y);
            y[i] = x[i] - h;
            const double fm = u(y);
            y[i] = x[i];
            const double fd = (fp - fm) / (2.0 * h);
            worst = std::max(worst, std::abs(g[i] - fd) / (1.0 + std::abs(g[i])));
        }
    }
    return worst;
}

}  // namespace fwlab
