#include "fwlab/params.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fwlab/errors.hpp"

namespace fwlab {

namespace {

std::string describe(const std::string& name, double value, const std::string& relation, double bound) {
    std::ostringstream os;
    os << name << " = " << value << " violates " << relation << " " << bound;
    return os.str();
}

}  // namespace

ConstraintViolation::ConstraintViolation(std::string name, double value, double bound, const std::string& detail)
    : Error(detail), name_(std::move(name)), value_(value), bound_(bound) {}

Params::Params(int dim, double s, double p, double a)
    : dim_(dim), s_(s), sigma_(s - 1.0), p_(p), a_(a) {}

double Params::p_star_sigma() const { return critical_exponent(dim_, p_, sigma_); }
double Params::p_star_s() const { return critical_exponent(dim_, p_, s_); }
double Params::p_lorentz() const { return lorentz_target(dim_, s_, p_, a_); }

Params validate(int dim, double s, double p, double a) {
    if (dim < 2) {
        throw ConstraintViolation("dimension", dim, 2, describe("N", dim, ">=", 2));
    }
    if (!(s > 1.0 && s < 2.0)) {
        const double bound = s <= 1.0 ? 1.0 : 2.0;
        throw ConstraintViolation("s-window", s, bound, describe("s", s, "1 < s < 2 at", bound));
    }
    const double p_max = dim / s;
    if (!(p > 1.0 && p < p_max)) {
        const double bound = p <= 1.0 ? 1.0 : p_max;
        throw ConstraintViolation("p-window", p, bound, describe("p", p, "1 < p < N/s at", bound));
    }
    const double a_max = (dim - s * p) / 2.0;
    if (!(a >= 0.0 && a < a_max)) {
        const double bound = a < 0.0 ? 0.0 : a_max;
        throw ConstraintViolation("a-window", a, bound, describe("a", a, "0 <= a < (N - sp)/2 at", bound));
    }
    return Params(dim, s, p, a);
}

Params relaxed(int dim, double s, double p, double a) {
    try {
        return validate(dim, s, p, a);
    } catch (const ConstraintViolation& e) {
        if (e.name() != "a-window" || a < 0.0) throw;
    }
    const double a_max = dim / 2.0;
    if (!(a < a_max)) {
        throw ConstraintViolation("a-window", a, a_max, describe("a", a, "a < N/2 at", a_max));
    }
    Params out(dim, s, p, a);
    out.in_window_ = false;
    return out;
}

double critical_exponent(int dim, double p, double alpha) {
    const double denom = dim - alpha * p;
    if (!(denom > 0.0)) {
        std::ostringstream os;
        os << "N - alpha p = " << denom << " <= 0 (N=" << dim << ", p=" << p << ", alpha=" << alpha << ")";
        throw DegenerateExponent(os.str());
    }
    return dim * p / denom;
}

double lorentz_target(int dim, double s, double p, double a) {
    const double denom = dim - s * p - 2.0 * a;
    if (!(denom > 0.0)) {
        std::ostringstream os;
        os << "N - sp - 2a = " << denom << " <= 0";
        throw DegenerateExponent(os.str());
    }
    return dim * p / denom;
}

double unit_ball_volume(int dim) {
    if (dim < 1 || dim > 64) {
        throw ConstraintViolation("dimension", dim, dim < 1 ? 1 : 64, describe("N", dim, "1 <= N <= 64 at", dim < 1 ? 1 : 64));
    }
    // log-Gamma keeps the large-N values finite
    const double half = 0.5 * dim;
    return std::exp(half * std::log(std::numbers::pi) - std::lgamma(half + 1.0));
}

CknParams ckn_hardy_choice(const Params& params) {
    CknParams c;
    c.dim = params.dim();
    c.p = params.p();
    c.r = params.p();
    c.l = 1.0;
    c.alpha = -(params.sigma() * params.p() + 2.0 * params.a()) / params.p();
    c.gamma = -(params.s() * params.p() + 2.0 * params.a()) / params.p();
    c.q = params.p();
    c.beta = 0.0;
    return c;
}

const ConstraintCheck* AdmissibilityReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

AdmissibilityReport ckn_admissible(const CknParams& c, double tolerance) {
    AdmissibilityReport report;
    const double n = c.dim;
    const double m = c.m();

    auto add = [&](std::string name, bool applies, bool ok, double lhs, double rhs) {
        report.checks.push_back({std::move(name), applies, !applies || ok, lhs, rhs});
        if (applies && !ok) report.admissible = false;
    };

    add("exponent-range", true, c.p >= 1.0 && c.q >= 1.0 && c.r > 0.0 && c.l >= 0.0 && c.l <= 1.0, 0.0, 0.0);

    const double pos_p = 1.0 / c.p + c.alpha / n;
    const double pos_q = 1.0 / c.q + c.beta / n;
    const double pos_r = 1.0 / c.r + m / n;
    add("positivity-p", true, pos_p > 0.0, pos_p, 0.0);
    add("positivity-q", true, pos_q > 0.0, pos_q, 0.0);
    add("positivity-r", true, pos_r > 0.0, pos_r, 0.0);

    const double gradient_side = 1.0 / c.p + (c.alpha - 1.0) / n;
    const double balance_rhs = c.l * gradient_side + (1.0 - c.l) * pos_q;
    add("balance", true, std::abs(pos_r - balance_rhs) <= tolerance, pos_r, balance_rhs);

    const double gap = c.alpha - c.gamma;
    const bool interpolating = c.l > 0.0;
    add("alpha-minus-gamma-lower", interpolating, gap >= -tolerance, gap, 0.0);
    const bool equality_case = interpolating && std::abs(pos_r - gradient_side) <= tolerance;
    add("alpha-minus-gamma-upper", equality_case, gap <= 1.0 + tolerance, gap, 1.0);

    return report;
}

}  // namespace fwlab
