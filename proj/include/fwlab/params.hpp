#pragma once

#include <string>
#include <vector>

namespace fwlab {

/// Validated exponent bundle for the higher order weighted fractional setting.
///
/// Only `validate` constructs one, so every live instance satisfies
/// N >= 2, 1 < s < 2, 1 < p < N/s and 0 <= a < (N - s p)/2.
class Params {
public:
    int dim() const noexcept { return dim_; }
    double s() const noexcept { return s_; }
    /// Fractional part of the order, s - 1.
    double sigma() const noexcept { return sigma_; }
    double p() const noexcept { return p_; }
    double a() const noexcept { return a_; }

    /// Np / (N - sigma p).
    double p_star_sigma() const;
    /// Np / (N - s p).
    double p_star_s() const;
    /// Np / (N - s p - 2a), the first Lorentz index of the finer embedding.
    double p_lorentz() const;

    /// Exponent of lambda picked up by [u_lambda]^p under u_lambda(x) = u(lambda x).
    double seminorm_scaling_exponent() const { return 2.0 * a_ - dim_ + s_ * p_; }
    /// Exponent of lambda picked up by ||u_lambda||_{p,a}^p under the same scaling.
    double lebesgue_scaling_exponent() const { return a_ - dim_; }
    /// kappa = (N - s p - 2a)/p, the amplitude exponent that leaves the homogeneous norm invariant.
    double homogeneous_kappa() const { return (dim_ - s_ * p_ - 2.0 * a_) / p_; }

    /// False for bundles built by relaxed() whose a lies outside [0, (N - sp)/2).
    bool in_window() const noexcept { return in_window_; }

    bool operator==(const Params&) const = default;

private:
    friend Params validate(int dim, double s, double p, double a);
    friend Params relaxed(int dim, double s, double p, double a);
    Params(int dim, double s, double p, double a);

    int dim_;
    double s_;
    double sigma_;
    double p_;
    double a_;
    bool in_window_ = true;
};

/// Checks the open parameter windows in order (dimension, s, p, a) and
/// throws ConstraintViolation naming the first one that fails.
Params validate(int dim, double s, double p, double a);
/// Like validate, but accepts a weight exponent beyond (N - sp)/2 (still
/// 0 <= a < N/2, so the weights stay locally integrable). Scaling laws and
/// norms are defined there; the embeddings are not claimed.
Params relaxed(int dim, double s, double p, double a);
inline Params validate(const Params& params) {
    return validate(params.dim(), params.s(), params.p(), params.a());
}

/// Np / (N - alpha p). Throws DegenerateExponent when N - alpha p <= 0.
double critical_exponent(int dim, double p, double alpha);
inline double critical_exponent(const Params& params, double alpha) {
    return critical_exponent(params.dim(), params.p(), alpha);
}

/// Np / (N - s p - 2a). Accepts the closed endpoints (e.g. s = 2) as long as
/// the denominator stays positive.
double lorentz_target(int dim, double s, double p, double a);
inline double lorentz_target(const Params& params) {
    return lorentz_target(params.dim(), params.s(), params.p(), params.a());
}

/// Lebesgue measure of the unit ball, pi^{N/2} / Gamma(N/2 + 1), for 1 <= N <= 64.
double unit_ball_volume(int dim);

/// Exponent set of the Caffarelli-Kohn-Nirenberg interpolation inequality.
/// m is derived from (l, gamma, beta) on every read and never stored.
struct CknParams {
    double p = 1.0;
    double q = 1.0;
    double r = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double l = 0.0;
    int dim = 2;

    double m() const noexcept { return l * gamma + (1.0 - l) * beta; }
};

/// The particular choice r = p, l = 1, alpha = -(sigma p + 2a)/p,
/// gamma = -(s p + 2a)/p that yields the first order Hardy inequality.
/// q = p and beta = 0 are placeholders; they do not enter when l = 1.
CknParams ckn_hardy_choice(const Params& params);

struct ConstraintCheck {
    std::string name;
    bool applies = true;
    bool satisfied = true;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct AdmissibilityReport {
    bool admissible = true;
    std::vector<ConstraintCheck> checks;

    const ConstraintCheck* find(const std::string& name) const;
};

AdmissibilityReport ckn_admissible(const CknParams& c, double tolerance = 1e-12);

}  // namespace fwlab
