#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fwlab/functions.hpp"
#include "fwlab/params.hpp"
#include "fwlab/quadrature.hpp"

namespace fwlab {

enum class DistributionSource { closed_form, profile_inversion, mc_estimate };

std::string to_string(DistributionSource s);

/// How distribution() should build the curve. automatic prefers a closed form,
/// then profile inversion for radial nonincreasing |u|, then Monte Carlo.
enum class DistributionMethod { automatic, closed_form, profile_inversion, mc_estimate };

/// mu(t) = |{|f| > t}| and its right inverse f*(tau) = inf{t > 0 : mu(t) <= tau}.
/// Immutable after construction; cheap to copy.
class RearrangementProfile {
public:
    double mu(double t) const;
    /// The radial profile g with |f| = g(|x|) when f is smooth, radial and g is
    /// nonincreasing; mu(g(r)) = omega_N r^N then parametrizes the curve.
    const RadialProfile* radial() const noexcept { return radial_ ? &*radial_ : nullptr; }
    RearrangementProfile with_radial(RadialProfile g, double support_radius, double length_scale) const;
    double support_radius() const noexcept { return support_radius_; }
    double length_scale() const noexcept { return length_scale_; }

    /// Binomial standard error of mu(t) (zero unless Monte Carlo).
    double mu_uncertainty(double t) const;
    double fstar(double tau) const;

    DistributionSource source() const noexcept { return source_; }
    int dim() const noexcept { return dim_; }
    /// ess sup |f| (may be infinite).
    double sup() const noexcept { return sup_; }
    /// mu(0+), the measure of the support (may be infinite).
    double support_measure() const noexcept { return support_measure_; }
    /// Values of t where mu may jump (besides sup()).
    const std::vector<double>& jumps() const noexcept { return jumps_; }

    /// Sorted descending sample values (Monte Carlo only) and the volume each stands for.
    const std::vector<double>& samples() const noexcept { return samples_; }
    /// The same values in draw order (used for batch error estimates).
    const std::vector<double>& draws() const noexcept { return draws_; }
    double sample_volume() const noexcept { return sample_volume_; }

    static RearrangementProfile analytic(DistributionSource source, int dim, std::function<double(double)> mu,
                                         std::function<double(double)> fstar, double sup, double support_measure,
                                         std::vector<double> jumps = {});
    /// Hit-counting curve from |f| values of points drawn uniformly on a set of the given volume.
    static RearrangementProfile sampled(int dim, std::vector<double> values, double volume);

private:
    DistributionSource source_ = DistributionSource::closed_form;
    int dim_ = 0;
    std::function<double(double)> mu_;
    std::function<double(double)> fstar_;
    double sup_ = 0.0;
    double support_measure_ = 0.0;
    std::vector<double> jumps_;
    std::optional<RadialProfile> radial_;
    double support_radius_ = kInfinity;
    double length_scale_ = 1.0;
    std::vector<double> samples_;
    std::vector<double> draws_;
    double sample_volume_ = 0.0;
};

/// Throws NonMonotoneProfile for profile_inversion on a radial |f| that increases
/// somewhere, UnknownName for closed_form on a function without one,
/// ConstraintViolation for profile_inversion on a non-radial function.
RearrangementProfile distribution(const TestFunction& f, DistributionMethod method = DistributionMethod::automatic,
                                  const McConfig& cfg = {});

/// |f|_{P,Q} = (P int_0^inf t^{Q-1} mu(t)^{Q/P} dt)^{1/Q}, or sup_t t mu(t)^{1/P} for Q = inf.
/// Throws DivergentQuasinorm when the integral (or the supremum) is infinite.
Estimate lorentz_quasinorm(const RearrangementProfile& profile, double P, double Q);
Estimate lorentz_quasinorm(const TestFunction& f, double P, double Q, const McConfig& cfg = {});

/// Two independently computed sides of an identity (or of lhs <= rhs).
struct IdentityReport {
    std::string name;
    Estimate lhs;
    Estimate rhs;
    /// |lhs - rhs| / max(|lhs|, |rhs|), zero when both vanish.
    double relative_gap = 0.0;
    double tolerance = 0.0;
    /// False when only lhs <= rhs is claimed (non-radially-decreasing input).
    bool equality = true;
    bool holds = false;
};

/// int |f| dx against int_0^inf f*(tau) dtau. Default tolerance 1e-6 for
/// deterministic paths; Monte Carlo sides also accept 3 combined uncertainties.
IdentityReport layer_cake_check(const TestFunction& f, const McConfig& cfg = {}, double tolerance = 1e-6);

/// int |u|^p |x|^{-(sp+2a)} dx = omega_N^{(sp+2a)/N} |u|^p_{p_lorentz, p}.
IdentityReport hardy_layercake_identity(const TestFunction& u, const Params& params, const McConfig& cfg = {},
                                        double tolerance = 0.02);

/// int |u|^{p*_s} |x|^{-2a p*_s/p} dx = omega_N^{2a/(N-sp)} |u|^{p*_s}_{p_lorentz, p*_s}.
IdentityReport sobolev_layercake_identity(const TestFunction& u, const Params& params, const McConfig& cfg = {},
                                          double tolerance = 0.02);

}  // namespace fwlab
